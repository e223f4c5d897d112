"""Text form of space specs: ``FAMILY:key=value,...``.

Examples: ``N:s=1,u=2,p=3/2,q=2,d=1``, ``Btau:s=1,p=2,tau=1/4,q=inf,d=2``,
``rhoB:s=1,p=2,rho=-1,q=1,d=3``, ``Lr:r=2,d=1``, ``bmo:d=2`` and the
sequence spaces ``n:sigma=1,u=2,p=1,q=1,d=1``.  Values are integers, ``a/b``,
exact decimals or ``inf``; ``1/u=`` (and likewise ``1/p=``, ``1/q=``,
``1/r=``) gives a reciprocal.  Region templates may set a value to
``sweep(a..b,steps)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .params import INF, Family, ParameterError, SeqSpec, SpaceSpec, ext, fmt, recip

KEYS = {
    "N": ("s", "u", "p", "q", "d"),
    "E": ("s", "u", "p", "q", "d"),
    "Btau": ("s", "p", "tau", "q", "d"),
    "Ftau": ("s", "p", "tau", "q", "d"),
    "B": ("s", "p", "q", "d"),
    "F": ("s", "p", "q", "d"),
    "rhoB": ("s", "p", "rho", "q", "d"),
    "rhoF": ("s", "p", "rho", "q", "d"),
    "Lr": ("r", "d"),
    "bmo": ("d",),
    "Linf": ("d",),
    "n": ("sigma", "u", "p", "q", "d"),
}
RECIPROCAL_KEYS = {"u", "p", "q", "r"}
_SWEEP = re.compile(r"sweep\(\s*([^.,()]+?)\s*\.\.\s*([^.,()]+?)\s*,\s*(\d+)\s*\)$")


class SpecParseError(ValueError):
    def __init__(self, message: str, token: str, position: int):
        super().__init__(f"{message}: {token!r} at position {position}")
        self.token = token
        self.position = position


@dataclass(frozen=True)
class Sweep:
    start: Fraction
    stop: Fraction
    steps: int

    def values(self) -> list[Fraction]:
        if self.steps == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.steps - 1)
        return [self.start + i * step for i in range(self.steps)]


def _split(text: str):
    """Yield ``(token, position)`` for the comma-separated items, ignoring commas inside parentheses."""
    depth, start = 0, 0
    for i, ch in enumerate(text + ","):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            yield text[start:i], start
            start = i + 1


def _value(raw: str, pos: int, allow_sweep: bool):
    token = raw.strip()
    if token.startswith("sweep"):
        if not allow_sweep:
            raise SpecParseError("sweep is only allowed in region templates", token, pos)
        m = _SWEEP.match(token)
        if not m:
            raise SpecParseError("expected sweep(a..b,steps)", token, pos)
        try:
            a, b = ext(m.group(1)), ext(m.group(2))
        except ParameterError:
            raise SpecParseError("bad sweep bound", token, pos) from None
        if a == INF or b == INF:
            raise SpecParseError("sweep bounds must be finite", token, pos)
        steps = int(m.group(3))
        if steps < 1:
            raise SpecParseError("sweep needs at least one step", token, pos)
        return Sweep(a, b, steps)
    try:
        return ext(token)
    except ParameterError:
        raise SpecParseError("not an exact number", token, pos) from None


def parse_fields(text: str, *, allow_sweep: bool = False) -> tuple[str, dict]:
    """Split a spec into its family tag and a ``{key: value}`` mapping (no validation of ranges)."""
    if ":" not in text:
        raise SpecParseError("missing ':' after the family tag", text, 0)
    tag, body = text.split(":", 1)
    tag_s = tag.strip()
    if tag_s not in KEYS:
        raise SpecParseError("unknown family", tag_s, 0)
    allowed = KEYS[tag_s]
    offset = len(tag) + 1
    fields: dict = {}
    if body.strip():
        for item, pos in _split(body):
            at = offset + pos
            if "=" not in item:
                raise SpecParseError("expected key=value", item, at)
            key, raw = item.split("=", 1)
            key = key.strip()
            val = _value(raw, at + len(key) + 1, allow_sweep)
            if key.startswith("1/") and key[2:] in RECIPROCAL_KEYS:
                key = key[2:]
                if not isinstance(val, Sweep):
                    val = recip(val) if val != INF else Fraction(0)
                else:
                    val = ("reciprocal", val)
            if key not in allowed:
                raise SpecParseError(f"key not valid for {tag_s}", key, at)
            if key in fields:
                raise SpecParseError("duplicate key", key, at)
            fields[key] = val
    missing = [k for k in allowed if k not in fields]
    if missing:
        raise SpecParseError("missing key", missing[0], len(text))
    return tag_s, fields


def build(tag: str, fields: dict):
    """Turn parsed fields (no sweeps) into a :class:`SpaceSpec` or :class:`SeqSpec`."""
    d = fields["d"]
    if d == INF or Fraction(d).denominator != 1:
        raise ParameterError(f"d must be a positive integer, got {fmt(d)}")
    d = int(d)
    if tag == "n":
        return SeqSpec(sigma=fields["sigma"], u=fields["u"], p=fields["p"], q=fields["q"], d=d)
    kw = {k: v for k, v in fields.items() if k != "d"}
    if tag == "Lr":
        kw = {"p": kw.pop("r")}
    return SpaceSpec(Family(tag), d, **kw)


def parse_spec(text: str):
    tag, fields = parse_fields(text)
    return build(tag, fields)


def print_spec(spec) -> str:
    """Canonical text form; ``parse_spec(print_spec(x)) == x``."""
    if isinstance(spec, SeqSpec):
        tag, vals = "n", {"sigma": spec.sigma, "u": spec.u, "p": spec.p, "q": spec.q, "d": spec.d}
    else:
        tag = spec.family.value
        vals = {"s": spec.s, "u": spec.u, "p": spec.p, "tau": spec.tau, "rho": spec.rho,
                "q": spec.q, "r": spec.r, "d": spec.d}
    return tag + ":" + ",".join(f"{k}={fmt(vals[k])}" for k in KEYS[tag])


@dataclass(frozen=True)
class Template:
    tag: str
    fields: dict

    @property
    def sweeps(self) -> list[str]:
        return [k for k in KEYS[self.tag] if k in self.fields and _is_sweep(self.fields[k])]

    def instantiate(self, values: dict):
        f = dict(self.fields)
        for k, v in values.items():
            f[k] = recip(v) if isinstance(f[k], tuple) else v
        return build(self.tag, f)


def _is_sweep(v) -> bool:
    return isinstance(v, Sweep) or (isinstance(v, tuple) and v[0] == "reciprocal")


def sweep_of(v) -> Sweep:
    return v[1] if isinstance(v, tuple) else v


def parse_template(text: str) -> Template:
    tag, fields = parse_fields(text, allow_sweep=True)
    if isinstance(fields.get("d"), Sweep):
        raise SpecParseError("the dimension cannot be swept", "d", text.find("d="))
    return Template(tag, fields)
