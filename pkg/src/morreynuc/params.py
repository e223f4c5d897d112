"""Exact parameter arithmetic for Morrey-type smoothness spaces.

Parameters are :class:`fractions.Fraction` values, extended by ``math.inf``
for the endpoint cases ``p = inf``, ``q = inf`` and so on.  Every threshold
comparison made by the classifier goes through this module, so nothing here
touches floating point except the infinity marker itself.

Conventions: ``1/inf = 0``; ``p * tau = 1`` when ``(p, tau) = (inf, 0)``;
``p_i / p_k = 1`` when both are infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Union

INF = math.inf

ExtScalar = Union[Fraction, float]  # float only ever holds +inf

__all__ = [
    "INF",
    "ExtScalar",
    "ParameterError",
    "DomainError",
    "Family",
    "SpaceSpec",
    "SeqSpec",
    "ext",
    "inv",
    "pos",
    "ratio",
    "fmt",
    "is_inf",
    "tong_number",
    "inv_tong",
    "inv_pstar",
    "gamma",
    "gamma_bar",
    "morrey_to_tau",
    "tau_to_morrey",
    "rho_to_canonical",
    "seq_shift",
]


class ParameterError(ValueError):
    """A parameter is outside the range a formula or space admits."""


class DomainError(ParameterError):
    """A conversion between space scales is requested outside its domain."""


def ext(x) -> ExtScalar:
    """Coerce ``x`` to an exact extended scalar.

    Accepts ints, Fractions, exact decimal strings, ``"a/b"`` strings and the
    infinity markers ``"inf"`` / ``math.inf``.  Finite floats are rejected:
    they would smuggle rounding into the threshold comparisons.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ParameterError(f"not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if x == INF:
            return INF
        raise ParameterError(f"finite floats are not exact parameters: {x!r}")
    if isinstance(x, str):
        t = x.strip().lower()
        if t in ("inf", "+inf", "infinity", "oo"):
            return INF
        try:
            return Fraction(t)
        except (ValueError, ZeroDivisionError):
            raise ParameterError(f"cannot parse {x!r} as an exact number") from None
    raise ParameterError(f"unsupported parameter type: {type(x).__name__}")


def is_inf(x: ExtScalar) -> bool:
    return x == INF


def inv(x: ExtScalar) -> Fraction:
    """``1/x`` with ``1/inf = 0``; ``x`` must be positive."""
    if x == INF:
        return Fraction(0)
    if x <= 0:
        raise ParameterError(f"reciprocal of non-positive value {x}")
    return 1 / x


def recip(x: Fraction) -> ExtScalar:
    """Inverse of :func:`inv`: ``1/0 = inf``."""
    if x == 0:
        return INF
    if x < 0:
        raise ParameterError(f"reciprocal of negative value {x}")
    return 1 / x


def pos(x: Fraction) -> Fraction:
    return x if x > 0 else Fraction(0)


def ratio(a: ExtScalar, b: ExtScalar) -> ExtScalar:
    """``a / b`` for positive extended scalars; ``inf/inf = 1``."""
    if a == INF and b == INF:
        return Fraction(1)
    if a == INF:
        return INF
    if b == INF:
        return Fraction(0)
    return a / b


def _mul(a: ExtScalar, b: ExtScalar) -> ExtScalar:
    # positive factors only
    if a == INF or b == INF:
        return INF
    return a * b


def fmt(x: ExtScalar | None) -> str:
    if x is None:
        return ""
    if x == INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _check_banach_exponent(name: str, r: ExtScalar) -> None:
    if not (r == INF or r >= 1):
        raise ParameterError(f"{name} must lie in [1, inf], got {fmt(r)}")


def inv_tong(r1, r2) -> Fraction:
    """Reciprocal of the Tong number, ``1 - (1/r1 - 1/r2)_+``."""
    r1, r2 = ext(r1), ext(r2)
    _check_banach_exponent("r1", r1)
    _check_banach_exponent("r2", r2)
    return 1 - pos(inv(r1) - inv(r2))


def tong_number(r1, r2) -> ExtScalar:
    """The exponent governing nuclearity of diagonal maps ``l_r1 -> l_r2``.

    Equals 1 when ``r2 <= r1`` and ``1/(1 - 1/r1 + 1/r2)`` otherwise, so the
    result lies in ``[1, inf]``.
    """
    return recip(inv_tong(r1, r2))


def inv_pstar(r1, r2) -> Fraction:
    """``1/p* = (1/r2 - 1/r1)_+``, the compactness counterpart of ``1/t``."""
    r1, r2 = ext(r1), ext(r2)
    return pos(inv(r2) - inv(r1))


def _tau_regime(tau: Fraction, p: ExtScalar) -> bool:
    # True when tau >= 1/p; p = inf always lands here (p * tau = 1 convention)
    return tau >= inv(p)


def _check_tau_args(tau1, tau2, p1, p2, *, banach: bool):
    tau1, tau2, p1, p2 = ext(tau1), ext(tau2), ext(p1), ext(p2)
    for name, t in (("tau1", tau1), ("tau2", tau2)):
        if t == INF or t < 0:
            raise ParameterError(f"{name} must be a finite number >= 0")
    lo = 1 if banach else 0
    for name, p in (("p1", p1), ("p2", p2)):
        if p != INF and (p < lo or p == 0):
            raise ParameterError(f"{name} out of range: {fmt(p)}")
    return tau1, tau2, p1, p2


def gamma(tau1, tau2, p1, p2) -> Fraction:
    """Compactness threshold for ``A^{s1,tau1}_{p1} -> A^{s2,tau2}_{p2}``.

    The embedding is compact iff ``(s1 - s2)/d`` exceeds this value.
    """
    tau1, tau2, p1, p2 = _check_tau_args(tau1, tau2, p1, p2, banach=False)
    if _tau_regime(tau2, p2):
        return inv(p1) - tau1 - inv(p2) + tau2
    if _tau_regime(tau1, p1):
        return inv(p1) - tau1
    # both tau_i < 1/p_i, so both p_i are finite here
    return pos(inv(p1) - tau1 - inv(p2) + max(tau2, p1 / p2 * tau1))


def gamma_bar(tau1, tau2, p1, p2) -> Fraction:
    """Nuclearity threshold for ``A^{s1,tau1}_{p1} -> A^{s2,tau2}_{p2}``, ``p_i >= 1``."""
    tau1, tau2, p1, p2 = _check_tau_args(tau1, tau2, p1, p2, banach=True)
    if _tau_regime(tau1, p1):
        return 1 + inv(p1) - tau1 - inv(p2) + tau2
    if _tau_regime(tau2, p2):
        return 1 - inv(p2) + tau2
    return 1 - pos(inv(p2) - tau2 - inv(p1) + max(tau1, p2 / p1 * tau2))


class Family(str, Enum):
    BESOV_MORREY = "N"
    TL_MORREY = "E"
    BESOV_TAU = "Btau"
    TL_TAU = "Ftau"
    BESOV = "B"
    TL = "F"
    RHO_B = "rhoB"
    RHO_F = "rhoF"
    LR = "Lr"
    BMO = "bmo"
    LINF = "Linf"

    @property
    def is_morrey(self) -> bool:
        return self in (Family.BESOV_MORREY, Family.TL_MORREY)

    @property
    def is_classical(self) -> bool:
        return self in (Family.BESOV, Family.TL)

    @property
    def is_tau(self) -> bool:
        return self in (Family.BESOV_TAU, Family.TL_TAU)

    @property
    def is_rho(self) -> bool:
        return self in (Family.RHO_B, Family.RHO_F)

    @property
    def is_target_only(self) -> bool:
        return self in (Family.LR, Family.BMO, Family.LINF)

    @property
    def letter(self) -> str | None:
        """``"B"`` or ``"F"`` for the smoothness scales, ``None`` otherwise."""
        if self in (Family.BESOV_MORREY, Family.BESOV_TAU, Family.BESOV, Family.RHO_B):
            return "B"
        if self in (Family.TL_MORREY, Family.TL_TAU, Family.TL, Family.RHO_F):
            return "F"
        return None


def _opt(x):
    return None if x is None else ext(x)


@dataclass(frozen=True)
class SpaceSpec:
    """Parameters of one function space on a bounded domain in R^d.

    Only the fields relevant to ``family`` are set; the others stay ``None``.
    ``L_r`` keeps its exponent in ``p``.
    """

    family: Family
    d: int
    s: Fraction | None = None
    p: ExtScalar | None = None
    u: ExtScalar | None = None
    tau: Fraction | None = None
    rho: Fraction | None = None
    q: ExtScalar | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        for name in ("s", "p", "u", "tau", "rho", "q"):
            object.__setattr__(self, name, _opt(getattr(self, name)))
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 1:
            raise ParameterError(f"dimension d must be a positive integer, got {self.d!r}")
        self._validate()

    def _require(self, *names):
        fam = self.family
        allowed = set(names)
        for name in ("s", "p", "u", "tau", "rho", "q"):
            v = getattr(self, name)
            if name in allowed and v is None:
                raise ParameterError(f"{fam.value} needs parameter {name}")
            if name not in allowed and v is not None:
                raise ParameterError(f"{fam.value} does not take parameter {name}")
        if "s" in allowed and self.s == INF:
            raise ParameterError("smoothness s must be finite")
        if "q" in allowed and not (self.q == INF or self.q > 0):
            raise ParameterError(f"q must be positive, got {fmt(self.q)}")
        if "p" in allowed and not (self.p == INF or self.p > 0):
            raise ParameterError(f"p must be positive, got {fmt(self.p)}")

    def _validate(self):
        fam = self.family
        if fam.is_morrey:
            self._require("s", "p", "u", "q")
            p, u = self.p, self.u
            if not ((p <= u and u != INF) or (p == INF and u == INF)):
                raise ParameterError(f"need 0 < p <= u < inf or p = u = inf, got p={fmt(p)}, u={fmt(u)}")
            if fam is Family.TL_MORREY and u == INF:
                raise ParameterError("E-spaces need u < inf")
        elif fam.is_classical:
            self._require("s", "p", "q")
            if fam is Family.TL and self.p == INF:
                raise ParameterError("F-spaces need p < inf")
        elif fam.is_tau:
            self._require("s", "p", "tau", "q")
            if self.tau == INF or self.tau < 0:
                raise ParameterError(f"tau must be finite and >= 0, got {fmt(self.tau)}")
            if fam is Family.TL_TAU and self.p == INF:
                raise ParameterError("F-type spaces need p < inf")
        elif fam.is_rho:
            self._require("s", "p", "rho", "q")
            if self.p == INF:
                raise ParameterError("rho-spaces need p < inf")
            if self.rho == INF or not (-self.d <= self.rho < 0):
                raise ParameterError(f"rho must satisfy -d <= rho < 0, got {fmt(self.rho)}")
        elif fam is Family.LR:
            self._require("p")
            if self.p == INF or self.p < 1:
                raise ParameterError(f"L_r needs 1 <= r < inf, got r={fmt(self.p)}")
        else:
            self._require()

    @property
    def r(self) -> ExtScalar | None:
        return self.p if self.family is Family.LR else None

    def morrey_params(self) -> tuple[ExtScalar, ExtScalar]:
        """``(u, p)``; classical spaces are read as ``u = p``."""
        if self.family.is_morrey:
            return self.u, self.p
        if self.family.is_classical:
            return self.p, self.p
        raise ParameterError(f"{self.family.value} is not on a Morrey scale")

    def tau_params(self) -> tuple[Fraction, ExtScalar]:
        """``(tau, p)``; classical spaces are read as ``tau = 0``."""
        if self.family.is_tau:
            return self.tau, self.p
        if self.family.is_classical:
            return Fraction(0), self.p
        raise ParameterError(f"{self.family.value} is not on a tau scale")


@dataclass(frozen=True)
class SeqSpec:
    """Parameters of the sequence space ``n^sigma_{u,p,q}``."""

    sigma: Fraction
    u: ExtScalar
    p: ExtScalar
    q: ExtScalar
    d: int

    def __post_init__(self):
        for name in ("sigma", "u", "p", "q"):
            object.__setattr__(self, name, ext(getattr(self, name)))
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 1:
            raise ParameterError(f"dimension d must be a positive integer, got {self.d!r}")
        if self.sigma == INF:
            raise ParameterError("sigma must be finite")
        p, u = self.p, self.u
        if p != INF and p <= 0:
            raise ParameterError("p must be positive")
        if not ((p <= u and u != INF) or (p == INF and u == INF)):
            raise ParameterError(f"need 0 < p <= u < inf or p = u = inf, got p={fmt(p)}, u={fmt(u)}")
        if not (self.q == INF or self.q > 0):
            raise ParameterError("q must be positive")


def morrey_to_tau(spec: SpaceSpec) -> SpaceSpec:
    """Rewrite a Morrey space as the tau-space it coincides with.

    ``E^s_{u,p,q} = F^{s,tau}_{p,q}`` with ``tau = 1/p - 1/u``; for Besov-Morrey
    spaces the coincidence only holds when ``q = inf`` or ``u = p``.
    """
    fam = spec.family
    if fam is Family.TL_MORREY:
        target = Family.TL_TAU
    elif fam is Family.BESOV_MORREY:
        if not (spec.q == INF or spec.u == spec.p):
            raise DomainError("N^s_{u,p,q} equals a B^{s,tau} space only for q = inf or u = p")
        target = Family.BESOV_TAU
    else:
        raise DomainError(f"{fam.value} is not a Morrey family")
    tau = inv(spec.p) - inv(spec.u)
    return SpaceSpec(target, spec.d, s=spec.s, p=spec.p, tau=tau, q=spec.q)


def tau_to_morrey(spec: SpaceSpec) -> SpaceSpec:
    """Inverse of :func:`morrey_to_tau`, defined for ``0 <= tau < 1/p``."""
    fam = spec.family
    if fam not in (Family.TL_TAU, Family.BESOV_TAU):
        raise DomainError(f"{fam.value} is not a tau family")
    if spec.p == INF:
        if spec.tau != 0 or fam is Family.TL_TAU:
            raise DomainError("tau >= 1/p: no Morrey counterpart")
        return SpaceSpec(Family.BESOV_MORREY, spec.d, s=spec.s, p=INF, u=INF, q=spec.q)
    if spec.tau >= inv(spec.p):
        raise DomainError("tau >= 1/p: no Morrey counterpart")
    if fam is Family.BESOV_TAU and not (spec.q == INF or spec.tau == 0):
        raise DomainError("B^{s,tau}_{p,q} equals a Besov-Morrey space only for q = inf or tau = 0")
    u = recip(inv(spec.p) - spec.tau)
    target = Family.TL_MORREY if fam is Family.TL_TAU else Family.BESOV_MORREY
    return SpaceSpec(target, spec.d, s=spec.s, p=spec.p, u=u, q=spec.q)


def rho_to_canonical(spec: SpaceSpec, form: str = "lower") -> SpaceSpec:
    """Identify a rho-space with a Morrey (``form="lower"``) or tau (``"upper"``) space.

    The lower form uses ``u = -d p / rho``, the upper form ``tau = (1 + rho/d)/p``;
    ``rho = -d`` gives the classical space in both.
    """
    if not spec.family.is_rho:
        raise DomainError(f"{spec.family.value} is not a rho family")
    if form not in ("lower", "upper"):
        raise ParameterError(f"form must be 'lower' or 'upper', got {form!r}")
    d, rho, p = spec.d, spec.rho, spec.p
    letter = spec.family.letter
    if rho == -d:
        fam = Family.BESOV if letter == "B" else Family.TL
        return SpaceSpec(fam, d, s=spec.s, p=p, q=spec.q)
    if form == "lower":
        fam = Family.BESOV_MORREY if letter == "B" else Family.TL_MORREY
        return SpaceSpec(fam, d, s=spec.s, p=p, u=-d * p / rho, q=spec.q)
    fam = Family.BESOV_TAU if letter == "B" else Family.TL_TAU
    return SpaceSpec(fam, d, s=spec.s, p=p, tau=(1 + rho / d) / p, q=spec.q)


def seq_shift(spec: SpaceSpec) -> SeqSpec:
    """Sequence-space image of a Besov-Morrey space under the wavelet isomorphism."""
    if spec.family is Family.BESOV:
        spec = replace(spec, family=Family.BESOV_MORREY, u=spec.p)
    if spec.family is not Family.BESOV_MORREY:
        raise DomainError("the wavelet isomorphism applies to Besov-Morrey spaces")
    return SeqSpec(sigma=spec.s + Fraction(spec.d, 2), u=spec.u, p=spec.p, q=spec.q, d=spec.d)
