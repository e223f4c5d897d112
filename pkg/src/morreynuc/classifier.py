"""Compactness and nuclearity of embeddings between smoothness spaces on a bounded domain.

Every criterion has the form ``lhs > threshold`` with ``lhs = (s1 - s2)/d``
(``s/d`` for a single source space, ``(sigma1 - sigma2)/d`` for sequence
spaces), evaluated in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .params import (
    INF,
    DomainError,
    ExtScalar,
    Family,
    ParameterError,
    SeqSpec,
    SpaceSpec,
    fmt,
    gamma,
    gamma_bar,
    inv,
    inv_tong,
    morrey_to_tau,
    pos,
    ratio,
    rho_to_canonical,
)


class Status(str, Enum):
    YES = "yes"
    NO = "no"
    NOT_CHARACTERIZED = "not-characterized"


@dataclass(frozen=True)
class Verdict:
    compact: Status
    nuclear: Status
    threshold_compact: ExtScalar | None
    threshold_nuclear: ExtScalar | None
    lhs: Fraction
    on_boundary_compact: bool
    on_boundary_nuclear: bool
    citation: str
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "compact": self.compact.value,
            "nuclear": self.nuclear.value,
            "lhs": fmt(self.lhs),
            "threshold_compact": None if self.threshold_compact is None else fmt(self.threshold_compact),
            "threshold_nuclear": None if self.threshold_nuclear is None else fmt(self.threshold_nuclear),
            "on_boundary": {"compact": self.on_boundary_compact, "nuclear": self.on_boundary_nuclear},
            "citation": self.citation,
            "notes": list(self.notes),
        }


def _decide(lhs, thr) -> tuple[Status, bool]:
    if thr is None:
        return Status.NOT_CHARACTERIZED, False
    if lhs > thr:
        return Status.YES, False
    return Status.NO, lhs == thr


def _verdict(lhs, thr_c, thr_n, citation, notes=()) -> Verdict:
    c, bc = _decide(lhs, thr_c)
    n, bn = _decide(lhs, thr_n)
    return Verdict(c, n, thr_c, thr_n, lhs, bc, bn, citation, tuple(notes))


def _banach(*specs) -> bool:
    return all((x.p == INF or x.p >= 1) and (x.q == INF or x.q >= 1) for x in specs)


QUASI_BANACH_NOTE = "nuclearity is only characterized for p, q >= 1"


def _same_d(a, b):
    if a.d != b.d:
        raise ParameterError(f"dimension mismatch: d={a.d} vs d={b.d}")


def morrey_compact_threshold(u1, p1, u2, p2) -> Fraction:
    return inv(u1) - inv(u2) + pos(inv(u2) - inv(_scale(max_ratio(p2, p1), u1)))


def morrey_nuclear_threshold(u1, p1, u2, p2) -> Fraction:
    return inv(u1) - inv(u2) + inv_tong(u1, _scale(max_ratio(p1, p2), u2))


def max_ratio(a, b) -> ExtScalar:
    """``max(1, a/b)`` with the infinity conventions."""
    r = ratio(a, b)
    return r if r > 1 else Fraction(1)


def _scale(k: ExtScalar, x: ExtScalar) -> ExtScalar:
    if k == INF or x == INF:
        return INF
    return k * x


def classify_morrey(src: SpaceSpec, dst: SpaceSpec) -> Verdict:
    """Embedding between Morrey-type spaces (``N``, ``E`` and classical ``B``, ``F`` read as ``u = p``).

    The letters may differ: ``N_{u,p,min(p,q)} -> E_{u,p,q} -> N_{u,p,inf}``
    and both criteria ignore ``q``, so the verdict transfers.
    """
    _same_d(src, dst)
    u1, p1 = src.morrey_params()
    u2, p2 = dst.morrey_params()
    lhs = (src.s - dst.s) / src.d
    thr_c = morrey_compact_threshold(u1, p1, u2, p2)
    notes = []
    if _banach(src, dst):
        thr_n = morrey_nuclear_threshold(u1, p1, u2, p2)
    else:
        thr_n = None
        notes.append(QUASI_BANACH_NOTE)
    return _verdict(lhs, thr_c, thr_n, "Morrey compactness and nuclearity criteria", notes)


def classify_tau(src: SpaceSpec, dst: SpaceSpec) -> Verdict:
    """Embedding between tau-spaces (classical spaces read as ``tau = 0``)."""
    _same_d(src, dst)
    t1, p1 = src.tau_params()
    t2, p2 = dst.tau_params()
    lhs = (src.s - dst.s) / src.d
    thr_c = gamma(t1, t2, p1, p2)
    notes = []
    if _banach(src, dst):
        thr_n = gamma_bar(t1, t2, p1, p2)
    else:
        thr_n = None
        notes.append(QUASI_BANACH_NOTE)
    return _verdict(lhs, thr_c, thr_n, "tau-space compactness and nuclearity criteria", notes)


def same_tau_threshold(tau, p1, p2) -> Fraction:
    if p1 == INF or (p2 != INF and p1 >= p2):
        return 1 - inv(p2) + inv(p1)
    return 1 - min(Fraction(0), inv(p2) - min(tau, inv(p1)))


def classify_same_tau(src: SpaceSpec, dst: SpaceSpec) -> Verdict:
    """Embedding between tau-spaces sharing the same ``tau``."""
    _same_d(src, dst)
    t1, p1 = src.tau_params()
    t2, p2 = dst.tau_params()
    if t1 != t2:
        raise ParameterError(f"tau differs: {fmt(t1)} vs {fmt(t2)}")
    lhs = (src.s - dst.s) / src.d
    notes = []
    if _banach(src, dst):
        thr_n = same_tau_threshold(t1, p1, p2)
    else:
        thr_n = None
        notes.append(QUASI_BANACH_NOTE)
    return _verdict(lhs, gamma(t1, t2, p1, p2), thr_n, "equal-tau nuclearity criterion", notes)


def classify_seq(src: SeqSpec, dst: SeqSpec) -> Verdict:
    """Nuclearity of ``n^sigma1_{u1,p1,q1} -> n^sigma2_{u2,p2,q2}``; compactness is left open."""
    _same_d(src, dst)
    lhs = (src.sigma - dst.sigma) / src.d
    if _banach(src, dst):
        thr_n = morrey_nuclear_threshold(src.u, src.p, dst.u, dst.p)
        notes = ()
    else:
        thr_n, notes = None, (QUASI_BANACH_NOTE,)
    return _verdict(lhs, None, thr_n, "sequence-space nuclearity criterion", notes)


def classify_rho(src: SpaceSpec, dst: SpaceSpec) -> Verdict:
    """Embedding between rho-spaces with a shared ``rho``: the classical criteria with ``d`` replaced by ``|rho|``."""
    _same_d(src, dst)
    if not (src.family.is_rho and dst.family.is_rho):
        raise ParameterError("classify_rho needs two rho-spaces")
    if src.rho != dst.rho:
        raise ParameterError(f"rho differs: {fmt(src.rho)} vs {fmt(dst.rho)}")
    d, r = src.d, abs(src.rho)
    p1, p2 = src.p, dst.p
    lhs = (src.s - dst.s) / d
    thr_c = r * pos(inv(p1) - inv(p2)) / d
    notes = []
    if _banach(src, dst):
        thr_n = r * (1 - pos(inv(p2) - inv(p1))) / d
    else:
        thr_n = None
        notes.append(QUASI_BANACH_NOTE)
    return _verdict(lhs, thr_c, thr_n, "rho-space criteria (slope rule)", notes)


def classify_special_target(src: SpaceSpec, target) -> Verdict:
    """Embedding of a Morrey-type, tau- or rho-space into ``bmo``, ``L_inf`` or ``L_r``.

    ``target`` is a :class:`SpaceSpec` of family ``bmo``/``Linf``/``Lr`` or
    one of the strings ``"bmo"``, ``"Linf"``.  Compactness into ``L_r`` is
    reported as not characterized.
    """
    if isinstance(target, str):
        target = SpaceSpec(Family(target), src.d)
    if not target.family.is_target_only:
        raise ParameterError(f"{target.family.value} is not a special target")
    _same_d(src, target)
    if src.family.is_rho:
        src = rho_to_canonical(src, "lower")
    if src.family.is_target_only:
        raise ParameterError(f"unsupported source family {src.family.value}")
    lhs = src.s / src.d
    banach = _banach(src)
    notes = [] if banach else [QUASI_BANACH_NOTE]
    if src.family.is_tau:
        tau, p = src.tau_params()
    else:
        u, p = src.morrey_params()
    if target.family is Family.LR:
        r = target.p
        if not banach:
            thr_n = None
        elif src.family.is_tau:
            thr_n = gamma_bar(tau, 0, p, r)
        else:
            thr_n = 1 - pos(inv(r) - inv(u))
        notes.append("compactness into L_r is not characterized here")
        return _verdict(lhs, None, thr_n, "nuclearity into L_r", notes)
    if src.family.is_tau:
        thr_c = inv(p) - tau
        thr_n = 1 - pos(tau - inv(p)) if banach else None
    else:
        thr_c = inv(u)
        thr_n = Fraction(1) if banach else None
    return _verdict(lhs, thr_c, thr_n, "embeddings into bmo and L_inf", notes)


# ---------------------------------------------------------------- dispatch

def _as_tau(spec: SpaceSpec) -> SpaceSpec | None:
    if spec.family.is_tau or spec.family.is_classical:
        return spec
    try:
        return morrey_to_tau(spec)
    except DomainError:
        return None


def _as_morrey(spec: SpaceSpec) -> SpaceSpec | None:
    if spec.family.is_morrey or spec.family.is_classical:
        return spec
    tau, p = spec.tau_params()
    if tau == 0:
        fam = Family.BESOV if spec.family.letter == "B" else Family.TL
        return SpaceSpec(fam, spec.d, s=spec.s, p=p, q=spec.q)
    if tau > inv(p) or (tau == inv(p) and spec.q == INF):
        # the space is B^{s + d(tau - 1/p)}_{inf,inf}
        return SpaceSpec(Family.BESOV, spec.d, s=spec.s + spec.d * (tau - inv(p)), p=INF, q=INF)
    if tau < inv(p) and (spec.family is Family.TL_TAU or spec.q == INF):
        u = 1 / (inv(p) - tau)
        fam = Family.TL_MORREY if spec.family is Family.TL_TAU else Family.BESOV_MORREY
        return SpaceSpec(fam, spec.d, s=spec.s, p=p, u=u, q=spec.q)
    return None


def _unresolved(src, dst) -> Verdict:
    return Verdict(Status.NOT_CHARACTERIZED, Status.NOT_CHARACTERIZED, None, None,
                   (src.s - dst.s) / src.d, False, False, "no applicable criterion",
                   (f"no identity links {src.family.value} and {dst.family.value} at these parameters",))


def classify(src, dst) -> Verdict:
    """Route a pair of specs to the matching criterion."""
    if isinstance(src, SeqSpec) or isinstance(dst, SeqSpec):
        if not (isinstance(src, SeqSpec) and isinstance(dst, SeqSpec)):
            raise ParameterError("sequence spaces only embed into sequence spaces here")
        return classify_seq(src, dst)
    _same_d(src, dst)
    if src.family.is_target_only:
        raise ParameterError(f"{src.family.value} is only supported as a target")
    if dst.family.is_target_only:
        return classify_special_target(src, dst)
    if src.family.is_rho and dst.family.is_rho:
        return classify_rho(src, dst)
    if src.family.is_rho or dst.family.is_rho:
        # both readings of a rho-space give the same verdicts; try the Morrey reading first
        for form in ("lower", "upper"):
            a = rho_to_canonical(src, form) if src.family.is_rho else src
            b = rho_to_canonical(dst, form) if dst.family.is_rho else dst
            v = classify(a, b)
            if v.compact is not Status.NOT_CHARACTERIZED:
                return v
        return v
    if src.family.is_tau or dst.family.is_tau:
        a, b = _as_tau(src), _as_tau(dst)
        if a is not None and b is not None:
            return classify_tau(a, b)
        a, b = _as_morrey(src), _as_morrey(dst)
        if a is not None and b is not None:
            return classify_morrey(a, b)
        return _unresolved(src, dst)
    return classify_morrey(src, dst)
