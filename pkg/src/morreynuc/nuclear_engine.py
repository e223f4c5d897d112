"""Nuclear norms of diagonal maps and of the finite Morrey identities ``id_j``.

Upper bounds come as explicit representations ``T = sum_k a_k(.) y_k``
(:class:`NuclearCertificate`); lower bounds come from trace duality,
``nu(T) >= |trace(S T)| / ||S||`` (:class:`DualityBound`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import hadamard
from scipy.special import zeta

from .dyadic import CubeIndexSet
from .morrey_seq import (
    DESK_LIMIT,
    EXACT_LIMIT,
    _pair,
    dual_norm_upper,
    norm_m,
    op_norm_exact,
    op_norm_formula,
    pow2,
)
from .params import INF, ExtScalar, ParameterError, SeqSpec, ext, inv, inv_tong, pos, ratio, tong_number

NOT_NUCLEAR = "not-nuclear"
HADAMARD_FROM = 13
ENUMERATE_LIMIT = 4096


# ---------------------------------------------------------------- diagonal operators

@dataclass(frozen=True)
class GeometricSequence:
    """``tau_j = scale * ratio**j`` for ``j >= 1``."""

    scale: float
    ratio: float


@dataclass(frozen=True)
class PowerSequence:
    """``tau_j = scale * j**(-exponent)`` for ``j >= 1``."""

    scale: float
    exponent: float


def _exact_lp_power(tau, t: ExtScalar):
    # (sum |tau|^t, t) with exact arithmetic when t is an integer or infinite
    vals = [abs(Fraction(x)) for x in tau]
    if t == INF:
        return max(vals, default=Fraction(0)), INF
    if Fraction(t).denominator != 1:
        raise ParameterError(f"exact evaluation needs an integer exponent, got t={t}")
    return sum((v ** int(t) for v in vals), Fraction(0)), t


def tong_diag_nuclear(tau, r1, r2, n=None, *, exact: bool = False):
    """Nuclear norm of the diagonal map ``D_tau : l_r1 -> l_r2``, i.e. ``||tau||_t``.

    Finite ``tau`` (a sequence; ``n`` defaults to its length) gives the norm
    in ``l_t^n``.  With ``exact=True`` and rational entries the result is the
    pair ``(S, t)`` where the norm equals ``S**(1/t)`` (``S`` is the max when
    ``t = inf``).

    Infinite diagonals are given as :class:`GeometricSequence` or
    :class:`PowerSequence`; non-membership in ``l_t`` (or in ``c_0`` when
    ``t = inf``) returns :data:`NOT_NUCLEAR`.
    """
    t = tong_number(r1, r2)
    if isinstance(tau, (GeometricSequence, PowerSequence)):
        if n not in (None, INF):
            raise ParameterError("infinite diagonals take n = inf")
        return _tong_infinite(tau, t)
    tau = list(tau)
    if n is not None and n != len(tau):
        raise ParameterError(f"n = {n} but {len(tau)} entries given")
    if exact:
        return _exact_lp_power(tau, t)
    a = np.abs(np.asarray(tau, dtype=float))
    if t == INF:
        return float(a.max(initial=0.0))
    tf = float(t)
    return float(np.sum(a**tf) ** (1.0 / tf))


def _tong_infinite(seq, t: ExtScalar):
    if isinstance(seq, GeometricSequence):
        a, q = abs(seq.scale), abs(seq.ratio)
        if a == 0:
            return 0.0
        if q >= 1:
            return NOT_NUCLEAR
        if t == INF:
            return a * q
        tf = float(t)
        return a * q * (1.0 - q**tf) ** (-1.0 / tf)
    a, alpha = abs(seq.scale), seq.exponent
    if a == 0:
        return 0.0
    if t == INF:
        return a if alpha > 0 else NOT_NUCLEAR
    tf = float(t)
    if alpha * tf <= 1:
        return NOT_NUCLEAR
    return a * float(zeta(alpha * tf)) ** (1.0 / tf)


@dataclass
class NuclearCertificate:
    """A nuclear representation ``T = sum_k a_k(.) y_k`` with per-term norm bounds.

    ``functionals`` and ``vectors`` hold ``a_k`` and ``y_k`` row-wise, so the
    represented matrix is ``vectors.T @ functionals``.  Analytic certificates
    (too many terms to store) leave them ``None`` and record their evidence
    in ``detail``.
    """

    construction: str
    bound: float
    functionals: np.ndarray | None = None
    vectors: np.ndarray | None = None
    dual_bounds: np.ndarray | None = None
    norms: np.ndarray | None = None
    reconstruction_error: float | None = None
    detail: dict = field(default_factory=dict)

    @property
    def terms(self):
        if self.functionals is None:
            return []
        return list(zip(self.functionals, self.vectors, self.dual_bounds, self.norms))

    def matrix(self) -> np.ndarray:
        return self.vectors.T @ self.functionals


def _certificate(construction, functionals, vectors, dual_bounds, norms, target, **detail):
    functionals = np.asarray(functionals, dtype=float)
    vectors = np.asarray(vectors, dtype=float)
    dual_bounds = np.asarray(dual_bounds, dtype=float)
    norms = np.asarray(norms, dtype=float)
    err = float(np.abs(vectors.T @ functionals - target).max(initial=0.0))
    return NuclearCertificate(
        construction=construction,
        bound=float(np.sum(dual_bounds * norms)),
        functionals=functionals,
        vectors=vectors,
        dual_bounds=dual_bounds,
        norms=norms,
        reconstruction_error=err,
        detail=dict(detail),
    )


def rep_linf_to_l1(n: int) -> NuclearCertificate:
    """``id : l_inf^n -> l_1^n = sum_i e_i* (.) e_i``, bound ``n``."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    e = np.eye(n)
    return _certificate("coordinates", e, e, np.ones(n), np.ones(n), e)


def sign_family(n: int) -> tuple[np.ndarray, int]:
    """Rows ``h`` with ``sum_h h_i h_k = m * delta_ik``; returns ``(rows, m)``.

    All ``2^n`` sign vectors for small ``n``, otherwise the rows of a Sylvester
    Hadamard matrix of order ``m = 2^ceil(log2 n)`` truncated to ``n`` columns.
    """
    if n < HADAMARD_FROM:
        rows = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
        return rows, 1 << n
    m = 1 << (n - 1).bit_length()
    return hadamard(m).astype(float)[:, :n], m


def rep_l1_to_linf(n: int) -> NuclearCertificate:
    """``id : l_1^n -> l_inf^n = m^-1 sum_h h (.) h`` over a sign family, bound 1."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    rows, m = sign_family(n)
    k = len(rows)
    return _certificate("sign-family", rows / m, rows, np.full(k, 1.0 / m), np.ones(k), np.eye(n),
                        family_size=k)


def _lp_norm(v: np.ndarray, r: ExtScalar) -> float:
    if r == INF:
        return float(np.abs(v).max(initial=0.0))
    return float(np.sum(np.abs(v) ** float(r)) ** (1.0 / float(r)))


def _dual_exponent(r: ExtScalar) -> ExtScalar:
    if r == 1:
        return INF
    if r == INF:
        return Fraction(1)
    return r / (r - 1)


def rep_diag(tau, r1, r2) -> NuclearCertificate:
    """Representation of ``D_tau : l_r1^n -> l_r2^n`` whose bound is ``||tau||_t``.

    For ``r2 <= r1`` the coordinate representation; otherwise the sign family
    applied to the split ``tau = a * b`` with ``a = |tau|^{t/r1'}`` and
    ``b = sign(tau) |tau|^{t/r2}``.
    """
    r1, r2 = ext(r1), ext(r2)
    t = tong_number(r1, r2)
    tau = np.asarray(tau, dtype=float)
    n = len(tau)
    target = np.diag(tau)
    rc = _dual_exponent(r1)
    if t == 1:
        e = np.eye(n)
        return _certificate("coordinates", e, np.diag(tau), np.ones(n), np.abs(tau), target, t=t)
    mag = np.abs(tau)
    if t == INF:
        a = (mag > 0).astype(float)
        b = tau.copy()
    else:
        tf = float(t)
        a = mag ** (tf * float(inv(rc)))
        b = np.sign(tau) * mag ** (tf * float(inv(r2)))
    rows, m = sign_family(n)
    funcs = rows * a / m
    vecs = rows * b
    duals = np.array([_lp_norm(f, rc) for f in funcs])
    norms = np.array([_lp_norm(v, r2) for v in vecs])
    return _certificate("split-sign-family", funcs, vecs, duals, norms, target, t=t)


def diag_operator_norm(sigma, a, b) -> float:
    """Norm of ``diag(sigma) : l_a -> l_b``."""
    a, b = ext(a), ext(b)
    sigma = np.abs(np.asarray(sigma, dtype=float))
    if inv(a) >= inv(b):
        return float(sigma.max(initial=0.0))
    return _lp_norm(sigma, 1 / (inv(b) - inv(a)))


@dataclass
class DualityBound:
    """``lower_bound = |trace(S T)| / witness_norm`` for a witness ``S`` mapping back."""

    witness_operator: np.ndarray
    witness_norm: float
    trace_value: float
    lower_bound: float
    detail: dict = field(default_factory=dict)


def diag_duality_lower(tau, r1, r2, witness=None) -> DualityBound:
    """Trace-duality lower bound for ``D_tau : l_r1 -> l_r2`` with a diagonal witness.

    Without ``witness`` the Hoelder-dual diagonal is used, which makes the
    bound equal ``||tau||_t``.
    """
    r1, r2 = ext(r1), ext(r2)
    tau = np.asarray(tau, dtype=float)
    if witness is None:
        t = tong_number(r1, r2)
        mag = np.abs(tau)
        if t == INF:
            witness = np.zeros_like(tau)
            witness[int(np.argmax(mag))] = np.sign(tau[int(np.argmax(mag))]) or 1.0
        else:
            witness = np.sign(tau) * mag ** (float(t) - 1.0)
    witness = np.asarray(witness, dtype=float)
    wn = diag_operator_norm(witness, r2, r1)
    tr = float(np.dot(witness, tau))
    lower = abs(tr) / wn if wn > 0 else 0.0
    return DualityBound(np.diag(witness), wn, tr, lower)


# ---------------------------------------------------------------- the identities id_j

def nuclear_case(src, dst) -> str:
    """Which regime of the nuclear-norm formula ``(src, dst) = ((u1,p1),(u2,p2))`` falls in."""
    (u1, p1), (u2, p2) = _pair(*src), _pair(*dst)
    if u1 == INF:
        return "coordinates"
    if p1 <= p2 and u2 <= u1:
        return "coordinates"
    if p1 > p2 and ratio(p1, u1) <= ratio(p2, u2):
        return "coordinates"
    if p1 <= p2:
        return "signs"
    return "sandwich"


def nuclear_exponent(src, dst) -> Fraction:
    """``1 - (1/u1 - min(1, p2/p1)/u2)_+``; ``nu(id_j)`` is ``2^{jd * this}`` up to constants."""
    (u1, p1), (u2, p2) = _pair(*src), _pair(*dst)
    return 1 - pos(inv(u1) - min(Fraction(1), ratio(p2, p1)) * inv(u2))


def nuclear_formula_id_j(src, dst, j: int, d: int = 1) -> tuple[float, bool]:
    """Closed-form nuclear norm of ``id_j``, returned as ``(value, exact)``."""
    case = nuclear_case(src, dst)
    (u1, p1), (u2, p2) = _pair(*src), _pair(*dst)
    if case == "coordinates":
        return pow2(j * d), True
    if case == "signs":
        return pow2(j * d * (1 - inv(u1) + inv(u2))), True
    return pow2(j * d * (1 + p2 / (p1 * u2) - inv(u1))), False


def nu0(j: int, p2, u2, d: int = 1) -> int:
    """Smallest ``nu >= 0`` with ``2^{nu d} >= 2^{jd p2/u2}``, i.e. ``ceil(j p2/u2)``."""
    u2, p2 = _pair(u2, p2)
    value = math.ceil(j * ratio(p2, u2))
    assert 0 <= value <= j
    return value


def _reconstruction_rows(rows: np.ndarray, scale: float, n: int) -> float:
    return float(np.abs(scale * rows.T @ rows - np.eye(n)).max())


def epsilon_family_size(j: int, d: int, nu: int) -> int:
    blocks = 1 << ((j - nu) * d)
    return (2 << (nu * d)) ** blocks


def sample_epsilon(j: int, d: int, nu: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draws from the family of sign vectors with exactly one nonzero per ``Q_{-nu,.}`` cube."""
    labels = CubeIndexSet(j, d).block_labels(nu)
    members = [np.flatnonzero(labels == b) for b in range(1 << ((j - nu) * d))]
    table = np.stack(members)  # (blocks, 2^{nu d})
    pick = rng.integers(0, table.shape[1], size=(count, table.shape[0]))
    signs = rng.choice(np.array([-1.0, 1.0]), size=(count, table.shape[0]))
    out = np.zeros((count, 1 << (j * d)))
    rows = np.repeat(np.arange(count), table.shape[0])
    cols = table[np.arange(table.shape[0])[None, :], pick].ravel()
    out[rows, cols] = signs.ravel()
    return out


def enumerate_epsilon(j: int, d: int, nu: int) -> np.ndarray:
    labels = CubeIndexSet(j, d).block_labels(nu)
    blocks = [np.flatnonzero(labels == b) for b in range(1 << ((j - nu) * d))]
    choices = [[(k, s) for k in blk for s in (1.0, -1.0)] for blk in blocks]
    out = []
    for combo in itertools.product(*choices):
        v = np.zeros(1 << (j * d))
        for k, s in combo:
            v[k] = s
        out.append(v)
    return np.array(out)


def epsilon_mc_check(j: int, d: int, nu: int, vectors: np.ndarray, *, samples: int = 10_000,
                     seed: int = 0, sigmas: float = 3.0) -> dict:
    """Monte-Carlo test of ``E[eps(lam) eps] = 2^{-nu d} lam`` for each row ``lam`` of ``vectors``.

    Each ``lam`` is tested along two directions, ``lam`` itself and a fixed
    random unit vector, so the rule sees two z-scores per test vector.  The
    largest coordinatewise z-score is reported as well but not used: over
    ``2^{jd}`` coordinates it exceeds 3 by chance far too often.
    """
    rng = np.random.default_rng(seed)
    eps = sample_epsilon(j, d, nu, samples, rng)
    g = rng.standard_normal(eps.shape[1])
    g /= np.linalg.norm(g)
    worst, coord = 0.0, 0.0
    for lam in np.atleast_2d(vectors):
        proj = eps @ lam
        draws = proj[:, None] * eps
        expect = pow2(-nu * d) * lam
        coord = max(coord, _max_z(draws, expect, samples))
        dirs = np.stack([lam / (np.linalg.norm(lam) or 1.0), g])
        worst = max(worst, _max_z(draws @ dirs.T, dirs @ expect, samples))
    return {"samples": samples, "seed": seed, "worst_z": worst, "coordinate_z": coord,
            "passed": worst <= sigmas}


def _max_z(draws: np.ndarray, expect: np.ndarray, samples: int) -> float:
    dev = np.abs(draws.mean(axis=0) - expect)
    se = draws.std(axis=0, ddof=1) / math.sqrt(samples)
    z = np.where(se > 0, dev / np.where(se > 0, se, 1.0), np.where(dev > 1e-12, np.inf, 0.0))
    return float(z.max())


def _signs_certificate(src, dst, j, d):
    n = 1 << (j * d)
    rows, m = sign_family(n)
    # every row has the same absolute values, so one bound covers all terms
    dual = dual_norm_upper(rows[0], *src, d) / m
    norm = float(norm_m(rows[0], *dst, d))
    return _certificate("signs", rows / m, rows, np.full(len(rows), dual), np.full(len(rows), norm),
                        np.eye(n), family_size=len(rows))


def _epsilon_certificate(src, dst, j, d, seed, samples):
    (u1, p1), (u2, p2) = _pair(*src), _pair(*dst)
    n = 1 << (j * d)
    nu = nu0(j, p2, u2, d)
    rng = np.random.default_rng(seed)
    probe = sample_epsilon(j, d, nu, 1, rng)[0]
    dual = dual_norm_upper(probe, u1, p1, d)
    bound = pow2(nu * d) * dual
    detail = {"nu0": nu, "family_size": epsilon_family_size(j, d, nu),
              "dual_bound": dual, "target_norm": float(norm_m(probe, u2, p2, d))}
    if detail["family_size"] <= ENUMERATE_LIMIT:
        fam = enumerate_epsilon(j, d, nu)
        scale = pow2(nu * d) / len(fam)
        detail["reconstruction"] = "enumerated"
        return _certificate("epsilon-family", fam * scale, fam, np.full(len(fam), dual * scale),
                            np.ones(len(fam)), np.eye(n), **detail)
    test = np.random.default_rng(seed + 1).standard_normal((5, n))
    detail["reconstruction"] = "monte-carlo"
    detail["mc"] = epsilon_mc_check(j, d, nu, test, samples=samples, seed=seed)
    return NuclearCertificate("epsilon-family", bound, detail=detail)


def _hadamard_xor_certificate(src, dst, j, d, y):
    """Symmetrised representation built from one vector ``y``.

    ``a`` norms ``y`` in the source on its worst cube, so ``||a||_* <= 1`` and
    ``<a, y> = ||y||_src``.  Averaging ``(h o T_t a) (x) (h o T_t y)`` over
    Hadamard rows ``h`` and dyadic translations ``t`` (XOR on indices)
    reproduces ``n <a, y> id``; the bound is ``n ||y||_dst / ||y||_src``.
    """
    (u1, p1) = _pair(*src)
    n = 1 << (j * d)
    a = _norming_functional(y, u1, p1, j, d)
    ay = float(a @ y)
    idx = np.arange(n)
    h = hadamard(n).astype(float)
    shifts_a = np.stack([a[idx ^ t] for t in range(n)])
    shifts_y = np.stack([y[idx ^ t] for t in range(n)])
    funcs = (h[:, None, :] * shifts_a[None, :, :]).reshape(n * n, n) / (n * ay)
    vecs = (h[:, None, :] * shifts_y[None, :, :]).reshape(n * n, n)
    dual = 1.0 / (n * ay)
    norm = float(norm_m(y, *dst, d))
    return _certificate("symmetric", funcs, vecs, np.full(n * n, dual), np.full(n * n, norm),
                        np.eye(n), source_norm=ay)


def _norming_functional(y, u, p, j, d) -> np.ndarray:
    n = len(y)
    if u == INF:
        k = int(np.argmax(np.abs(y)))
        a = np.zeros(n)
        a[k] = np.sign(y[k]) or 1.0
        return a
    best, pick = -1.0, None
    idx = CubeIndexSet(j, d)
    for nu in range(j + 1):
        labels = idx.block_labels(nu)
        w = pow2(nu * d * (inv(u) - inv(p)))
        for b in range(1 << ((j - nu) * d)):
            mask = labels == b
            val = w * _lp_norm(y[mask], p)
            if val > best:
                best, pick = val, (mask, w)
    mask, w = pick
    a = np.zeros(n)
    local = _lp_norm(y[mask], p)
    if p == 1:
        a[mask] = w * np.sign(y[mask])
    else:
        a[mask] = w * np.sign(y[mask]) * (np.abs(y[mask]) / local) ** (float(p) - 1.0)
    return a


def _reverse_extremal(src, dst, j, d):
    n = 1 << (j * d)
    try:
        return op_norm_exact(dst, src, j, d, return_vector=True)
    except ParameterError:
        return None


def nuclear_upper_id_j(src, dst, j: int, d: int = 1, *, construction: str = "proof",
                       seed: int = 0, samples: int = 10_000) -> NuclearCertificate:
    """Upper-bound certificate for the nuclear norm of ``id_j``.

    ``construction="proof"`` picks coordinates, the sign family, or the
    epsilon family by case.  ``"symmetric"`` symmetrises a maximiser of the
    reverse identity and is tight whenever that maximiser is available.
    ``"best"`` returns the smaller of the two.
    """
    n = 1 << (j * d)
    if n > DESK_LIMIT:
        raise ParameterError(f"certificates limited to 2^(jd) <= {DESK_LIMIT}, got {n}")
    if construction == "best":
        first = nuclear_upper_id_j(src, dst, j, d, construction="proof", seed=seed, samples=samples)
        if n > 64:
            return first
        second = nuclear_upper_id_j(src, dst, j, d, construction="symmetric")
        return second if second.bound < first.bound else first
    if construction == "symmetric":
        if n > 64:
            raise ParameterError("the symmetric construction is limited to 2^(jd) <= 64")
        found = _reverse_extremal(src, dst, j, d)
        if found is None:
            raise ParameterError("no exact reverse maximiser at this size")
        return _hadamard_xor_certificate(src, dst, j, d, found[1])
    if construction != "proof":
        raise ParameterError(f"unknown construction {construction!r}")
    case = nuclear_case(src, dst)
    if case == "coordinates":
        cert = rep_linf_to_l1(n)
        cert.construction = "coordinates"
        return cert
    if case == "signs":
        return _signs_certificate(src, dst, j, d)
    return _epsilon_certificate(src, dst, j, d, seed, samples)


def nuclear_lower_id_j(src, dst, j: int, d: int = 1) -> DualityBound:
    """Trace duality with the reverse identity ``m_dst -> m_src`` as witness.

    The witness norm is exact where a closed form or the polymatroid search
    applies, otherwise the closed-form upper estimate, which keeps the bound valid.
    """
    n = 1 << (j * d)
    value, exact = op_norm_formula(dst, src, j, d)
    how = "formula"
    if not exact and n <= EXACT_LIMIT:
        value, how = op_norm_exact(dst, src, j, d), "exact-search"
    return DualityBound(np.eye(n), value, float(n), n / value, {"witness_norm_from": how})


# ---------------------------------------------------------------- infinite embedding

@dataclass(frozen=True)
class LevelSum:
    total: float
    ratio: float
    partials: tuple[float, ...]

    @property
    def geometric_limit(self) -> float:
        return 1.0 / (1.0 - self.ratio) if self.ratio < 1 else INF


def level_sum_bound(src: SeqSpec, dst: SeqSpec, J: int) -> LevelSum:
    """Partial sum over ``j <= J`` of the per-level nuclear-norm bounds for ``n^s1 -> n^s2``.

    Summand ``2^{-j delta + jd(1 - (1/u1 - min(1, p2/p1)/u2)_+)}`` with
    ``delta = sigma1 - sigma2 - d/u1 + d/u2``; ``ratio`` is the common ratio.
    """
    if src.d != dst.d:
        raise ParameterError("dimension mismatch")
    if J < 0:
        raise ParameterError("J must be >= 0")
    d = src.d
    delta = src.sigma - dst.sigma - d * inv(src.u) + d * inv(dst.u)
    expo = -delta + d * nuclear_exponent((src.u, src.p), (dst.u, dst.p))
    q = pow2(expo)
    partials, acc = [], 0.0
    for j in range(J + 1):
        acc += pow2(j * expo)
        partials.append(acc)
    return LevelSum(acc, q, tuple(partials))


def seq_nuclear_margin(src: SeqSpec, dst: SeqSpec) -> Fraction:
    """How far ``(sigma1 - sigma2)/d`` exceeds the nuclearity threshold."""
    d = src.d
    thr = inv(src.u) - inv(dst.u) + inv_tong(src.u, max(Fraction(1), ratio(src.p, dst.p)) * dst.u
                                             if dst.u != INF else INF)
    return (src.sigma - dst.sigma) / d - thr
