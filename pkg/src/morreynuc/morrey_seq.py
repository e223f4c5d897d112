"""Finite Morrey sequence spaces ``m^{2^{jd}}_{u,p}`` on the unit cubes of ``Q_{-j,0}``.

Coefficient vectors are indexed by ``K_j`` in lexicographic order, so a vector
for ``(j, d)`` is a flat array of length ``2^{jd}``.  Leading axes are treated
as a batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .dyadic import CubeIndexSet
from .params import INF, ExtScalar, ParameterError, ext, inv

TOL_CERT = 1e-9
TOL_COINCIDE = 1e-12
DESK_LIMIT = 256
EXACT_LIMIT = 16


def pow2(exponent) -> float:
    """``2**exponent`` for an exact rational exponent."""
    e = Fraction(exponent)
    if e.denominator == 1:
        return float(2 ** e.numerator) if e >= 0 else 1.0 / float(2 ** -e.numerator)
    return 2.0 ** float(e)


def _pair(u, p) -> tuple[ExtScalar, ExtScalar]:
    u, p = ext(u), ext(p)
    if not (p == INF or p >= 1):
        raise ParameterError(f"need p >= 1, got p={p}")
    if not (u == INF or (p != INF and p <= u)):
        raise ParameterError(f"need p <= u, got u={u}, p={p}")
    if u == INF:
        # m_{inf,p} is l_inf for every p
        return INF, INF
    return u, p


def _level_count(n: int, d: int) -> int:
    j, rem = divmod(n.bit_length() - 1, d)
    if n < 1 or n & (n - 1) or rem:
        raise ParameterError(f"length {n} is not 2^(j*{d})")
    return j


def block_sums(a: np.ndarray, j: int, d: int, nu: int) -> np.ndarray:
    """Sums of ``a`` over the ``Q_{-nu,.}`` cubes, lexicographic, batched on leading axes."""
    batch = a.shape[:-1]
    side, coarse = 1 << j, 1 << (j - nu)
    shape = batch + sum(((coarse, 1 << nu) for _ in range(d)), ())
    t = a.reshape(batch + (side,) * d).reshape(shape)
    fine_axes = tuple(len(batch) + 2 * i + 1 for i in range(d))
    return t.sum(axis=fine_axes).reshape(batch + (coarse**d,))


def block_max(a: np.ndarray, j: int, d: int, nu: int) -> np.ndarray:
    batch = a.shape[:-1]
    side, coarse = 1 << j, 1 << (j - nu)
    shape = batch + sum(((coarse, 1 << nu) for _ in range(d)), ())
    t = a.reshape(batch + (side,) * d).reshape(shape)
    fine_axes = tuple(len(batch) + 2 * i + 1 for i in range(d))
    return t.max(axis=fine_axes).reshape(batch + (coarse**d,))


def norm_m(coeffs, u, p, d: int = 1):
    """Norm in ``m^{2^{jd}}_{u,p}``; ``j`` is read off the trailing length.

    Supremum over all dyadic ``Q_{-nu,m}`` inside ``Q_{-j,0}`` of
    ``|Q|^{1/u - 1/p} * ||coeffs restricted to Q||_p``.
    """
    a = np.abs(np.asarray(coeffs, dtype=float))
    if a.ndim == 0:
        raise ParameterError("coefficients must be an array")
    u, p = _pair(u, p)
    j = _level_count(a.shape[-1], d)
    if p == INF:
        return a.max(axis=-1)
    pf = float(p)
    # rescale so large coefficients do not overflow |x|^p
    scale = a.max(axis=-1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    b = (a / safe) ** pf
    best = np.zeros(a.shape[:-1])
    for nu in range(j + 1):
        w = pow2(nu * d * (inv(u) - inv(p)))
        vals = w * block_sums(b, j, d, nu) ** (1.0 / pf)
        best = np.maximum(best, vals.max(axis=-1))
    out = best * safe[..., 0]
    return float(out) if out.ndim == 0 else out


def level_norm(coeffs, u, p, d: int = 1):
    """Norm of one level in ``m^{(j)}_{u,p}``; the same quantity as :func:`norm_m`."""
    return norm_m(coeffs, u, p, d)


def norm_truncated(levels, sigma, u, p, q, d: int = 1) -> float:
    """Norm of a finitely supported element of ``n^sigma_{u,p,q}(Q)``.

    ``levels`` is either a sequence (entry ``j`` holds level ``j``, length
    ``2^{jd}``) or a mapping ``{j: coefficients}``; absent levels are zero.
    """
    sigma, q = Fraction(ext(sigma)), ext(q)
    u, p = _pair(u, p)
    items = levels.items() if isinstance(levels, Mapping) else enumerate(levels)
    terms = []
    for j, c in items:
        c = np.asarray(c, dtype=float)
        if c.shape[-1] != 1 << (j * d):
            raise ParameterError(f"level {j} needs {1 << (j * d)} coefficients, got {c.shape[-1]}")
        terms.append(pow2(j * (sigma - d * inv(u))) * norm_m(c, u, p, d))
    if not terms:
        return 0.0
    t = np.array(terms, dtype=float)
    if q == INF:
        return float(t.max())
    return float(np.sum(t ** float(q)) ** (1.0 / float(q)))


@dataclass(frozen=True)
class MorreyVector:
    coeffs: np.ndarray
    u: ExtScalar
    p: ExtScalar
    d: int = 1

    @property
    def j(self) -> int:
        return _level_count(len(self.coeffs), self.d)

    def norm(self) -> float:
        return norm_m(self.coeffs, self.u, self.p, self.d)


# ---------------------------------------------------------------- operator norms

def _case(src, dst):
    (u1, p1), (u2, p2) = _pair(*src), _pair(*dst)
    if u1 == INF:
        return "inf-source", (u1, p1, u2, p2)
    if u2 == INF:
        return "inf-target", (u1, p1, u2, p2)
    if p1 >= p2 and u2 >= u1:
        return "bigger-target", (u1, p1, u2, p2)
    if p1 < p2 and p2 / u2 <= p1 / u1:
        return "flat-target", (u1, p1, u2, p2)
    if p1 >= p2:
        return "smaller-u", (u1, p1, u2, p2)
    return "sandwich", (u1, p1, u2, p2)


def op_norm_formula(src, dst, j: int, d: int = 1) -> tuple[float, bool]:
    """Closed-form norm of ``id_j : m_{u1,p1} -> m_{u2,p2}``; ``src = (u1, p1)``.

    Returns ``(value, exact)``.  In the one inexact case the value is the
    upper end of a two-sided estimate that holds up to a j-independent factor.
    """
    case, (u1, p1, u2, p2) = _case(src, dst)
    if case == "inf-source":
        return pow2(j * d * inv(u2)), True
    if case in ("inf-target", "bigger-target", "flat-target"):
        return 1.0, True
    if case == "smaller-u":
        return pow2(j * d * (inv(u2) - inv(u1))), True
    return pow2(j * d * (inv(u2) - p1 / (u1 * p2))), False


def op_norm_case(src, dst) -> str:
    return _case(src, dst)[0]


@lru_cache(maxsize=64)
def _laminar_rank(mu: int, d: int, expo: Fraction) -> np.ndarray:
    """Rank function of ``{y >= 0 : y(R) <= |R|^expo for every dyadic R}`` on all subsets.

    Entry ``S`` (a bitmask over the ``2^{mu d}`` unit cubes) is the largest
    total ``y(S)`` the constraints allow.  Laminar constraints make this a
    polymatroid.
    """
    n = 1 << (mu * d)
    masks = np.arange(1 << n, dtype=np.int64)
    # level 0: unit cubes with capacity 1
    f = np.stack([((masks >> k) & 1).astype(float) for k in range(n)])
    idx = CubeIndexSet(mu, d)
    for nu in range(1, mu + 1):
        labels = idx.block_labels(nu)
        prev = idx.block_labels(nu - 1)
        nblocks = 1 << ((mu - nu) * d)
        child_of = np.zeros(len(f), dtype=np.int64)
        child_of[prev] = labels
        g = np.zeros((nblocks, len(masks)))
        np.add.at(g, child_of, f)
        f = np.minimum(g, pow2(nu * d * expo))
    return f[0]


def _best_greedy_vertex(rank: np.ndarray, n: int, r: float):
    """Maximise ``sum y_k^r`` (r > 1) over the polymatroid with this rank function.

    A convex objective peaks at a vertex, and the vertices are the greedy
    vectors of orderings; dynamic programming over subsets finds the best one.
    """
    size = 1 << n
    best = np.full(size, -1.0)
    arg = np.full(size, -1, dtype=np.int64)
    best[0] = 0.0
    for s in range(1, size):
        fs = rank[s]
        top, pick = -1.0, -1
        bits = s
        while bits:
            low = bits & -bits
            k = low.bit_length() - 1
            rest = s ^ low
            val = best[rest] + (fs - rank[rest]) ** r
            if val > top:
                top, pick = val, k
            bits ^= low
        best[s], arg[s] = top, pick
    y = np.zeros(n)
    s = size - 1
    while s:
        k = arg[s]
        rest = s ^ (1 << k)
        y[k] = rank[s] - rank[rest]
        s = rest
    return best[size - 1], y


def op_norm_exact(src, dst, j: int, d: int = 1, *, return_vector: bool = False):
    """Exact norm of ``id_j`` including the inexact-formula case.

    Closed forms are used where they are exact.  When ``p1 < p2`` the
    substitution ``y = |x|^{p1}`` turns the source ball into a laminar
    polymatroid and the target norm into a convex function of ``y``; the
    maximum is found by the subset recursion in :func:`_best_greedy_vertex`.
    The restriction to one target cube of level ``mu`` reduces to the same
    problem with ``j = mu``, and the answer is the best ``mu``.
    Feasible for ``2^{jd} <= 16``.
    """
    case, (u1, p1, u2, p2) = _case(src, dst)
    n = 1 << (j * d)
    if case != "sandwich" and not (case == "flat-target" and n <= EXACT_LIMIT):
        value, _ = op_norm_formula(src, dst, j, d)
        if not return_vector:
            return value
        return value, _formula_extremal(case, n)
    if n > EXACT_LIMIT:
        raise ParameterError(f"exact operator norm needs 2^(jd) <= {EXACT_LIMIT}, got {n}")
    r = float(p2 / p1)
    expo = 1 - p1 / u1
    best_val, best_x = -1.0, None
    for mu in range(j + 1):
        m = 1 << (mu * d)
        total, y = _best_greedy_vertex(_laminar_rank(mu, d, expo), m, r)
        val = pow2(mu * d * (inv(u2) - inv(p2))) * total ** (1.0 / float(p2))
        if val > best_val:
            best_val = val
            x = np.zeros(n)
            # embed in the first level-mu cube
            x[_first_cube_positions(j, d, mu)] = y ** (1.0 / float(p1))
            best_x = x
    if return_vector:
        return best_val, best_x
    return best_val


def _first_cube_positions(j: int, d: int, mu: int) -> np.ndarray:
    labels = CubeIndexSet(j, d).block_labels(mu)
    return np.flatnonzero(labels == 0)


def _formula_extremal(case: str, n: int) -> np.ndarray:
    v = np.zeros(n)
    if case in ("inf-source", "smaller-u"):
        v[:] = 1.0
    else:
        v[0] = 1.0
    return v


def candidate_vectors(j: int, d: int = 1) -> dict[str, np.ndarray]:
    """Structured test vectors suggested by the extremal patterns.

    spikes, all-ones, one unit entry per ``Q_{-nu,.}`` cube, and the indicator
    of a single ``Q_{-nu,.}`` cube, for every ``0 <= nu <= j``.
    """
    n = 1 << (j * d)
    idx = CubeIndexSet(j, d)
    out = {f"spike[{k}]": np.eye(n)[k] for k in range(n)}
    out["ones"] = np.ones(n)
    for nu in range(j + 1):
        labels = idx.block_labels(nu)
        spread = np.zeros(n)
        _, first = np.unique(labels, return_index=True)
        spread[first] = 1.0
        out[f"spread[{nu}]"] = spread
        out[f"block[{nu}]"] = (labels == 0).astype(float)
    return out


def random_vectors(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Mixed random families: gaussian, sparse, heavy-tailed and block-structured."""
    k = count // 4
    rest = count - 3 * k
    gauss = rng.standard_normal((k, n))
    sparse = rng.standard_normal((k, n)) * (rng.random((k, n)) < 0.25)
    heavy = rng.standard_cauchy((k, n))
    geo = rng.random((rest, n)) ** rng.uniform(1, 8, size=(rest, 1))
    out = np.concatenate([gauss, sparse, heavy, geo])
    out[~np.any(out, axis=1), 0] = 1.0
    return out


def _ratios(vectors: np.ndarray, src, dst, d: int) -> np.ndarray:
    return norm_m(vectors, *dst, d) / norm_m(vectors, *src, d)


def op_norm_lower_oracle(src, dst, j: int, d: int = 1, candidates=None, *,
                         samples: int = 0, seed: int = 0, detail: bool = False):
    """Certified lower bound on ``||id_j||`` from explicit test vectors.

    Uses :func:`candidate_vectors`, any extra ``candidates``, the exact
    maximiser when the polymatroid search applies, and ``samples`` seeded
    random vectors.  With ``detail=True`` returns ``(value, name)``.
    """
    n = 1 << (j * d)
    if n > DESK_LIMIT:
        raise ParameterError(f"oracle limited to 2^(jd) <= {DESK_LIMIT}, got {n}")
    pool = candidate_vectors(j, d)
    if candidates is not None:
        extra = candidates.items() if isinstance(candidates, Mapping) else enumerate(candidates)
        pool.update({f"user[{i}]": np.asarray(v, dtype=float) for i, v in extra})
    if op_norm_case(src, dst) in ("sandwich", "flat-target") and n <= EXACT_LIMIT:
        pool["greedy-vertex"] = op_norm_exact(src, dst, j, d, return_vector=True)[1]
    names = list(pool)
    vals = _ratios(np.stack([pool[k] for k in names]), src, dst, d)
    i = int(np.argmax(vals))
    best, name = float(vals[i]), names[i]
    if samples:
        sampled = _ratios(random_vectors(n, samples, np.random.default_rng(seed)), src, dst, d)
        k = int(np.argmax(sampled))
        if sampled[k] > best:
            best, name = float(sampled[k]), f"random[{k}]"
    return (best, name) if detail else best


def sampled_ratio_max(src, dst, j: int, d: int = 1, *, samples: int = 10_000, seed: int = 0) -> float:
    n = 1 << (j * d)
    return float(_ratios(random_vectors(n, samples, np.random.default_rng(seed)), src, dst, d).max())


# ---------------------------------------------------------------- dual norms

def _conj(p: ExtScalar) -> ExtScalar:
    if p == INF:
        return Fraction(1)
    if p == 1:
        return INF
    return p / (p - 1)


def _lp(v: np.ndarray, r: ExtScalar) -> float:
    if r == INF:
        return float(np.abs(v).max(initial=0.0))
    return float(np.sum(np.abs(v) ** float(r)) ** (1.0 / float(r)))


def dual_norm_upper(v, u, p, d: int = 1) -> float:
    """``min(||v||_1, 2^{jd(1/p - 1/u)} ||v||_{p'})``, an upper bound for the dual norm.

    ``||w||_inf <= ||w||_m`` gives the first term; the root cube gives
    ``||w||_p <= 2^{jd(1/p - 1/u)} ||w||_m`` and Hoelder the second.
    """
    v = np.asarray(v, dtype=float)
    u, p = _pair(u, p)
    j = _level_count(len(v), d)
    first = _lp(v, Fraction(1))
    if p == INF:
        return first
    return min(first, pow2(j * d * (inv(p) - inv(u))) * _lp(v, _conj(p)))


def dual_norm_lower(v, u, p, d: int = 1, *, samples: int = 2000, seed: int = 0,
                    candidates: Sequence | None = None) -> float:
    """Lower bound for the dual norm: ``max |<v, w>| / ||w||_m`` over test vectors ``w``."""
    v = np.asarray(v, dtype=float)
    u, p = _pair(u, p)
    n = len(v)
    j = _level_count(n, d)
    if n > DESK_LIMIT:
        raise ParameterError(f"dual oracle limited to 2^(jd) <= {DESK_LIMIT}")
    if not np.any(v):
        return 0.0
    pool = list(candidate_vectors(j, d).values())
    pool.append(np.sign(v))
    if p != INF:
        pc = _conj(p)
        pool.append(np.sign(v) * np.abs(v) ** (0.0 if pc == INF else float(pc) - 1.0))
    for nu in range(j + 1):
        labels = CubeIndexSet(j, d).block_labels(nu)
        for b in np.unique(labels):
            pool.append(np.where(labels == b, np.sign(v), 0.0))
    if candidates is not None:
        pool.extend(np.asarray(c, dtype=float) for c in candidates)
    w = np.stack(pool)
    if samples:
        rng = np.random.default_rng(seed)
        w = np.concatenate([w, random_vectors(n, samples, rng)])
    w = w[np.any(w != 0, axis=1)]
    vals = np.abs(w @ v) / norm_m(w, u, p, d)
    return float(vals.max())
