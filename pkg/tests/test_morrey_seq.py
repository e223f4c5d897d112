import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize

from morreynuc.dyadic import CubeIndexSet, DyadicCube, contains, subcubes
from morreynuc.morrey_seq import (
    TOL_CERT,
    TOL_COINCIDE,
    candidate_vectors,
    dual_norm_lower,
    dual_norm_upper,
    norm_m,
    norm_truncated,
    op_norm_case,
    op_norm_exact,
    op_norm_formula,
    op_norm_lower_oracle,
    sampled_ratio_max,
)
from morreynuc.params import INF, ParameterError

GRID = [F(1), F(3, 2), F(2), F(4), INF]
PAIRS = [(u, p) for u in GRID for p in GRID if u != INF and p <= u] + [(INF, INF)]


def brute_norm(x, u, p, d=1):
    """Supremum over every dyadic subcube, found by explicit containment tests."""
    n = len(x)
    j = round(math.log2(n) / d)
    idx = CubeIndexSet(j, d)
    members = idx.members()
    best = 0.0
    for nu in range(j + 1):
        for q in subcubes(idx.root, -nu):
            local = [abs(x[i]) for i, k in enumerate(members) if contains(q, DyadicCube(0, k))]
            if p == INF:
                lp = max(local)
            else:
                lp = sum(t ** float(p) for t in local) ** (1 / float(p))
            w = 2.0 ** (nu * d * (float(1 / u if u != INF else 0) - float(1 / p if p != INF else 0)))
            best = max(best, w * lp)
    return best


def test_spike_has_norm_one():
    for (u, p), j, d in itertools.product(PAIRS, (0, 1, 2), (1, 2)):
        n = 1 << (j * d)
        for k in range(n):
            assert norm_m(np.eye(n)[k], u, p, d) == pytest.approx(1.0, abs=1e-15)


def test_all_ones_example():
    assert norm_m(np.ones(4), 2, 1) == pytest.approx(2.0)
    assert brute_norm(np.ones(4), F(2), F(1)) == pytest.approx(2.0)


@settings(max_examples=60)
@given(st.sampled_from(PAIRS), st.integers(0, 3), st.integers(1, 2), st.data())
def test_norm_matches_brute_force(pair, j, d, data):
    if j * d > 4:
        return
    n = 1 << (j * d)
    # keep clear of underflow in the naive p-th powers of the reference
    finite = st.floats(-10, 10, allow_nan=False).map(lambda v: 0.0 if abs(v) < 1e-100 else v)
    x = data.draw(arrays(float, n, elements=finite))
    u, p = pair
    uu, pp = (INF, INF) if u == INF else (u, p)
    assert norm_m(x, u, p, d) == pytest.approx(brute_norm(x, uu, pp, d), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("p", [F(1), F(3, 2), F(2), F(4), INF])
def test_coincidence_with_lp(p):
    rng = np.random.default_rng(7)
    x = rng.standard_normal((1000, 16))
    ref = np.abs(x).max(axis=1) if p == INF else np.linalg.norm(x, ord=float(p), axis=1)
    assert np.max(np.abs(norm_m(x, p, p) - ref) / ref) <= TOL_COINCIDE


@pytest.mark.parametrize("p", [F(1), F(2), F(4), INF])
def test_coincidence_with_linf(p):
    rng = np.random.default_rng(8)
    x = rng.standard_normal((1000, 8))
    assert np.array_equal(norm_m(x, INF, p), np.abs(x).max(axis=1))


def test_zero_and_errors():
    assert norm_m(np.zeros(8), 2, 1) == 0.0
    with pytest.raises(ParameterError):
        norm_m(np.ones(3), 2, 1)
    with pytest.raises(ParameterError):
        norm_m(np.ones(4), 1, 2)


def test_large_entries_do_not_overflow():
    assert norm_m(np.full(4, 1e200), 4, 4) == pytest.approx(1e200 * 4 ** 0.25)


banach_pairs = st.sampled_from([pp for pp in PAIRS if pp[1] >= 1])


@given(banach_pairs, st.integers(0, 3), st.data())
def test_triangle_and_homogeneity(pair, j, data):
    n = 1 << j
    vec = arrays(float, n, elements=st.floats(-1e3, 1e3, allow_nan=False))
    x, y = data.draw(vec), data.draw(vec)
    c = data.draw(st.floats(-50, 50, allow_nan=False))
    nx, ny = norm_m(x, *pair), norm_m(y, *pair)
    assert norm_m(x + y, *pair) <= nx + ny + 1e-9 * (nx + ny + 1)
    assert norm_m(c * x, *pair) == pytest.approx(abs(c) * nx, rel=1e-12, abs=1e-300)


@given(st.sampled_from(PAIRS), st.integers(0, 3), st.data())
def test_monotone_under_domination(pair, j, data):
    n = 1 << j
    x = data.draw(arrays(float, n, elements=st.floats(-100, 100, allow_nan=False)))
    extra = data.draw(arrays(float, n, elements=st.floats(0, 100, allow_nan=False)))
    y = np.sign(x + (x == 0)) * (np.abs(x) + extra)
    assert norm_m(x, *pair) <= norm_m(y, *pair) * (1 + 1e-12)


def test_truncated_single_level():
    rng = np.random.default_rng(3)
    for (u, p), j in itertools.product(PAIRS, (0, 1, 2, 3)):
        x = rng.standard_normal(1 << j)
        sigma = 0 if u == INF else 1 / u
        got = norm_truncated({j: x}, sigma, u, p, 2)
        assert got == pytest.approx(norm_m(x, u, p), rel=1e-12)


def test_truncated_classical_reduction():
    rng = np.random.default_rng(4)
    levels = [rng.standard_normal(1 << j) for j in range(4)]
    sigma, p, q = F(3, 2), F(2), F(3)
    weights = [2.0 ** (j * float(sigma - 1 / p)) * np.linalg.norm(c, 2) for j, c in enumerate(levels)]
    ref = sum(w ** 3 for w in weights) ** (1 / 3)
    assert norm_truncated(levels, sigma, p, p, q) == pytest.approx(ref, rel=1e-12)
    assert norm_truncated({}, sigma, p, p, q) == 0.0
    assert norm_truncated([np.zeros(1), np.zeros(2)], sigma, p, p, INF) == 0.0


def test_op_norm_formula_examples():
    assert op_norm_formula((2, 2), (4, 1), 2) == (1.0, True)
    assert op_norm_formula((INF, INF), (2, 1), 2) == (pytest.approx(2.0), True)
    value, exact = op_norm_formula((2, 1), (2, 2), 3)
    assert not exact
    assert value == pytest.approx(2 ** (3 * (1 / 2 - 1 / 4)))


def test_oracle_examples():
    for src, dst in itertools.product(PAIRS, PAIRS):
        assert op_norm_lower_oracle(src, dst, 2) >= 1.0
    # p1 >= p2, u2 < u1: all-ones gives 2^{jd(1/u2 - 1/u1)}
    src, dst, j = (F(4), F(2)), (F(2), F(1)), 3
    ones = candidate_vectors(j)["ones"]
    assert norm_m(ones, *dst) / norm_m(ones, *src) == pytest.approx(2 ** (j * (1 / 2 - 1 / 4)))


@pytest.mark.parametrize("src,dst", list(itertools.product(PAIRS, PAIRS)))
def test_exact_cases_attained_and_never_exceeded(src, dst):
    for j in (1, 2, 3):
        value, exact = op_norm_formula(src, dst, j)
        if not exact:
            continue
        lower = op_norm_lower_oracle(src, dst, j)
        assert abs(lower - value) <= TOL_CERT * max(1.0, value)
        assert sampled_ratio_max(src, dst, j, samples=2000, seed=j) <= value * (1 + TOL_CERT)


def _grid_search(src, dst, n, steps):
    """Dense grid over nonnegative directions, then Nelder-Mead from the best nodes."""
    t = np.linspace(0, 1, steps + 1)
    tail = np.array(list(itertools.product(t, repeat=n - 1))).reshape(-1, n - 1)
    x = np.hstack([np.ones((len(tail), 1)), tail])
    x = np.concatenate([np.roll(x, s, axis=1) for s in range(n)])
    r = norm_m(x, *dst) / norm_m(x, *src)
    best = float(r.max())
    f = lambda z: -norm_m(np.abs(z), *dst) / norm_m(np.abs(z), *src)
    for i in np.argsort(r)[-5:]:
        res = minimize(f, x[i], method="Nelder-Mead",
                       options={"maxiter": 5000, "xatol": 1e-12, "fatol": 1e-14})
        best = max(best, -res.fun)
    return best


SANDWICH = [(s, t) for s, t in itertools.product(PAIRS, PAIRS) if op_norm_case(s, t) == "sandwich"]


@pytest.mark.parametrize("src,dst", SANDWICH)
def test_exact_search_against_grid_oracle(src, dst):
    for j, steps in ((1, 1000), (2, 40)):
        exact, x = op_norm_exact(src, dst, j, return_vector=True)
        assert norm_m(x, *dst) / norm_m(x, *src) == pytest.approx(exact, rel=1e-12)
        found = _grid_search(src, dst, 1 << j, steps)
        assert found <= exact * (1 + 1e-9)
        assert found >= exact * (1 - 1e-4)


@pytest.mark.parametrize("src,dst", SANDWICH)
def test_sandwich_bracket(src, dst):
    for j in (1, 2, 3):
        formula, _ = op_norm_formula(src, dst, j)
        exact = op_norm_exact(src, dst, j)
        assert 1.0 <= exact <= formula * (1 + TOL_CERT)
        assert sampled_ratio_max(src, dst, j, samples=2000, seed=j) <= exact * (1 + TOL_CERT)


def test_flat_target_search_agrees_with_formula():
    for src, dst in itertools.product(PAIRS, PAIRS):
        if op_norm_case(src, dst) == "flat-target":
            assert op_norm_exact(src, dst, 2) == pytest.approx(1.0, rel=1e-12)


def test_dual_norm_examples():
    e0 = np.eye(4)[0]
    assert dual_norm_lower(e0, 2, 2) == pytest.approx(1.0)
    assert dual_norm_upper(e0, 2, 2) == pytest.approx(1.0)
    assert dual_norm_lower(np.zeros(4), 2, 2) == 0.0
    ones = np.ones(8)
    for p in (F(1), F(2), INF):
        conj = INF if p == 1 else (F(1) if p == INF else p / (p - 1))
        expect = 8.0 ** (0 if conj == INF else 1 / float(conj))
        assert dual_norm_lower(ones, p, p) == pytest.approx(expect, rel=1e-9)
        assert dual_norm_upper(ones, p, p) == pytest.approx(expect, rel=1e-9)


@given(st.sampled_from(PAIRS), st.integers(0, 3), st.data())
@settings(max_examples=40)
def test_dual_bounds_ordered(pair, j, data):
    v = data.draw(arrays(float, 1 << j, elements=st.floats(-10, 10, allow_nan=False)))
    assert dual_norm_lower(v, *pair, samples=200) <= dual_norm_upper(v, *pair) * (1 + 1e-9) + 1e-12
