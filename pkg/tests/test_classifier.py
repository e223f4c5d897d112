import itertools
from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from morreynuc.classifier import (
    Status,
    classify,
    classify_morrey,
    classify_rho,
    classify_same_tau,
    classify_seq,
    classify_special_target,
    classify_tau,
    morrey_nuclear_threshold,
    same_tau_threshold,
)
from morreynuc.params import INF, Family, ParameterError, SeqSpec, SpaceSpec, inv, morrey_to_tau, pos, tong_number

YES, NO, NC = Status.YES, Status.NO, Status.NOT_CHARACTERIZED


def N(s, u, p, q=1, d=1):
    return SpaceSpec("N", d, s=s, u=u, p=p, q=q)


def E(s, u, p, q=1, d=1):
    return SpaceSpec("E", d, s=s, u=u, p=p, q=q)


def Ft(s, p, tau, q=1, d=1):
    return SpaceSpec("Ftau", d, s=s, p=p, tau=tau, q=q)


def Bt(s, p, tau, q=1, d=1):
    return SpaceSpec("Btau", d, s=s, p=p, tau=tau, q=q)


def test_morrey_nuclear_example():
    v = classify_morrey(N(F(11, 10), 2, 1), N(0, 4, 2))
    assert v.threshold_nuclear == 1 and v.nuclear is YES and v.compact is YES


def test_morrey_compact_not_nuclear():
    v = classify_morrey(N(F(1, 2), 2, 1), N(0, 4, 2))
    assert v.threshold_compact == F(1, 4)
    assert (v.compact, v.nuclear) == (YES, NO)


@pytest.mark.parametrize("p1,p2", list(itertools.product([F(1), F(2), F(4)], repeat=2)))
def test_classical_nuclear_threshold(p1, p2):
    v = classify_morrey(SpaceSpec("B", 2, s=5, p=p1, q=1), SpaceSpec("B", 2, s=0, p=p2, q=1))
    assert v.threshold_nuclear == 1 - pos(inv(p2) - inv(p1))


def test_boundary_is_no():
    v = classify_morrey(N(1, 2, 1), N(0, 4, 2))
    assert v.lhs == v.threshold_nuclear
    assert v.nuclear is NO and v.on_boundary_nuclear


def test_tau_example():
    v = classify_tau(Bt(1, 1, 1), Bt(0, 2, 0))
    assert v.threshold_nuclear == F(1, 2) and v.nuclear is YES


def test_tau_reduces_to_classical():
    for p1, p2 in itertools.product([F(1), F(3, 2), F(4)], repeat=2):
        a = classify_tau(Ft(F(3, 2), p1, 0), Ft(0, p2, 0))
        b = classify_morrey(E(F(3, 2), p1, p1), E(0, p2, p2))
        assert (a.threshold_compact, a.threshold_nuclear) == (b.threshold_compact, b.threshold_nuclear)


def test_tau_above_critical_both_sides():
    t1, p1, t2, p2 = F(2), F(1), F(1), F(2)
    v = classify_tau(Ft(5, p1, t1), Ft(0, p2, t2))
    assert v.threshold_nuclear == 1 + inv(p1) - t1 - inv(p2) + t2


def test_seq_classical_reduction():
    for p1, p2 in itertools.product([F(1), F(2), F(4)], repeat=2):
        src, dst = SeqSpec(sigma=3, u=p1, p=p1, q=1, d=1), SeqSpec(sigma=0, u=p2, p=p2, q=1, d=1)
        v = classify_seq(src, dst)
        delta = 3 - inv(p1) + inv(p2)
        assert (v.nuclear is YES) == (delta > 1 / tong_number(p1, p2))
        assert v.compact is NC


def test_seq_equal_sigma_never_nuclear():
    vals = [F(1), F(2), F(4)]
    for u1, p1, u2, p2 in itertools.product(vals, repeat=4):
        if p1 > u1 or p2 > u2:
            continue
        v = classify_seq(SeqSpec(sigma=1, u=u1, p=p1, q=1, d=1), SeqSpec(sigma=1, u=u2, p=p2, q=1, d=1))
        assert v.nuclear is NO


def test_special_targets():
    v = classify_special_target(N(1, 2, 1), "bmo")
    assert v.nuclear is NO and v.on_boundary_nuclear
    assert classify_special_target(N(F(11, 10), 2, 1), "Linf").nuclear is YES
    for r, p, tau in itertools.product([F(1), F(2), F(4)], [F(1), F(2)], [F(0), F(1, 4)]):
        if tau > inv(p):
            continue
        v = classify_special_target(Bt(3, p, tau), SpaceSpec("Lr", 1, p=r))
        assert v.threshold_nuclear == 1 - pos(inv(r) - inv(p) + tau)
        assert v.compact is NC
    # the positive part vanishes once r >= u
    assert classify_special_target(E(0, 4, 2), SpaceSpec("Lr", 1, p=4)).threshold_nuclear == 1
    assert classify_special_target(E(0, 4, 2), SpaceSpec("Lr", 1, p=8)).threshold_nuclear == 1
    assert classify_special_target(E(0, 4, 2), SpaceSpec("Lr", 1, p=2)).threshold_nuclear == F(3, 4)


def test_rho_examples():
    a = SpaceSpec("rhoB", 3, s=F(5, 2), p=2, rho=-1, q=1)
    b = SpaceSpec("rhoB", 3, s=F(3, 2), p=2, rho=-1, q=1)
    assert classify_rho(a, b).nuclear is NO  # difference exactly 1
    a2 = SpaceSpec("rhoB", 3, s=F(26, 10), p=2, rho=-1, q=1)
    assert classify_rho(a2, b).nuclear is YES
    same = classify_rho(b, b)
    assert (same.compact, same.nuclear) == (NO, NO)
    with pytest.raises(ParameterError):
        classify_rho(a, SpaceSpec("rhoB", 3, s=0, p=2, rho=-2, q=1))


def test_same_tau_cases():
    assert same_tau_threshold(F(0), F(1), F(2)) == 1 - pos(inv(F(2)) - inv(F(1))) == 1
    assert same_tau_threshold(F(0), F(4), F(2)) == 1 - F(1, 2) + F(1, 4)
    # p1 <= p2 with tau >= 1/p1 gives 1 + 1/p1 - 1/p2
    assert same_tau_threshold(F(1), F(2), F(4)) == 1 + F(1, 2) - F(1, 4)
    assert same_tau_threshold(F(1), F(2), F(2)) == 1
    v = classify_same_tau(Ft(3, 2, F(1, 4)), Ft(0, 4, F(1, 4)))
    assert v.nuclear is YES
    with pytest.raises(ParameterError):
        classify_same_tau(Ft(3, 2, F(1, 4)), Ft(0, 4, F(1, 2)))


def test_same_tau_zero_matches_classical():
    for p1, p2 in itertools.product([F(1), F(3, 2), F(2), F(4), INF], repeat=2):
        assert same_tau_threshold(F(0), p1, p2) == 1 - pos(inv(p2) - inv(p1))


def test_quasi_banach_not_characterized():
    v = classify_morrey(N(3, 2, F(1, 2)), N(0, 2, 1))
    assert v.nuclear is NC and v.compact is YES and v.notes


def test_dispatch():
    assert classify(N(3, 4, 2, q=INF), Ft(0, 2, 0)).citation.startswith("tau")
    assert classify(N(3, 4, 2, q=2), E(0, 4, 2)).citation.startswith("Morrey")
    assert classify(N(3, 4, 2), SpaceSpec("bmo", 1)).citation.startswith("embeddings")
    unresolved = classify(N(3, 4, 2, q=2), Bt(0, 2, F(1, 4), q=2))
    assert unresolved.nuclear is NC
    with pytest.raises(ParameterError):
        classify(SpaceSpec("bmo", 1), N(0, 2, 1))
    with pytest.raises(ParameterError):
        classify(N(0, 2, 1, d=1), N(0, 2, 1, d=2))


def test_verdict_json_shape():
    d = classify(N(2, 2, 1), N(0, 4, 2)).to_dict()
    assert set(d) == {"compact", "nuclear", "lhs", "threshold_compact", "threshold_nuclear",
                      "on_boundary", "citation", "notes"}
    assert d["threshold_nuclear"] == "1" and d["nuclear"] == "yes"


# ---------------------------------------------------------------- properties

exps = st.sampled_from([F(1), F(4, 3), F(3, 2), F(2), F(3), F(4), INF])
smooth = st.fractions(min_value=-3, max_value=5, max_denominator=8)
qs = st.sampled_from([F(1), F(2), INF])


@st.composite
def morrey_spaces(draw, letter=None, d=1):
    fam = letter or draw(st.sampled_from(["N", "E"]))
    p = draw(exps)
    u = draw(exps.filter(lambda u: u >= p))
    if fam == "E":
        assume(u != INF)
    if u == INF:
        assume(p == INF)
    return SpaceSpec(fam, d, s=draw(smooth), u=u, p=p, q=draw(qs))


@st.composite
def tau_spaces(draw, letter=None, d=1):
    fam = letter or draw(st.sampled_from(["Btau", "Ftau"]))
    p = draw(exps)
    if fam == "Ftau":
        assume(p != INF)
    tau = draw(st.sampled_from([F(0), F(1, 8), F(1, 4), F(1, 2), F(1), F(2)]))
    return SpaceSpec(fam, d, s=draw(smooth), p=p, tau=tau, q=draw(qs))


@given(morrey_spaces(), morrey_spaces())
def test_nuclear_implies_compact_morrey(a, b):
    v = classify(a, b)
    if NC not in (v.compact, v.nuclear) and v.nuclear is YES:
        assert v.compact is YES


@given(tau_spaces(), tau_spaces())
def test_nuclear_implies_compact_tau(a, b):
    v = classify(a, b)
    if NC not in (v.compact, v.nuclear) and v.nuclear is YES:
        assert v.compact is YES


@given(morrey_spaces(), morrey_spaces(), qs, qs)
def test_q_independence(a, b, q1, q2):
    from dataclasses import replace
    v, w = classify_morrey(a, b), classify_morrey(replace(a, q=q1), replace(b, q=q2))
    assert (v.compact, v.nuclear) == (w.compact, w.nuclear)


@given(morrey_spaces("E"), morrey_spaces("E"))
def test_tau_form_agrees_on_f_scale(a, b):
    assume(a.u != INF and b.u != INF)
    m = classify_morrey(a, b)
    t = classify_tau(morrey_to_tau(a), morrey_to_tau(b))
    assert (m.compact, m.nuclear) == (t.compact, t.nuclear)
    assert (m.threshold_compact, m.threshold_nuclear) == (t.threshold_compact, t.threshold_nuclear)


@given(morrey_spaces(), morrey_spaces())
def test_boundary_inputs_are_no(a, b):
    from dataclasses import replace
    thr = morrey_nuclear_threshold(a.u, a.p, b.u, b.p)
    a = replace(a, s=b.s + a.d * thr)
    v = classify_morrey(a, b)
    if v.nuclear is not NC:
        assert v.nuclear is NO and v.on_boundary_nuclear
    a = replace(a, s=b.s + a.d * v.threshold_compact)
    v = classify_morrey(a, b)
    assert v.compact is NO and v.on_boundary_compact


@given(st.integers(1, 3), exps.filter(lambda p: p != INF), exps.filter(lambda p: p != INF), smooth, smooth, qs)
def test_rho_full_dimension_is_classical(d, p1, p2, s1, s2, q):
    a = SpaceSpec("rhoF", d, s=s1, p=p1, rho=-d, q=q)
    b = SpaceSpec("rhoF", d, s=s2, p=p2, rho=-d, q=q)
    r = classify_rho(a, b)
    c = classify_morrey(SpaceSpec("F", d, s=s1, p=p1, q=q), SpaceSpec("F", d, s=s2, p=p2, q=q))
    t = classify_tau(SpaceSpec("F", d, s=s1, p=p1, q=q), SpaceSpec("F", d, s=s2, p=p2, q=q))
    assert (r.compact, r.nuclear) == (c.compact, c.nuclear) == (t.compact, t.nuclear)


@given(st.integers(1, 3), st.data())
def test_rho_mixed_forms_agree(d, data):
    rho = -data.draw(st.fractions(min_value=F(1, 4), max_value=d, max_denominator=4))
    p = data.draw(exps.filter(lambda p: p != INF))
    a = SpaceSpec("rhoB", d, s=data.draw(smooth), p=p, rho=rho, q=INF)
    b = data.draw(morrey_spaces("N", d=d))
    from morreynuc.params import rho_to_canonical
    lo = classify(rho_to_canonical(a, "lower"), b)
    up = classify(rho_to_canonical(a, "upper"), b)
    if NC not in (lo.compact, up.compact):
        assert (lo.compact, lo.nuclear) == (up.compact, up.nuclear)
