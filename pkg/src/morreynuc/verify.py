"""Formula-versus-oracle verification runs with a JSON report.

Each case compares a closed-form value with independently computed lower and
upper bounds.  Reports depend only on ``(plan, seed, budget)``; wall-clock
times are kept out of the file so that reruns are byte-identical.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor, TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import classifier as clf
from .morrey_seq import TOL_CERT, op_norm_formula, op_norm_lower_oracle, sampled_ratio_max
from .nuclear_engine import (
    diag_duality_lower,
    nuclear_formula_id_j,
    nuclear_lower_id_j,
    nuclear_upper_id_j,
    rep_diag,
    rep_l1_to_linf,
    rep_linf_to_l1,
    tong_diag_nuclear,
)
from .params import INF, Family, SpaceSpec, fmt, morrey_to_tau, rho_to_canonical

SCHEMA = "morrey-verify/1"
PLANS = ("opnorms", "nuclear", "tong", "classifier-consistency")
GRID = (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(4), INF)
DEFAULT_BUDGET = 256
CASE_TIMEOUT = 10.0
RECONSTRUCTION_TOL = 1e-10

CERTIFIED = "certified-exact"
SANDWICH = "sandwich-consistent"
VIOLATED = "violated"
SKIPPED = "skipped"
TIMEOUT = "timeout"


def morrey_pairs(values=GRID):
    """Admissible ``(u, p)``: ``p <= u < inf`` or ``p = u = inf``."""
    out = [(u, p) for u in values for p in values if u != INF and p <= u]
    if INF in values:
        out.append((INF, INF))
    return out


@dataclass
class Case:
    id: str
    params: dict
    size: int
    run: object = field(repr=False)


@dataclass
class VerificationReport:
    plan: str
    seed: int
    budget: int
    cases: list
    tolerances: dict

    @property
    def violated(self) -> int:
        return sum(c["status"] == VIOLATED for c in self.cases)

    @property
    def skipped(self) -> int:
        return sum(c["status"] in (SKIPPED, TIMEOUT) for c in self.cases)

    def summary(self) -> str:
        line = f"{len(self.cases)} cases, {self.violated} violated"
        if self.skipped:
            line += f", {self.skipped} skipped"
        return line

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "plan": self.plan,
            "seed": self.seed,
            "budget": self.budget,
            "tolerances": self.tolerances,
            "cases": self.cases,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=False) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _close(a: float, b: float, tol: float = TOL_CERT) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(b))


def _case_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


# ---------------------------------------------------------------- tong plan

TONG_VECTORS = {
    "ones": lambda n: [Fraction(1)] * n,
    "ramp": lambda n: [Fraction(k + 1) for k in range(n)],
    "mixed": lambda n: [Fraction(3), Fraction(-1), Fraction(1, 2), Fraction(5)][:n],
}
TONG_R = (Fraction(1), Fraction(2), INF)


def _tong_cases():
    for n, r1, r2, name in itertools.product((1, 2, 3, 4), TONG_R, TONG_R, TONG_VECTORS):
        tau = TONG_VECTORS[name](n)
        yield Case(f"tong/n={n}/r1={fmt(r1)}/r2={fmt(r2)}/{name}",
                   {"n": n, "r1": r1, "r2": r2, "tau": [fmt(t) for t in tau]},
                   n, lambda seed, tau=tau, r1=r1, r2=r2: _tong_run(tau, r1, r2))
    for n in (1, 2, 3, 4):
        yield Case(f"tong/rep-linf-l1/n={n}", {"n": n}, n, lambda seed, n=n: _rep_run(rep_linf_to_l1(n), n))
        yield Case(f"tong/rep-l1-linf/n={n}", {"n": n}, n, lambda seed, n=n: _rep_run(rep_l1_to_linf(n), 1))


def _tong_run(tau, r1, r2):
    value = tong_diag_nuclear(tau, r1, r2)
    lower = diag_duality_lower(tau, r1, r2).lower_bound
    cert = rep_diag(tau, r1, r2)
    ok = _close(lower, value) and _close(cert.bound, value) and cert.reconstruction_error <= RECONSTRUCTION_TOL
    radicand, t = tong_diag_nuclear(tau, r1, r2, exact=True)
    return {"formula": value, "lower": lower, "upper": cert.bound,
            "status": CERTIFIED if ok else VIOLATED,
            "detail": {"t": t, "exact_power_sum": radicand, "reconstruction_error": cert.reconstruction_error}}


def _rep_run(cert, expected):
    ok = cert.reconstruction_error == 0 and cert.bound == expected
    return {"formula": float(expected), "lower": float(expected), "upper": cert.bound,
            "status": CERTIFIED if ok else VIOLATED,
            "detail": {"terms": len(cert.terms), "reconstruction_error": cert.reconstruction_error}}


# ---------------------------------------------------------------- operator norms

def _opnorm_cases(samples: int):
    pairs = morrey_pairs()
    for (src, dst, j) in itertools.product(pairs, pairs, (1, 2, 3)):
        params = {"u1": src[0], "p1": src[1], "u2": dst[0], "p2": dst[1], "j": j, "d": 1}
        yield Case(f"opnorm/{fmt(src[0])},{fmt(src[1])}->{fmt(dst[0])},{fmt(dst[1])}/j={j}", params, 1 << j,
                   lambda seed, src=src, dst=dst, j=j: _opnorm_run(src, dst, j, seed, samples))


def _opnorm_run(src, dst, j, seed, samples):
    value, exact = op_norm_formula(src, dst, j)
    lower, witness = op_norm_lower_oracle(src, dst, j, detail=True)
    sampled = sampled_ratio_max(src, dst, j, samples=samples, seed=seed)
    detail = {"exact": exact, "witness": witness, "sampled_max": sampled, "samples": samples}
    if exact:
        ok = _close(lower, value) and sampled <= value * (1 + TOL_CERT)
        status = CERTIFIED if ok else VIOLATED
    else:
        ok = lower <= value * (1 + TOL_CERT) and sampled <= value * (1 + TOL_CERT)
        status = SANDWICH if ok else VIOLATED
        detail["c"] = lower / value
    return {"formula": value, "lower": lower, "upper": value, "status": status, "detail": detail}


# ---------------------------------------------------------------- nuclear norms

def _nuclear_cases(samples: int):
    pairs = morrey_pairs()
    for (src, dst, j) in itertools.product(pairs, pairs, (1, 2, 3)):
        params = {"u1": src[0], "p1": src[1], "u2": dst[0], "p2": dst[1], "j": j, "d": 1}
        yield Case(f"nuclear/{fmt(src[0])},{fmt(src[1])}->{fmt(dst[0])},{fmt(dst[1])}/j={j}", params, 1 << j,
                   lambda seed, src=src, dst=dst, j=j: _nuclear_run(src, dst, j, seed, samples))


def _nuclear_run(src, dst, j, seed, samples):
    value, exact = nuclear_formula_id_j(src, dst, j)
    lower = nuclear_lower_id_j(src, dst, j).lower_bound
    proof = nuclear_upper_id_j(src, dst, j, construction="proof", seed=seed, samples=samples)
    best = nuclear_upper_id_j(src, dst, j, construction="best", seed=seed, samples=samples)
    recon = [c.reconstruction_error for c in (proof, best) if c.reconstruction_error is not None]
    mc = proof.detail.get("mc")
    detail = {"exact": exact, "proof_construction": proof.construction, "proof_bound": proof.bound,
              "best_construction": best.construction,
              "max_reconstruction_error": max(recon) if recon else None}
    if "nu0" in proof.detail:
        detail["nu0"] = proof.detail["nu0"]
    if mc is not None:
        detail["monte_carlo"] = mc
    sound = lower <= best.bound * (1 + TOL_CERT) and all(r <= RECONSTRUCTION_TOL for r in recon)
    sound = sound and (mc is None or mc["passed"])
    if exact:
        ok = sound and _close(lower, value) and _close(best.bound, value) and _close(proof.bound, value)
        status = CERTIFIED if ok else VIOLATED
    else:
        ok = sound and lower >= value * (1 - TOL_CERT)
        status = SANDWICH if ok else VIOLATED
        detail["ratio_upper_lower"] = best.bound / lower
        detail["ratio_proof_lower"] = proof.bound / lower
    return {"formula": value, "lower": lower, "upper": best.bound, "status": status, "detail": detail}


# ---------------------------------------------------------------- classifier consistency

def _rationals(values, seed, count):
    rng = np.random.default_rng(seed)
    return [values[i] for i in rng.integers(0, len(values), size=count)]


S_VALUES = [Fraction(k, 4) for k in range(-8, 17)]
P_VALUES = [Fraction(1), Fraction(4, 3), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(4), INF]
Q_VALUES = [Fraction(1), Fraction(2), INF]


def _morrey_space(rng, fam):
    p = P_VALUES[rng.integers(len(P_VALUES) - (fam is Family.TL_MORREY))]
    if p == INF:
        u = INF
    else:
        us = [v for v in P_VALUES if v != INF and v >= p]
        u = us[rng.integers(len(us))]
    return SpaceSpec(fam, 1, s=S_VALUES[rng.integers(len(S_VALUES))], p=p, u=u,
                     q=Q_VALUES[rng.integers(len(Q_VALUES))])


def _morrey_pair(rng):
    fam = Family.TL_MORREY if rng.random() < 0.5 else Family.BESOV_MORREY
    return _morrey_space(rng, fam), _morrey_space(rng, fam)


def _check_nuclear_implies_compact(rng):
    v = clf.classify_morrey(*_morrey_pair(rng))
    return v.nuclear is not clf.Status.YES or v.compact is clf.Status.YES


def _check_q_independence(rng):
    a, b = _morrey_pair(rng)
    v = clf.classify_morrey(a, b)
    a2 = SpaceSpec(a.family, 1, s=a.s, p=a.p, u=a.u, q=Q_VALUES[rng.integers(3)])
    b2 = SpaceSpec(b.family, 1, s=b.s, p=b.p, u=b.u, q=Q_VALUES[rng.integers(3)])
    w = clf.classify_morrey(a2, b2)
    return (w.compact, w.nuclear) == (v.compact, v.nuclear)


def _check_tau_matches_morrey(rng):
    a, b = _morrey_space(rng, Family.TL_MORREY), _morrey_space(rng, Family.TL_MORREY)
    v = clf.classify_morrey(a, b)
    t = clf.classify_tau(morrey_to_tau(a), morrey_to_tau(b))
    return ((t.compact, t.nuclear, t.threshold_compact, t.threshold_nuclear)
            == (v.compact, v.nuclear, v.threshold_compact, v.threshold_nuclear))


def _check_boundary_is_no(rng):
    a, b = _morrey_pair(rng)
    v = clf.classify_morrey(a, b)
    ok = True
    for thr, which in ((v.threshold_compact, "compact"), (v.threshold_nuclear, "nuclear")):
        edge = SpaceSpec(a.family, 1, s=b.s + thr, p=a.p, u=a.u, q=a.q)
        e = clf.classify_morrey(edge, b)
        ok = ok and getattr(e, which) is clf.Status.NO and getattr(e, f"on_boundary_{which}")
    return ok


def _check_rho_classical(rng):
    s1, s2 = (S_VALUES[i] for i in rng.integers(len(S_VALUES), size=2))
    p1, p2 = (P_VALUES[i] for i in rng.integers(len(P_VALUES) - 1, size=2))
    q1, q2 = (Q_VALUES[i] for i in rng.integers(len(Q_VALUES), size=2))
    letter_b = rng.random() < 0.5
    rf = Family.RHO_B if letter_b else Family.RHO_F
    cf = Family.BESOV if letter_b else Family.TL
    ra = SpaceSpec(rf, 1, s=s1, p=p1, rho=-1, q=q1)
    rb = SpaceSpec(rf, 1, s=s2, p=p2, rho=-1, q=q2)
    r = clf.classify_rho(ra, rb)
    c = clf.classify_morrey(rho_to_canonical(ra), rho_to_canonical(rb))
    ct = clf.classify_tau(SpaceSpec(cf, 1, s=s1, p=p1, q=q1), SpaceSpec(cf, 1, s=s2, p=p2, q=q2))
    return (r.compact, r.nuclear) == (c.compact, c.nuclear) == (ct.compact, ct.nuclear)


CONSISTENCY_CHECKS = {
    "nuclear-implies-compact": _check_nuclear_implies_compact,
    "tau-matches-morrey": _check_tau_matches_morrey,
    "rho-classical": _check_rho_classical,
    "q-independence": _check_q_independence,
    "boundary-is-no": _check_boundary_is_no,
}


def _consistency_run(name: str, seed: int, count: int):
    rng = np.random.default_rng(seed)
    check = CONSISTENCY_CHECKS[name]
    agree = sum(bool(check(rng)) for _ in range(count))
    return {"formula": float(count), "lower": float(agree), "upper": float(agree),
            "status": CERTIFIED if count and agree == count else VIOLATED,
            "detail": {"checked": count, "agreeing": agree}}


def _classifier_cases(count: int):
    for name in CONSISTENCY_CHECKS:
        yield Case(f"classifier/{name}", {"tuples": count}, 1,
                   lambda seed, name=name: _consistency_run(name, seed, count))


# ---------------------------------------------------------------- driver

def plan_cases(plan: str, *, samples: int = 10_000, tuples: int = 10_000):
    if plan == "all":
        return [c for p in PLANS for c in plan_cases(p, samples=samples, tuples=tuples)]
    if plan == "tong":
        return list(_tong_cases())
    if plan == "opnorms":
        return list(_opnorm_cases(samples))
    if plan == "nuclear":
        return list(_nuclear_cases(samples))
    if plan == "classifier-consistency":
        return list(_classifier_cases(tuples))
    raise ValueError(f"unknown plan {plan!r}; choose from {', '.join(PLANS + ('all',))}")


def run_suite(plan: str, seed: int = 0, budget: int = DEFAULT_BUDGET, *, samples: int = 10_000,
              tuples: int = 10_000, workers: int | None = None, timeout: float = CASE_TIMEOUT) -> VerificationReport:
    """Run every case of ``plan``; cases larger than ``budget`` coefficients are listed as skipped."""
    cases = plan_cases(plan, samples=samples, tuples=tuples)
    seeds = [_case_seed(seed, i) for i in range(len(cases))]
    results: list = [None] * len(cases)
    runnable = [i for i, c in enumerate(cases) if c.size <= budget]
    workers = workers or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {i: pool.submit(cases[i].run, seeds[i]) for i in runnable}
        for i, fut in futures.items():
            try:
                results[i] = fut.result(timeout=timeout)
            except FutureTimeout:
                results[i] = {"status": TIMEOUT, "detail": {"timeout_s": timeout}}
    out = []
    for c, res in zip(cases, results):
        if res is None:
            res = {"status": SKIPPED, "detail": {"reason": f"size {c.size} exceeds budget {budget}"}}
        out.append({"id": c.id, "params": c.params,
                    "formula": res.get("formula"), "lower": res.get("lower"), "upper": res.get("upper"),
                    "status": res["status"], "detail": res.get("detail", {})})
    tol = {"certification": TOL_CERT, "reconstruction": RECONSTRUCTION_TOL, "monte_carlo_sigmas": 3.0}
    return VerificationReport(plan, seed, budget, out, tol)
