"""Self-contained verification suite: eight numbered criteria covering
pressure consistency, the pressure ODE, LLN/CLT constants, MGF
convergence, tail decay rates, the variational/Legendre match,
real-rootedness certification, and combinatorial equivalence.

Each criterion function returns CheckResult rows; run_suite prints one
pass/fail line per check and returns overall success.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import dist
from .chain import DEFAULT_SEED, model_from_name
from .path import euler_solve
from .pressure import (
    PressureEval,
    mean_slope,
    ode_residual,
    pressure,
    pressure_derivatives,
    rate,
    sigma_sq,
)
from .trees import (
    batch_pa_leaves,
    batch_recursive_leaves,
    batch_stirling_plateaux,
    batch_yule_cherries,
    bud_lln_endpoints,
    tv_against_chain,
    verify_clt,
)

__all__ = ["CheckResult", "run_suite", "CRITERIA"]


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    value: float
    bound: float
    relation: str = "<="  # pass iff `value <relation> bound`
    detail: str = ""

    @property
    def passed(self) -> bool:
        if self.relation == "<=":
            return self.value <= self.bound
        if self.relation == "<":
            return self.value < self.bound
        if self.relation == ">":
            return self.value > self.bound
        if self.relation == "==":
            return self.value == self.bound
        raise ValueError(f"unknown relation {self.relation!r}")


def _lambda_grid() -> list[float]:
    # [-5, 5] step 0.1, excluding the origin where the residual is 0/0
    return [i * 0.1 for i in range(-50, 51) if i != 0]


def criterion_1(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """Quadrature pressure agrees with the closed forms to 1e-8."""
    out = []
    for alpha in (0.5, 1.0, 2.0):
        ev_q = PressureEval(alpha, method="quadrature")
        ev_c = PressureEval(alpha)
        worst = max(abs(pressure(ev_q, lam) - pressure(ev_c, lam)) for lam in _lambda_grid())
        out.append(
            CheckResult(1, f"quadrature vs closed form, alpha={alpha:g}", worst, 1e-8)
        )
    return out


def criterion_2(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """Pressure and its derivative satisfy the defining ODE."""
    out = []
    for alpha in (0.5, 1.0, 1.5, 2.0):
        ev = PressureEval(alpha)
        worst = max(abs(ode_residual(ev, lam)) for lam in _lambda_grid())
        out.append(CheckResult(2, f"ODE residual, alpha={alpha:g}", worst, 1e-6))
    return out


def criterion_3(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """Derivative anchors exact; simulated means and CLT variances match."""
    out = []
    worst = 0.0
    for alpha in (0.5, 1.0, 1.5, 2.0):
        d1, d2 = pressure_derivatives(PressureEval(alpha), 0.0)
        worst = max(worst, abs(d1 - mean_slope(alpha)), abs(d2 - sigma_sq(alpha)))
    out.append(CheckResult(3, "derivative anchors at lambda=0", worst, 0.0))

    n, reps = 100_000, 200
    runs = [
        ("plane-oriented leaves", batch_recursive_leaves("plane_oriented", n, reps, seed), 2 / 3),
        ("uniform leaves", batch_recursive_leaves("uniform", n, reps, seed), 1 / 2),
        ("Yule cherries", batch_yule_cherries(n, reps, seed), 1 / 3),
    ]
    for name, stat, target in runs:
        frac = stat / n
        se = float(np.std(frac, ddof=1)) / math.sqrt(reps)
        dev = abs(float(np.mean(frac)) - target)
        out.append(
            CheckResult(
                3,
                f"mean of {name} -> {target:.4g}",
                dev / se,
                3.0,
                detail=f"mean={np.mean(frac):.6f} se={se:.2e}",
            )
        )
    for preset, target in (("plane_oriented", 1 / 9), ("yule", 2 / 45)):
        rep = verify_clt(model_from_name(preset), 10_000, 10_000, seed)
        out.append(
            CheckResult(
                3,
                f"CLT variance, {preset} -> {target:.4g}",
                abs(rep.empirical_var - target) / target,
                0.10,
                detail=f"var={rep.empirical_var:.5f} ks={rep.ks_distance:.4f}",
            )
        )
    return out


def criterion_4(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """log(m_{n+1}/m_n) converges to the pressure, improving with n."""
    model = model_from_name("plane_oriented")
    ev = PressureEval(2.0)
    snapshots = {}
    p = dist.pmf_start(model)
    for m in range(1, 4001):
        p = dist.pmf_advance(p, model)
        if p.n in (1000, 1001, 4000, 4001):
            snapshots[p.n] = p
    out = []
    for lam in (-1.0, 1.0):
        target = pressure(ev, lam)
        errs = {
            n: abs(
                dist.log_mgf(snapshots[n + 1], lam) - dist.log_mgf(snapshots[n], lam) - target
            )
            for n in (1000, 4000)
        }
        out.append(
            CheckResult(
                4,
                f"ratio estimator error at n=4000, lambda={lam:g}",
                errs[4000],
                1e-3,
                detail=f"err(1000)={errs[1000]:.2e}",
            )
        )
        out.append(
            CheckResult(4, f"error shrinks 1000 -> 4000, lambda={lam:g}", errs[4000], errs[1000], "<")
        )
    return out


def criterion_5(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """Exact-pmf tail decay approaches the rate function from below."""
    model = model_from_name("plane_oriented")
    ev = PressureEval(2.0)
    target_085 = rate(ev, 0.85).rate
    target_1 = rate(ev, 1.0).rate  # log 2
    snapshots = {}
    p = dist.pmf_start(model)
    for m in range(1, 2000):
        p = dist.pmf_advance(p, model)
        if p.n in (500, 1000, 2000):
            snapshots[p.n] = p
    d085, d1 = [], []
    for n in (500, 1000, 2000):
        q = dist.tail_log_prob(snapshots[n], 0.85)
        d085.append(abs(q - target_085))
        # x = 1: the top reachable atom k = n-1 (the first step is a forced
        # stay, so P(Z_n = n) = 0 exactly)
        qt = dist.tail_log_prob(snapshots[n], (n - 1) / n)
        d1.append(abs(qt - target_1))
    out = [
        CheckResult(
            5,
            "x=0.85 distance to I(x) decreasing",
            max(d085[1] / d085[0], d085[2] / d085[1]),
            1.0,
            "<",
            detail="dist=" + "/".join(f"{d:.4f}" for d in d085),
        ),
        CheckResult(
            5,
            "x=1 distance to log 2 decreasing",
            max(d1[1] / d1[0], d1[2] / d1[1]),
            1.0,
            "<",
            detail="dist=" + "/".join(f"{d:.4f}" for d in d1),
        ),
        CheckResult(5, "x=1 within 0.02 of log 2 at n=2000", d1[2], 0.02),
    ]
    return out


def criterion_6(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """Variational minimizer cost matches the Legendre rate; off-mean
    optimal paths bend away from the straight chord."""
    ev = PressureEval(2.0)
    out = []
    for x in (0.13, 0.5, 2 / 3, 0.85):
        sol = euler_solve(2.0, x)
        target = rate(ev, x).rate
        out.append(
            CheckResult(
                6,
                f"euler cost vs Legendre rate, x={x:g}",
                abs(sol.cost - target),
                1e-3,
                detail=f"cost={sol.cost:.8f} rate={target:.8f}",
            )
        )
        if x in (0.13, 0.85):
            dev = float(np.max(np.abs(sol.path.values - x * sol.path.knots)))
            out.append(CheckResult(6, f"chord deviation, x={x:g}", dev, 1e-3, ">"))
    return out


def criterion_7(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """Exact real-rootedness certification for every preset, n <= 30."""
    out = []
    for preset in ("uniform", "plane_oriented", "yule", "pa:beta=0", "pa:beta=1"):
        model = model_from_name(preset)
        good = 0
        first_bad = ""
        for n in range(1, 31):
            report = dist.certify_real_rooted(dist.exact_poly(model, n))
            if report.certified:
                good += 1
            elif not first_bad:
                first_bad = f"first failure at n={n}: {report.note}"
        out.append(
            CheckResult(7, f"real-rooted certificates, {preset}", good, 30, "==", first_bad)
        )
    return out


def criterion_8(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """Tree statistics reproduce the chain laws in total variation, and
    the quenched bud count obeys its LLN."""
    reps = 1_000_000
    out = []
    cases = [
        ("Yule cherries", lambda: batch_yule_cherries(12, reps, seed, record_all=True), "yule", range(1, 13)),
        (
            "uniform leaves",
            lambda: batch_recursive_leaves("uniform", 12, reps, seed, record_all=True),
            "uniform",
            range(1, 13),
        ),
        (
            "plane-oriented leaves",
            lambda: batch_recursive_leaves("plane_oriented", 12, reps, seed, record_all=True),
            "plane_oriented",
            range(1, 13),
        ),
        (
            "attachment-graph leaves",
            lambda: batch_pa_leaves(0.0, 12, reps, seed, record_all=True),
            "pa:beta=0",
            range(1, 13),
        ),
        (
            "Stirling plateaux",
            lambda: batch_stirling_plateaux(11, reps, seed, record_all=True),
            "plane_oriented",
            range(2, 13),
        ),
    ]
    for name, run, preset, steps in cases:
        tv = tv_against_chain(run(), model_from_name(preset), steps)
        out.append(
            CheckResult(
                8,
                f"total variation vs chain pmf, {name}",
                float(tv.max()),
                5e-3,
                detail=f"worst step n={list(steps)[int(tv.argmax())]}",
            )
        )
    n, reps_lln = 16_000, 1000
    z = bud_lln_endpoints(0.0, ((1, 2), (0.5, 0.5)), n, reps_lln, seed)
    frac = z / n
    se = float(np.std(frac, ddof=1)) / math.sqrt(reps_lln)
    out.append(
        CheckResult(
            8,
            "quenched bud LLN -> 3/4",
            abs(float(np.mean(frac)) - 0.75) / se,
            3.0,
            detail=f"mean={np.mean(frac):.6f} se={se:.2e}",
        )
    )
    return out


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def run_suite(criteria=None, seed: int = DEFAULT_SEED, stream=None) -> bool:
    """Run the requested criteria (all by default); print one line per
    check and a summary; return True iff everything passed."""
    if stream is None:
        stream = sys.stdout
    which = sorted(CRITERIA) if criteria is None else sorted(set(criteria))
    ok = True
    total = passed = 0
    for idx in which:
        if idx not in CRITERIA:
            raise ValueError(f"unknown criterion {idx}; valid: {sorted(CRITERIA)}")
        t0 = time.perf_counter()
        results = CRITERIA[idx](seed=seed)
        dt = time.perf_counter() - t0
        for r in results:
            total += 1
            passed += r.passed
            ok &= r.passed
            tag = "PASS" if r.passed else "FAIL"
            extra = f"  [{r.detail}]" if r.detail else ""
            print(
                f"[{tag}] C{r.criterion} {r.name}: {r.value:.6g} {r.relation} {r.bound:.6g}{extra}",
                file=stream,
            )
        print(f"       criterion {idx} finished in {dt:.1f}s", file=stream)
    print(f"overall: {'PASS' if ok else 'FAIL'} ({passed}/{total} checks)", file=stream)
    return ok
