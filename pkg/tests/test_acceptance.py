"""One test per acceptance criterion; each records a PASS/FAIL line.

The lines are printed in the pytest terminal summary (section "acceptance criteria").
"""
import math
import time

import numpy as np
from ftconsensus.metrics import conservation_error, disagreement, reaching_time
from ftconsensus.protocols import (
    ProtocolConfig,
    Variant,
    bound_consensus_time,
    control_average,
    control_weighted,
    reaching_bound,
    theta_rhs,
)
from ftconsensus.scalar import ScalarGains, analytic_abs_x, bound_scalar, first_time_below, first_zero_time, simulate_scalar
from ftconsensus.scenario import builtin_scenarios
from ftconsensus.state import SwarmState

from conftest import ACCEPTANCE_LINES, random_graph, run_builtin

SEED = 7


def verdict(number, checks):
    """Record one line for ``number``; ``checks`` maps a label to (ok, detail)."""
    ok = all(passed for passed, _ in checks.values())
    parts = "; ".join(f"{label} {'ok' if passed else 'FAIL'} ({detail})" for label, (passed, detail) in checks.items())
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {parts}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    failed = [label for label, (passed, _) in checks.items() if not passed]
    assert not failed, line


def sig4(value, target):
    return f"{value:.4g}" == f"{target:.4g}"


def test_criterion_1_bound_formulas():
    b1 = bound_consensus_time(Variant.FIXED_TIME, 2.0, 2.0).total
    b2 = bound_consensus_time(Variant.AVERAGE, 2.0, 8.0, n=6, kappa=1.0).total
    b4 = reaching_bound(10.0, 4.0)
    verdict(
        1,
        {
            "fixed-time": (sig4(b1, math.pi / math.sqrt(7)), f"{b1:.6f}"),
            "average": (sig4(b2, math.pi / math.sqrt(5 / 3)), f"{b2:.6f}"),
            "reaching": (sig4(b4, math.pi / math.sqrt(6)), f"{b4:.6f}"),
        },
    )


def test_criterion_2_example1():
    t1 = run_builtin("ex1-case1")[1].consensus_time
    t2 = run_builtin("ex1-case2")[1].consensus_time
    inside = lambda t: t is not None and 0.6 <= t <= 1.19
    verdict(
        2,
        {
            "case1 t*": (inside(t1), f"{t1}"),
            "case2 t*": (inside(t2), f"{t2}"),
            "|t1-t2|<=0.05": (t1 is not None and t2 is not None and abs(t1 - t2) <= 0.05, f"{abs(t1 - t2):.4f}"),
        },
    )


def test_criterion_3_example2():
    r1, r2, low = (run_builtin(n)[1] for n in ("ex2-case1", "ex2-case2", "ex2-lowrho"))
    fast = lambda r: r.consensus_time is not None and r.consensus_time < 2.43
    verdict(
        3,
        {
            "case1 value": (fast(r1) and abs(r1.consensus_value) <= 1e-2, f"{r1.consensus_value:.3g} at {r1.consensus_time}"),
            "case2 value": (fast(r2) and abs(r2.consensus_value + 5) <= 1e-2, f"{r2.consensus_value:.6g} at {r2.consensus_time}"),
            "lowrho": (
                low.consensus_time is not None and not low.condition_satisfied,
                f"t*={low.consensus_time}, condition_satisfied={low.condition_satisfied}",
            ),
        },
    )


def test_criterion_4_example3():
    sc = builtin_scenarios()["ex3"]
    traj, report = run_builtin("ex3")
    target = float(np.dot(sc.protocol.p, sc.x0))
    err = conservation_error(traj, sc.protocol.p)
    verdict(
        4,
        {
            "consensus": (report.consensus_time is not None, f"t*={report.consensus_time}"),
            "value": (
                report.consensus_value is not None and abs(report.consensus_value - target) <= 1e-2,
                f"{report.consensus_value:.6g} vs sum p_i x_i(0)={target:g}",
            ),
            "conservation": (err < 1e-3, f"{err:.2e}"),
        },
    )


def test_criterion_5_example4():
    start = time.perf_counter()
    traj, report = run_builtin("ex4")
    elapsed = time.perf_counter() - start
    shifted = run_builtin("ex4-shifted")[1]
    t_reach = reaching_time(traj, 1e-2)
    checks = {
        "reaching": (t_reach is not None and t_reach <= 1.28, f"{t_reach}"),
        "consensus": (
            report.consensus_time is not None and report.consensus_time <= 2.47 and abs(report.consensus_value) <= 2e-2,
            f"{report.consensus_value:.3g} at {report.consensus_time}",
        ),
        "max_control in [30,55]": (30 <= report.max_control <= 55, f"{report.max_control:.2f}"),
        "shifted": (
            shifted.consensus_value is not None and abs(shifted.consensus_value + 1) <= 2e-2,
            f"{shifted.consensus_value}",
        ),
    }
    if elapsed > 1e-3:  # a cached result carries no timing information
        checks["runtime<60s"] = (elapsed < 60, f"{elapsed:.1f}s")
    verdict(5, checks)


def test_criterion_6_scalar_oracle():
    rng = np.random.default_rng(SEED)
    dt = 1e-4
    tol = max(1e-6, 1e3 * dt * dt)
    worst_err, zero_ok = 0.0, True
    for _ in range(20):
        lam = float(rng.uniform(0.0, 4.0))
        rho = lam * lam / 4 + float(rng.uniform(0.2, 10.0))
        g = ScalarGains(lam, rho)
        t0 = first_zero_time(g)
        traj = simulate_scalar(float(rng.choice([-1.0, 1.0])), g, dt=dt, t_end=t0 + 20 * dt)
        before = traj.times < t0 - 2 * dt
        err = np.abs(np.abs(traj.x[before, 0]) - analytic_abs_x(traj.times[before], 1.0, g)).max()
        worst_err = max(worst_err, float(err))
        bound = bound_scalar(g)
        zero_ok &= t0 <= bound
        for x0 in (1e-2, 1.0, 1e3, 1e6):
            run = simulate_scalar(x0, g, dt=dt, t_end=bound + 20 * dt)
            hit = first_time_below(run, 1e-3 * max(1.0, x0))
            zero_ok &= hit is not None and hit <= bound + 10 * dt
    verdict(
        6,
        {
            "agreement": (worst_err <= tol, f"max err {worst_err:.2e} <= {tol:.0e}"),
            "first zero within bound": (bool(zero_ok), "x0 in 1e-2..1e6"),
        },
    )


def test_criterion_7_properties():
    rng = np.random.default_rng(SEED)
    sum_square = all(
        (x := rng.normal(0, 10, int(rng.integers(1, 11)))).sum() ** 2 <= len(x) * (x * x).sum() * (1 + 1e-12)
        for _ in range(1000)
    )
    worst_avg = worst_w = worst_theta = worst_red = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 8))
        g = random_graph(rng, n)
        s = SwarmState(0.0, rng.normal(0, 5, n), rng.uniform(0, 10, n))
        lam, rho = float(rng.uniform(0.1, 5)), float(rng.uniform(0.1, 5))
        c = ProtocolConfig(Variant.AVERAGE, lam, rho)
        u = control_average(g, s, c)
        worst_avg = max(worst_avg, abs(u.sum()) / (1 + np.abs(u).max()))
        p = rng.uniform(0.1, 1.0, n)
        p /= p.sum()
        p[-1] = 1.0 - p[:-1].sum()
        uw = control_weighted(g, s, ProtocolConfig(Variant.WEIGHTED, lam, rho, p=tuple(p)))
        worst_w = max(worst_w, abs(np.dot(p, uw)) / (1 + np.abs(uw).max()))
        lhs = theta_rhs(g, s, c).sum()
        rhs = -lam * s.theta.sum() + 4 * rho * disagreement(g, s.x)
        worst_theta = max(worst_theta, abs(lhs - rhs) / max(abs(rhs), 1e-300))
        uniform = ProtocolConfig(Variant.WEIGHTED, lam, rho, p=tuple([1.0 / n] * n)) if math.fsum([1.0 / n] * n) == 1 else None
        if uniform is not None:
            ur = control_weighted(g, s, uniform)
            scale = np.abs(n * u).max() or 1.0
            worst_red = max(worst_red, float(np.abs(ur - n * u).max() / scale))
    nonneg = min(
        min(run_builtin(name)[0].theta.min(), np.inf if run_builtin(name)[0].eta is None else run_builtin(name)[0].eta.min())
        for name in builtin_scenarios()
    )
    verdict(
        7,
        {
            "sum-square inequality": (sum_square, "1000 vectors"),
            "sum u (average)": (worst_avg < 1e-10, f"{worst_avg:.1e}"),
            "sum p u (weighted)": (worst_w < 1e-10, f"{worst_w:.1e}"),
            "theta/eta >= 0": (nonneg >= -1e-9, f"min {nonneg:.2e}"),
            "theta aggregate": (worst_theta <= 1e-9, f"{worst_theta:.1e}"),
            "weighted->average": (worst_red <= 1e-12, f"{worst_red:.1e}"),
        },
    )
