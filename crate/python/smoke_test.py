#!/usr/bin/env python3
"""Smoke test for the evfront_py extension module.

Build and stage the module first:

    cargo build -p evfront-py --release
    cp target/release/libevfront_py.so python/evfront_py.so

then run `python3 python/smoke_test.py`.
"""
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import evfront_py as ev  # noqa: E402

failures = 0


def check(name, ok, detail=""):
    global failures
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}" + (f"  ({detail})" if detail else ""))
    if not ok:
        failures += 1


# dataset basics on a tiny hand-built sample
ds = ev.Dataset.from_xy([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
check("fdh of {1,2,3} at x=1 is 3", ds.fdh([1.0]) == 3.0)
check("conditional quantile at 1/2 is 2", ds.conditional_quantile(0.5, [1.0]) == 2.0)
ts = ds.transform([1.0])
check("order statistic k=1 is 2", ts.order_stat_quantile(1) == 2.0)
check("n_x counts dominated points", ts.n_x == 3)

# order-statistic representation of conditional quantiles
ds = ev.gen_uniform_triangle(400, 42)
ts = ds.transform([1.0])
ok = all(
    ts.order_stat_quantile(k) == ds.conditional_quantile(1 - k / ts.n_x, [1.0])
    for k in range(1, ts.n_x)
)
check("order statistics match conditional quantiles exactly", ok)

# variance closed forms against independently computed references
check(
    "pickands variance at rho=2",
    abs(ev.pickands_variance(2.0) - 48.52442970199369) < 1e-9,
)
check("moment variance at rho=2", abs(ev.moment_variance(2.0) - 28.8) < 1e-12)

# frontier estimation near the known frontier value
ds = ev.gen_uniform_triangle(4000, 7)
ts = ds.transform([1.0])
est = ev.known_rho_star(ts, 63, 2.0, 0.95)
check(
    "known-rho endpoint lands near the frontier",
    est.value is not None and abs(est.value - 1.0) < 0.05,
    f"value={est.value:.4f}",
)
lo, hi, level = est.ci
check("interval brackets the point estimate", lo <= est.value <= hi and level == 0.95)
check("interval formula recorded", est.variance_formula == "V3")

# tail index recovery with the data-driven threshold
sel = ev.select_k_pickands(ts)
rho_hat = ev.pickands_rho(ts, sel.chosen_k)
check(
    "pickands tail index near 2 at the chosen threshold",
    rho_hat.rho is not None and 1.4 < rho_hat.rho < 2.6,
    f"k={sel.chosen_k}, rho={rho_hat.rho:.3f}",
)
ci = rho_hat.confidence_interval(0.95)
check("tail interval has positive width", ci is not None and ci[1] > ci[0])

# degenerate spacings flag in-band instead of raising
flat = ev.Dataset.from_xy([1.0] * 8, [2.0] * 8)
flagged = ev.pickands_rho(flat.transform([1.0]), 1)
check("ties flag the estimate", flagged.failed and flagged.rho is None)

# the FDH moment-law oracle
want = math.sqrt(math.pi) / (2 * math.sqrt(5000))
check("fdh bias oracle", abs(ev.fdh_moment_oracle(1, 5000, 2.0, 1.0) - want) < 1e-12)

# seeded simulation is deterministic and matches the oracle's magnitude
cells = ev.simulate("triangle", 2000, 40, [0.5, 1.0], ["fdh", "knownrho:2"], k="grid:1", seed=9)
again = ev.simulate("triangle", 2000, 40, [0.5, 1.0], ["fdh", "knownrho:2"], k="grid:1", seed=9)
check("simulation is reproducible", str(cells) == str(again))
fdh_cell = next(c for c in cells if c["estimator"] == "fdh" and c["x"] == 1.0)
oracle = ev.fdh_moment_oracle(1, 2000, 2.0, 1.0)
check(
    "fdh bias magnitude matches the oracle",
    abs(-fdh_cell["bias"] - oracle) < 3 * math.sqrt(fdh_cell["mse"] / 40),
    f"bias={fdh_cell['bias']:.5f}, oracle={-oracle:.5f}",
)

# outlier injection moves the FDH value but not the robust frontier much
ds = ev.gen_uniform_triangle(500, 3)
spiked = ds.with_outlier([0.5], 10.0)
ts0, ts1 = ds.transform([1.0]), spiked.transform([1.0])
check("outlier captures the FDH value", ts1.fdh() == 10.0)
r0 = ev.robust_frontier(ts0, 1).value
r1 = ev.robust_frontier(ts1, 1).value
check(
    "robust frontier ignores a single outlier",
    abs(r1 - r0) <= ts0.fdh() - r0 + 1e-12,
    f"moved {abs(r1 - r0):.4f}",
)

print()
if failures:
    print(f"{failures} check(s) failed")
    sys.exit(1)
print("all checks passed")
