"""Exit criteria. Each test reports one PASS/FAIL line in the terminal summary."""
import json
import math
import time

import pytest

import test_properties as props
from oracles import brute_force_valid, direct_crosstalk_sum
from qrouter.cli import main
from qrouter.network import FeasibilityPolicy, StarNetwork, max_reach_km
from qrouter.photonics import MuxSpec, router_insertion_loss_db, worst_case_crosstalk_sum
from qrouter.transport import (DELIVERED, SimConfig, compare_to_analytic, run_partition,
                               run_tally, simulate_router_transit)
from qrouter.wiring import build_plan, verify_plan, wavelength_for

DEVICE = MuxSpec(40, 5.0, -25.0, -30.0)


def _cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, _ = capsys.readouterr()
    return code, out


def test_ac1_five_port_table(capsys, criterion):
    t0 = time.perf_counter()
    code, table = _cli(capsys, "plan", 5, "--format", "table")
    header, row_a = table.splitlines()[0].split(), table.splitlines()[1].split()
    cell_ab = row_a[1 + header.index("B") - 1]
    ok5, ok6 = verify_plan(build_plan(5)).valid, verify_plan(build_plan(6)).valid
    elapsed = time.perf_counter() - t0
    criterion("AC1 five-port table A-B = 2, N=5/N=6 verify, < 1 s",
              f"cell(A,B)={cell_ab}, valid5={ok5}, valid6={ok6}, {elapsed:.3f}s")
    assert code == 0 and cell_ab == "2" and ok5 and ok6
    assert elapsed < 1.0


def test_ac2_color_count_law(criterion):
    t0 = time.perf_counter()
    bad = []
    for n in range(2, 65):
        plan = build_plan(n)
        expected = n - 1 if n % 2 == 0 else n
        used = {wavelength_for(plan, u, v) for u, v in plan.pairs()}
        if not verify_plan(plan).valid or plan.color_count != expected or len(used) != expected:
            bad.append(n)
        if n <= 10:
            table = [[None if x < 0 else int(x) for x in row] for row in plan.table]
            if not brute_force_valid(table, expected):
                bad.append(n)
    elapsed = time.perf_counter() - t0
    criterion("AC2 color count n-1 (even) / n (odd) for n in 2..64, brute force n<=10, < 5 s",
              f"failures={bad}, {elapsed:.2f}s")
    assert not bad
    assert elapsed < 5.0


def test_ac3_router_loss(criterion):
    got = router_insertion_loss_db(DEVICE)
    criterion("AC3 router insertion loss for 5 dB MUX = 10 dB", f"{got!r} dB")
    assert got == 10.0


def test_ac4_crosstalk_bound(capsys, tmp_path, criterion):
    got = worst_case_crosstalk_sum(DEVICE, 10.0, 20)
    oracle = direct_crosstalk_sum(40, 20, -25.0, -30.0, 10.0)
    truncated = direct_crosstalk_sum(40, 20, -25.0, -30.0, 10.0, upper=39)
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"network": {"users": [50.0] * 40},
                               "policy": {"max_loss_budget_db": 40.0}}))
    _, out = _cli(capsys, "budget", cfg)
    ref = json.loads(out)["crosstalk_reference"]
    criterion("AC4 mid-band worst-case crosstalk = 5.7e-4 +/- 1e-7 (N=40, X=10 dB)",
              f"sum={got.worst_case_sum:.6e}, oracle={oracle:.6e}, "
              f"j<=N-1 variant={got.truncated_index_sum:.6e} (0.056%)")
    assert abs(got.worst_case_sum - 5.7e-4) <= 1e-7
    assert abs(got.worst_case_sum - oracle) <= 1e-7
    assert abs(ref["all_interferers"]["ratio"] - 5.7e-4) <= 1e-7
    assert abs(ref["index_below_channel_count"]["ratio"] - truncated) <= 1e-12
    assert abs(truncated - 5.6e-4) <= 1e-7


def test_ac5_reach(criterion):
    def reach(il):
        net = StarNetwork(build_plan(2), MuxSpec(40, il, -25, -30), (0.0, 0.0), 0.2)
        return max_reach_km(net, FeasibilityPolicy(20.0))

    five, one = reach(5.0), reach(1.0)
    criterion("AC5 reach: 25 km/arm (50 km end-to-end) at IL 5 dB; >= 90 km end-to-end at IL 1 dB",
              f"IL5 {five} km/arm, IL1 {2 * one} km end-to-end")
    assert abs(five - 25.0) <= 1e-9
    assert abs(2 * five - 50.0) <= 1e-9
    assert 2 * one >= 90.0 - 1e-9


def test_ac6_monte_carlo_vs_analytic(criterion):
    t0 = time.perf_counter()
    report = simulate_router_transit(SimConfig(trials=1_000_000, seed=20240607, spec=DEVICE))
    elapsed = time.perf_counter() - t0
    p = 0.1
    sigma = math.sqrt(p * (1 - p) / report.trials)
    z = (report.delivered_fraction - p) / sigma
    row = report.wrong_to_correct["leaked[+1]"]
    rel = abs(row["path_weighted"] - 1e-5) / 1e-5
    cmp = compare_to_analytic(report)
    criterion("AC6 1e6-trial delivered within 4 sigma of 0.1; weighted wrong/correct ratio = 1e-5 to 1e-12; < 30 s",
              f"delivered={report.delivered_fraction} (z={z:+.2f}), ratio rel err={rel:.1e}, "
              f"{elapsed:.1f}s")
    assert abs(z) < 4.0
    assert report.analytic_expected[DELIVERED] == pytest.approx(0.1, rel=1e-12)
    assert rel <= 1e-12
    assert cmp.passed
    assert elapsed < 30.0


def test_ac7_determinism(capsys, tmp_path, criterion):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps({"sim": {"trials": 300_000, "seed": 42}}))
    a, b = _cli(capsys, "simulate", cfg), _cli(capsys, "simulate", cfg)
    c = _cli(capsys, "simulate", cfg, "--workers", 4)
    sim = SimConfig(trials=300_000, seed=42, spec=DEVICE)
    single = run_partition(sim, 0, sim.trials)
    chunked = run_tally(sim, workers=4, chunk=12_345)
    criterion("AC7 identical simulate runs byte-identical; partitioned tallies == single worker",
              f"bytes equal={a == b == c}, tallies equal={single == chunked}")
    assert a[0] == 0
    assert a == b == c
    assert single == chunked


@pytest.mark.parametrize("prop", [
    props.test_routing_involution, props.test_budget_symmetry,
    props.test_tally_closure, props.test_db_composition,
], ids=["routing-involution", "budget-symmetry", "tally-closure", "db-composition"])
def test_ac8_property_suites(prop, criterion):
    criterion(f"AC8 property suite {prop.__name__[5:]} x 1000 cases",
              f"max_examples={prop._hypothesis_internal_use_settings.max_examples}")
    assert prop._hypothesis_internal_use_settings.max_examples >= 1000
    prop()
