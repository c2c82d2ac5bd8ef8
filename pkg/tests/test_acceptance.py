"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The default sweep (1980 rows) runs twice in a session fixture; criteria 4,
5 and 7 read their measurements from it.
"""

import statistics
import time
from collections import defaultdict

import numpy as np
import pytest

from hybridplace import (
    BpsoConfig,
    CostParams,
    GaConfig,
    Placement,
    SbaGraph,
    bpso_solve,
    density_percent,
    evaluate_cost,
    exact_solve,
    exact_solve_bnb,
    ga_solve,
    generate_instance,
    greedy_solve,
    hq_from_fraction,
    is_feasible,
    preset,
    read_graph,
    table5_specs,
    total_hosting,
    write_graph,
)
from hybridplace.bench import CSV_COLUMNS, SweepConfig, read_csv, run_sweep, summarize
from hybridplace.cli import main
from hybridplace.instances import TABLE5_DENSITY

from helpers import criterion, random_graph
from oracle import brute_cost

ABS_TOL = 1e-9
FRACTIONS = [round(0.1 * k, 1) for k in range(1, 10)]
PARAMS = CostParams(40, 20, 10)


@pytest.fixture(scope="session")
def default_sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    first, second = out / "first.csv", out / "second.csv"
    assert main(["bench", "--config", "default", "--out", str(first)]) == 0
    assert main(["bench", "--config", "default", "--out", str(second)]) == 0
    return first, second, read_csv(first)


def test_c1_worked_example_golden_value(bank_graph):
    cost = evaluate_cost(bank_graph, Placement((1, 1, 0, 0, 0)), CostParams(30, 20, 5))
    criterion("C1 worked example = 2285", abs(cost.total - 2285) <= ABS_TOL, f"total={cost.total!r}")


def test_c2_table5_fidelity():
    started = time.perf_counter()
    problems = []
    for spec in table5_specs():
        g = generate_instance(spec)
        stats = (g.n, len(g.edges), total_hosting(g))
        if stats != (spec.nodes, spec.edges, spec.total_hosting):
            problems.append(f"{spec.name} stats {stats}")
        if round(density_percent(g), -1) != TABLE5_DENSITY[spec.name]:
            problems.append(f"{spec.name} density {density_percent(g):.1f}")
    elapsed = time.perf_counter() - started
    criterion("C2 Table 5 fidelity (<1 s)", not problems and elapsed < 1.0,
              f"elapsed={elapsed:.3f}s problems={problems}")


def test_c3_exact_solver_scale():
    slowest, mismatches = 0.0, []
    for spec in table5_specs():
        g = generate_instance(spec)
        assert g.n <= 20
        for f in FRACTIONS:
            params = PARAMS.with_hq(hq_from_fraction(g, f))
            full = exact_solve(g, params)
            bnb = exact_solve_bnb(g, params)
            slowest = max(slowest, full.wall_time)
            if full.placement != bnb.placement or full.total != bnb.total:
                mismatches.append((spec.name, f))
    criterion("C3 exact <60 s per cell, bnb identical", slowest < 60 and not mismatches,
              f"slowest cell={slowest:.2f}s mismatches={mismatches}")


def test_c4a_oracle_dominance():
    rng = np.random.default_rng(2024)
    violations = []
    for i in range(100):
        g = random_graph(rng, int(rng.integers(5, 16)))
        params = PARAMS.with_hq(hq_from_fraction(g, float(rng.uniform(0, 1))))
        optimum = exact_solve(g, params).total
        for result in (bpso_solve(g, params, BpsoConfig(seed=i)), ga_solve(g, params, GaConfig(seed=i)),
                       greedy_solve(g, params)):
            if not (result.feasible and is_feasible(g, result.placement, params)):
                violations.append((i, result.solver_name, "infeasible"))
            if result.total < optimum - ABS_TOL:
                violations.append((i, result.solver_name, result.total, optimum))
    criterion("C4a oracle dominance on 100 random instances", not violations, f"violations={violations[:5]}")


def test_c4b_bpso_close_to_optimal(default_sweep):
    rows = default_sweep[2]
    optimum = {(r.instance, r.hq_fraction): r.total for r in rows if r.solver == "exact"}
    bpso = defaultdict(list)
    for r in rows:
        if r.solver == "bpso":
            bpso[(r.instance, r.hq_fraction)].append(r.total)
    assert len(bpso) == 90 and all(len(v) == 10 for v in bpso.values())
    close = sum(statistics.median(v) <= 1.10 * optimum[k] for k, v in bpso.items())
    criterion("C4b BPSO within 10% of optimum on >=90% of cells", close / len(bpso) >= 0.90,
              f"{close}/{len(bpso)} cells")


def test_c5_timing_ordering(default_sweep):
    rows = default_sweep[2]
    times = defaultdict(list)
    for r in rows:
        times[(r.instance, r.solver)].append(r.wall_time)
    details, ok = [], True
    for spec in table5_specs():
        if spec.nodes < 15:
            continue
        bpso = statistics.median(times[(spec.name, "bpso")])
        exact = statistics.median(times[(spec.name, "exact")])
        ga = statistics.median(times[(spec.name, "ga")])
        ok &= bpso < exact and bpso < ga
        details.append(f"{spec.name}: bpso={bpso * 1e3:.1f}ms exact={exact * 1e3:.1f}ms ga={ga * 1e3:.1f}ms")
    criterion("C5 median BPSO time < exact and < GA (n>=15)", ok, "; ".join(details))


def test_c6_invariant_suites(tmp_path):
    rng = np.random.default_rng(6)
    failures = []

    # decomposition identity and XOR form of the hybrid term
    for _ in range(200):
        g = random_graph(rng, int(rng.integers(2, 12)))
        p = Placement.from_array(rng.integers(0, 2, g.n))
        params = CostParams(*rng.uniform(0, 50, 3))
        c = evaluate_cost(g, p, params)
        if c.total != c.hosting + c.public_comm + c.hybrid_comm:
            failures.append("decomposition")
        xor = params.beta1 * sum(e.rate * (p.bits[e.a] ^ p.bits[e.b]) for e in g.edges)
        if abs(c.hybrid_comm - xor) > 1e-9 * max(1, xor):
            failures.append("xor")
        ref = brute_cost(list(g.hosting), [(e.a, e.b, e.rate) for e in g.edges], p.bits,
                         params.alpha, params.beta1, params.beta2)
        if abs(c.total - ref) > 1e-9 * max(1, ref):
            failures.append("oracle")

    # hq monotonicity of the optimum and argmin invariance under price scaling
    for name in ("G1", "G5", "G10"):
        g = generate_instance(preset(name))
        totals = []
        for f in FRACTIONS:
            params = PARAMS.with_hq(hq_from_fraction(g, f))
            base = exact_solve(g, params)
            totals.append(base.total)
            for k in (0.5, 2, 10):
                if exact_solve(g, params.scaled(k)).placement != base.placement:
                    failures.append(f"argmin {name} {f} k={k}")
        if any(b < a - ABS_TOL for a, b in zip(totals, totals[1:])):
            failures.append(f"monotone {name}")

    # gbest monotonicity and velocity clamping along a BPSO run
    g = generate_instance(preset("G9"))
    params = PARAMS.with_hq(hq_from_fraction(g, 0.5))
    trace = []

    def watch(it, x, v, gbest):
        if np.abs(v).max() > 4.0:
            failures.append("velocity clamp")
        trace.append(gbest)

    bpso_solve(g, params, BpsoConfig(seed=9), callback=watch)
    if any(b > a for a, b in zip(trace, trace[1:])):
        failures.append("gbest monotone")

    # seed determinism
    for solve, cfg in ((bpso_solve, BpsoConfig(seed=17)), (ga_solve, GaConfig(seed=17))):
        a, b = solve(g, params, cfg), solve(g, params, cfg)
        if a.placement != b.placement or a.breakdown != b.breakdown or a.evaluations != b.evaluations:
            failures.append(f"determinism {a.solver_name}")

    # serialization round trips, both formats
    for spec in table5_specs():
        g = generate_instance(spec)
        for suffix in (".json", ".txt"):
            path = tmp_path / f"{spec.name}{suffix}"
            write_graph(g, path)
            back = read_graph(path)
            if back != g or back.nodes != g.nodes:
                failures.append(f"round trip {spec.name}{suffix}")

    criterion("C6 invariant suites", not failures, f"failures={sorted(set(failures))}")


def test_c7_end_to_end_sweep(default_sweep, capsys):
    first, second, rows = default_sweep
    expected = SweepConfig.default().cell_count()
    failed = [r for r in rows if r.error]

    wall = CSV_COLUMNS.index("wall_time")

    def strip(path):
        return [line.split(",")[:wall] + line.split(",")[wall + 1:] for line in path.read_text().splitlines()]

    identical = strip(first) == strip(second)

    capsys.readouterr()
    assert main(["report", str(first)]) == 0
    report = capsys.readouterr().out
    solvers = summarize(rows).solvers
    listed = all(name in report for name in ("exact", "bpso", "ga", "greedy"))
    agg_ok = list(solvers.solver) == ["exact", "bpso", "ga", "greedy"] and (solvers.mean_gap >= -1e-9).all()
    gaps_ok = all(r.gap_to_optimal >= -1e-9 for r in rows)
    ok = len(rows) == expected == 1980 and not failed and identical and listed and agg_ok and gaps_ok
    criterion("C7 default sweep end to end", ok,
              f"rows={len(rows)} expected={expected} failed={len(failed)} identical_modulo_time={identical}")
