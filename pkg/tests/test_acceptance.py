"""Acceptance criteria, one test per criterion.

Each test prints a single pass/fail line (run pytest with -s or look at
captured output); the assertions carry the stated tolerances.  Heavy runs
are shared through module-scoped fixtures.
"""

import numpy as np
import pytest

from ptsm.experiments import (
    check_lemma2,
    check_mass_matrix,
    check_skew_symmetry,
    check_tbg_properties,
    example_config,
    run_compare,
    run_single,
    tbg_surface_bound,
    theorem1_flow_stats,
)


def _sustained(log, arrays, t_from):
    m = log.t >= t_from - 1e-12
    return max(float(np.max(np.abs(a[m]))) for a in arrays)


def _runs(name, **overrides):
    cfg = example_config(name).with_overrides(**overrides)
    return cfg, [run_single(cfg, seed, out_dir=None, make_plots=False) for seed in cfg.seeds]


@pytest.fixture(scope="module")
def ex1_runs():
    return _runs("example1")


@pytest.fixture(scope="module")
def ex2a_runs():
    return _runs("example2a")


@pytest.fixture(scope="module")
def ex2b_runs():
    return _runs("example2b")


@pytest.fixture(scope="module")
def ex3_runs():
    return _runs("example3")


def test_criterion_1_second_order_reproduction(ex1_runs):
    cfg, runs = ex1_runs
    assert len(runs) == 10
    worst = 0.0
    for r in runs:
        assert r.log.diverged_at is None
        level = _sustained(r.log, (r.log.q, r.log.qd), 10.0)
        worst = max(worst, level)
        assert level < 1e-2
        # the sliding vector is at the origin by then as well
        assert _sustained(r.log, (r.log.s,), 10.0) < 1e-2
    print(f"\n[criterion 1] PASS: 10 runs, sup ||xi||,||eta|| on [10,15] = "
          f"{worst:.2e} < 1e-2")


def test_criterion_2_manipulator_reproduction(ex2a_runs, ex2b_runs):
    worsts = {}
    for (cfg, runs) in (ex2a_runs, ex2b_runs):
        Tf = cfg.Ts + cfg.Tc
        worst = 0.0
        for r in runs:
            assert r.log.diverged_at is None
            level = _sustained(r.log, (r.log.e,), Tf)
            worst = max(worst, level)
            assert level < 1e-2
        worsts[cfg.name] = (Tf, worst)
    print(f"\n[criterion 2] PASS: sup ||e|| after Tf: "
          + ", ".join(f"{k} (Tf={v[0]:g}s) {v[1]:.2e}" for k, v in worsts.items())
          + " < 1e-2, 5 seeds each")


def test_criterion_3_tbg_surface_bound(ex3_runs):
    cfg, runs = ex3_runs
    ratios = []
    levels = []
    for r in runs:
        assert r.log.diverged_at is None
        i_tc = int(np.argmin(np.abs(r.log.t - cfg.Tc)))
        s_tc = float(np.linalg.norm(r.log.s[i_tc]))
        bound = tbg_surface_bound(r.log, cfg.eps)
        assert s_tc <= 1.05 * bound
        ratios.append(s_tc / bound if bound > 0 else 0.0)
        level = _sustained(r.log, (r.log.e,), 10.0)
        assert np.isfinite(level)
        levels.append(level)
    print(f"\n[criterion 3] PASS: ||s(Tc)||/bound max = {max(ratios):.3f} <= 1.05; "
          f"post-10s error levels (bounded, reported): "
          + ", ".join(f"{v:.3g}" for v in levels))


@pytest.fixture(scope="module")
def compare_report(tmp_path_factory):
    return run_compare(tmp_path_factory.mktemp("compare"), seeds=(1, 2, 3),
                       make_plots=False)


def test_criterion_4_energy_ordering(compare_report):
    for row in compare_report["rows"]:
        assert row["tbg"] < row["ptsm"]
    rows = compare_report["rows"]
    print("\n[criterion 4] PASS: E_tbg < E_ptsm on every matched seed; "
          + "; ".join(f"seed {r['seed']}: ptsm={r['ptsm']:.0f} tbg={r['tbg']:.0f} "
                      f"fixed={r['fixed']:.0f}" for r in rows))


def test_criterion_5_surface_flow_suite():
    stats = theorem1_flow_stats(n_starts=20, seed=123, x0_scale=1e4)
    assert stats["worst_x_at_Ts"] < 1e-3
    assert stats["worst_vdot_rel"] < 0.01
    print(f"\n[criterion 5] PASS: worst |x(Ts)| = {stats['worst_x_at_Ts']:.2e} < 1e-3, "
          f"worst Lyapunov-rate deviation = {stats['worst_vdot_rel']:.2e} < 1e-2 "
          f"(Ts in {{1,4,10}} x gamma in {{0.3,0.5,0.7}} x 20 starts)")


def test_criterion_6_fixed_time_settling():
    cfg = example_config("fixedtime")
    assert cfg.dist_bound == 0.0
    settlings = []
    for seed in cfg.seeds:
        r = run_single(cfg, seed, out_dir=None, make_plots=False)
        assert r.log.diverged_at is None
        t_settle = r.summary["results"]["settling_error_1e-2"]
        assert t_settle is not None and t_settle <= 11.0
        settlings.append(t_settle)
    print(f"\n[criterion 6] PASS: settling(error, 1e-2) = "
          + ", ".join(f"{t:.2f}" for t in settlings) + " s, all <= 11 s")


def test_criterion_7_mechanics_property_suite():
    skew = check_skew_symmetry(n_samples=1000)
    assert skew.passed, skew.detail
    spd = check_mass_matrix()
    assert spd.passed, spd.detail
    tbgp = check_tbg_properties()
    assert tbgp.passed, tbgp.detail
    lem = check_lemma2()
    assert lem.passed, lem.detail
    print("\n[criterion 7] PASS: " + "; ".join(p.detail for p in (skew, spd, tbgp, lem)))


def test_criterion_8_bitwise_determinism(tmp_path):
    cfg = example_config("example1").with_overrides(seeds=(1,))
    a = run_single(cfg, 1, out_dir=tmp_path / "a", make_plots=False)
    b = run_single(cfg, 1, out_dir=tmp_path / "b", make_plots=False)
    fa = (tmp_path / "a" / "run_1" / "series.csv").read_bytes()
    fb = (tmp_path / "b" / "run_1" / "series.csv").read_bytes()
    assert fa == fb
    assert a.log.meta["seed"] == b.log.meta["seed"]
    print(f"\n[criterion 8] PASS: repeated run produced bitwise-identical CSVs "
          f"({len(fa)} bytes)")
