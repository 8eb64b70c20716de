import numpy as np
import pytest

from fractal_xcorr import BenchmarkConfig, InputError, run_benchmark, stability_sweep
from fractal_xcorr.benchmark import _cell_seed


SMALL = BenchmarkConfig(
    lengths=(500,), cross_corrs=(0.9,), qs=(2.0, 4.0), replications=10,
    dcca_n_min=(10,), dmca_s_max=(20,), master_seed=0,
)


class TestCellSeed:
    def test_distinct_across_grid(self):
        seeds = {
            _cell_seed(0, n, rho, rep)
            for n in (500, 1000, 5000)
            for rho in (0.1, 0.5, 0.9)
            for rep in range(50)
        }
        assert len(seeds) == 3 * 3 * 50

    def test_consecutive_within_cell(self):
        s0 = _cell_seed(7, 500, 0.9, 0)
        assert _cell_seed(7, 500, 0.9, 5) == s0 + 5

    def test_nonnegative_64bit(self):
        s = _cell_seed(2**63, 100_000, -0.999, 10**6)
        assert 0 <= s < 2**63


class TestRunBenchmark:
    def test_report_grid_and_mse_identity(self):
        reports = run_benchmark(SMALL)
        keys = {(r.method, r.q, r.range_param) for r in reports}
        assert keys == {("DMCA", 2.0, 20), ("DMCA", 4.0, 20),
                        ("DCCA", 2.0, 10), ("DCCA", 4.0, 10)}
        for r in reports:
            assert r.mse == pytest.approx(r.bias**2 + r.sd**2, rel=1e-12)
            assert 0 < r.n_effective <= 10

    def test_determinism(self):
        a = run_benchmark(SMALL)
        b = run_benchmark(SMALL)
        assert [(r.bias, r.sd) for r in a] == [(r.bias, r.sd) for r in b]

    def test_master_seed_changes_estimates(self):
        other = BenchmarkConfig(
            lengths=(500,), cross_corrs=(0.9,), qs=(2.0,), replications=10,
            dcca_n_min=(10,), dmca_s_max=(20,), master_seed=1,
        )
        base = BenchmarkConfig(
            lengths=(500,), cross_corrs=(0.9,), qs=(2.0,), replications=10,
            dcca_n_min=(10,), dmca_s_max=(20,), master_seed=0,
        )
        assert run_benchmark(base)[0].bias != run_benchmark(other)[0].bias

    def test_infeasible_dcca_param_dropped(self):
        # n_min=100 cannot anchor a fit range ending at N/5=100 for N=500
        cfg = BenchmarkConfig(
            lengths=(500,), cross_corrs=(0.9,), qs=(2.0,), replications=10,
            dcca_n_min=(10, 100), dmca_s_max=(20,), master_seed=0,
        )
        params = {r.range_param for r in run_benchmark(cfg) if r.method == "DCCA"}
        assert params == {10}

    def test_progress_callback(self):
        seen = []
        run_benchmark(SMALL, progress=seen.append)
        assert len(seen) == 4

    def test_replications_floor(self):
        with pytest.raises(InputError):
            BenchmarkConfig(replications=5)

    def test_to_dict_round_trip(self):
        rep = run_benchmark(SMALL)[0]
        d = rep.to_dict()
        assert d["method"] == rep.method and d["mse"] == rep.mse


class TestStabilitySweep:
    def test_record_structure(self):
        cfg = BenchmarkConfig(
            lengths=(500,), cross_corrs=(0.5, 0.9), qs=(2.0,), replications=10,
            dcca_n_min=(10,), dmca_s_max=(20,), master_seed=0,
        )
        records = stability_sweep((500, 1000), cfg)
        assert {(r["method"], r["N"]) for r in records} == {
            ("DMCA", 500), ("DCCA", 500), ("DMCA", 1000), ("DCCA", 1000)}
        for r in records:
            assert np.isfinite(r["mean_h_rho"])
            assert r["n_effective"] == 10
