import csv

import numpy as np
import pytest

from app.core.exceptions import DomainError
from app.schemas.sampler import SamplerConfig, SamplerVariant
from app.services.bench import bench_kernels, scaling_ratio
from app.services.bench.kernels import KernelTiming, bench_matrix, time_kernel
from app.services.bench.reports import KERNEL_COLUMNS


def test_bench_matrix_is_seeded():
    a = bench_matrix(4, 3, seed=9)
    b = bench_matrix(4, 3, seed=9)
    assert a.values.shape == (4, 5)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, bench_matrix(4, 3, seed=10).values)
    assert (a.values >= 0.01).all() and (a.values <= 10.0).all()


def test_time_kernel_needs_five_repetitions():
    with pytest.raises(DomainError):
        time_kernel(bench_matrix(3, 2), SamplerConfig(iterations=5), repetitions=4)


def test_time_kernel_is_positive():
    per_iteration = time_kernel(bench_matrix(3, 2), SamplerConfig(iterations=20), repetitions=5)
    assert per_iteration > 0.0


def test_bench_kernels_writes_csv(tmp_path):
    out = tmp_path / "kernels.csv"
    timings = bench_kernels(
        [4, 6], [3], 10, [SamplerVariant.TGS_PLUS, SamplerVariant.SGS_GENERIC], out=out
    )
    assert [(t.variant, t.P, t.M) for t in timings] == [
        ("TGS+", 4, 3), ("SGS-generic", 4, 3), ("TGS+", 6, 3), ("SGS-generic", 6, 3),
    ]
    assert all(t.repetitions == 5 and t.iterations == 10 for t in timings)

    with open(out, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == KERNEL_COLUMNS
    assert len(rows) == 5
    assert rows[1][:4] == ["TGS+", "4", "3", "10"]


def test_paired_cells(tmp_path):
    timings = bench_kernels([3, 5], [2, 4], 5, ["RGS+"], paired=True)
    assert [(t.P, t.M) for t in timings] == [(3, 2), (5, 4)]


def test_paired_lists_must_match():
    with pytest.raises(DomainError):
        bench_kernels([3, 5], [2], 5, ["RGS+"], paired=True)


def test_scaling_ratio_lookup():
    timings = [
        KernelTiming("TGS+", 2, 2, 10, 1.0e-6, 5),
        KernelTiming("TGS+", 4, 4, 10, 3.0e-6, 5),
    ]
    assert scaling_ratio(timings, "TGS+", (2, 2), (4, 4)) == pytest.approx(3.0)


@pytest.mark.slow
class TestComplexityScaling:
    """Per-iteration timing ratios when the problem size doubles."""

    def test_incremental_kernels_scale_linearly(self):
        variants = [SamplerVariant.TGS_PLUS, SamplerVariant.RGS_PLUS]
        timings = bench_kernels([200, 400], [200, 400], 1000, variants, paired=True, seed=1)
        for variant in variants:
            assert scaling_ratio(timings, variant.value, (200, 200), (400, 400)) <= 4.0

    def test_deterministic_scan_ignores_label_count(self):
        timings = bench_kernels([200, 400], [200], 1000, ["DGS+fwd"], seed=1)
        ratio = scaling_ratio(timings, "DGS+fwd", (200, 200), (400, 200))
        assert 0.5 <= ratio <= 2.0

    def test_generic_systematic_scan_grows_superlinearly(self):
        timings = bench_kernels([200, 400], [200, 400], 3, ["SGS-generic"], paired=True, seed=1)
        generic = scaling_ratio(timings, "SGS-generic", (200, 200), (400, 400))
        assert generic >= 6.0
