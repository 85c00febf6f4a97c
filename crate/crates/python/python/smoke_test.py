"""Smoke test for the noma_lab extension module.

Build and install with `maturin develop --release` (or `pip install .`) from
crates/python, then run `python python/smoke_test.py`.
"""

import math

import noma_lab


def main() -> None:
    qpsk = noma_lab.Constellation("qpsk")
    qam = noma_lab.Constellation("16qam")
    assert len(qpsk) == 4 and len(qam) == 16
    assert abs(qam.avg_energy - 1.0) < 1e-12
    assert qpsk.demap(qpsk.map_bits([1, 0])[0]) == [1, 0]

    assert abs(noma_lab.optimal_alpha(qpsk) - 0.8) < 1e-12
    assert abs(noma_lab.optimal_alpha(qam) - 16 / 17) < 1e-12
    assert noma_lab.dmin_qpsk(0.5) == 0.0
    assert noma_lab.dmin_16qam(0.9) == 0.0

    h = noma_lab.sample_channel(0.5, seed=7)
    assert h == noma_lab.sample_channel(0.5, seed=7)
    a, b = math.sqrt(0.8), math.sqrt(0.2)
    x1, x2 = qpsk.points[3], qpsk.points[1]
    r = tuple(row[0] * a * x1 + row[1] * b * x2 for row in h)
    ml = noma_lab.detect(r, h, 0.8, qpsk)
    sic = noma_lab.detect(r, h, 0.8, qpsk, detector="sic")
    assert (ml.x1_index, ml.x2_index) == (3, 1)
    assert ml.metric_evals == 16 and sic.metric_evals == 8

    curves = noma_lab.run_sweep(
        "qpsk", [1.0], [0.7, 0.8], [0, 10, 20, 30], seed=1, max_symbols=200_000, target_errors=200
    )
    assert [c.alpha for c in curves] == [0.7, 0.8]
    gap = noma_lab.snr_gap(curves[0], curves[1], 1e-2)
    print("gap at 1e-2:", gap)
    assert gap is not None and gap > 0
    csv = noma_lab.to_csv(curves)
    assert csv.splitlines()[0].startswith("constellation,detector,gamma,alpha")

    point = noma_lab.run_point("16qam", 1.0, 0.5, 40.0, max_symbols=20_000)
    assert point.ber_avg > 0.3 and point.tie_fraction > 0.5
    print("noma_lab smoke test passed")


if __name__ == "__main__":
    main()
