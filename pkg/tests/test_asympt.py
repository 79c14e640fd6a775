import math

import numpy as np
import pytest

from fractal_spectra import (
    AmplitudeEstimate,
    ValidationError,
    WindowTooNarrow,
    compute_meta,
    estimate_constant_s,
    estimate_periodic_s,
    lattice_magnitudes,
    period_doubling_check,
    series_from_arrays,
    validate_params,
)

NU6 = math.log(6.0)


def nonarith_meta():
    return compute_meta(validate_params(
        {"a": (0.5, 0.5), "d": (-0.5, 1 / 3), "beta": (0.0, 0.5)}))


def synthetic_series(meta, side, amps, k_range=range(4, 10)):
    """Counting data sitting exactly on the phase lattice with n ~ amp |lam|^{D/2}.

    For the reference weight nu * D_half = ln 2, so |lam|^{D/2} = 2^(2k+phase+shift)
    and rounded counts stay within 0.5 of the target amplitude line.
    """
    shift = 1.0 if side == "-" else 0.0
    mags, counts = [], []
    for phase, amp in amps.items():
        for k in k_range:
            e = 2 * k + phase + shift
            mags.append(math.exp(meta.nu * e))
            counts.append(float(round(amp * 2.0 ** e)))
    order = np.argsort(mags)
    mags = np.asarray(mags)[order]
    counts = np.asarray(counts)[order]
    sign = -1.0 if side == "-" else 1.0
    return series_from_arrays(sign * mags, counts, meta)


# ---------------------------------------------------------------------------
# lattice magnitudes


def test_lattice_magnitudes_positive_ray():
    got = lattice_magnitudes(NU6, (1.0, 6.0 ** 8), 0.0, "+")
    np.testing.assert_allclose(got, 6.0 ** np.array([0, 2, 4, 6, 8]), rtol=1e-12)


def test_lattice_magnitudes_negative_ray_shifts_one_unit():
    got = lattice_magnitudes(NU6, (1.0, 6.0 ** 8), 0.0, "-")
    np.testing.assert_allclose(got, 6.0 ** np.array([1, 3, 5, 7]), rtol=1e-12)


def test_lattice_magnitudes_fractional_phase():
    got = lattice_magnitudes(NU6, (1.0, 6.0 ** 8), 0.5, "+")
    np.testing.assert_allclose(got, 6.0 ** np.array([0.5, 2.5, 4.5, 6.5]), rtol=1e-12)


def test_lattice_magnitudes_validation():
    with pytest.raises(ValidationError):
        lattice_magnitudes(NU6, (0.0, 10.0), 0.0)
    with pytest.raises(ValidationError):
        lattice_magnitudes(NU6, (10.0, 2.0), 0.0)
    with pytest.raises(ValidationError):
        lattice_magnitudes(0.0, (1.0, 10.0), 0.0)


# ---------------------------------------------------------------------------
# periodic amplitude estimation


def test_periodic_estimate_recovers_amplitudes(ref_meta):
    amps = {0.0: 0.32, 1.0: 0.60}
    series = synthetic_series(ref_meta, "+", amps)
    est = estimate_periodic_s(series, (0.0, 1.0))
    assert est.mode == "periodic"
    assert est.side == "+"
    for phase, amp in amps.items():
        b = est.bins[0 if phase == 0.0 else 1]
        assert b.phase == phase
        assert len(b.ratios) == 6
        assert abs(b.mean - amp) < 1e-3
        assert b.spread < 5e-3
        assert abs(est.value(phase) - b.mean) < 1e-15


def test_periodic_estimate_snaps_perturbed_magnitudes(ref_meta):
    amps = {0.0: 0.32, 1.0: 0.60}
    clean = synthetic_series(ref_meta, "+", amps)
    wobbled = series_from_arrays(clean.lam * (1.0 + 3e-6), clean.counts.astype(float),
                                 ref_meta)
    a = estimate_periodic_s(clean, (0.0, 1.0))
    b = estimate_periodic_s(wobbled, (0.0, 1.0))
    for ba, bb in zip(a.bins, b.bins):
        np.testing.assert_array_equal(ba.ratios, bb.ratios)
        np.testing.assert_array_equal(ba.magnitudes, bb.magnitudes)


def test_periodic_estimate_scale_consistency(ref_meta):
    # rescaling by one lattice period, n by the matching power of |lam|^{D/2},
    # leaves every ratio unchanged
    base = synthetic_series(ref_meta, "+", {0.0: 0.32, 1.0: 0.60})
    scaled = series_from_arrays(base.lam * 36.0, base.counts * 4.0, ref_meta)
    a = estimate_periodic_s(base, (0.0, 1.0))
    b = estimate_periodic_s(scaled, (0.0, 1.0))
    for ba, bb in zip(a.bins, b.bins):
        np.testing.assert_allclose(ba.ratios, bb.ratios, rtol=1e-12)


def test_periodic_estimate_window_errors(ref_meta):
    series = synthetic_series(ref_meta, "+", {0.0: 0.32, 1.0: 0.60})
    with pytest.raises(WindowTooNarrow):
        estimate_periodic_s(series, (0.0, 1.0), window=(6.0 ** 8, 6.0 ** 11))
    with pytest.raises(WindowTooNarrow):
        estimate_periodic_s(series, (0.37,))
    with pytest.raises(WindowTooNarrow):
        estimate_periodic_s(series, (0.0,), min_samples=7)
    with pytest.raises(ValidationError):
        estimate_periodic_s(series, (0.0,), window=(10.0, 1.0))


def test_periodic_estimate_rejects_nonarithmetic_weight():
    meta = nonarith_meta()
    assert meta.nu is None
    mags = np.geomspace(1e2, 1e8, 30)
    counts = np.rint(0.5 * mags ** meta.D_half)
    series = series_from_arrays(mags, counts, meta)
    with pytest.raises(ValidationError):
        estimate_periodic_s(series, (0.0,))


def test_value_requires_matching_bin(ref_meta):
    est = estimate_periodic_s(synthetic_series(ref_meta, "+", {0.0: 0.32, 1.0: 0.60}),
                              (0.0, 1.0))
    assert isinstance(est, AmplitudeEstimate)
    with pytest.raises(ValidationError):
        est.value(0.37)


# ---------------------------------------------------------------------------
# pooled amplitude estimation


def test_constant_estimate_pools_top_decade():
    meta = nonarith_meta()
    mags = np.geomspace(1e2, 1e6, 41)
    counts = np.rint(0.5 * mags ** meta.D_half)
    series = series_from_arrays(mags, counts, meta)
    est = estimate_constant_s(series)
    assert est.mode == "constant"
    b = est.bins[0]
    assert b.phase is None
    assert np.all(b.magnitudes >= 1e5 * (1.0 - 1e-12))
    assert abs(b.mean - 0.5) < 0.02
    est_wide = estimate_constant_s(series, decades=2.0)
    assert len(est_wide.bins[0].ratios) > len(b.ratios)


def test_constant_estimate_errors():
    meta = nonarith_meta()
    mags = np.array([1e2, 1e3, 1e6])
    counts = np.rint(0.5 * mags ** meta.D_half)
    series = series_from_arrays(mags, counts, meta)
    with pytest.raises(WindowTooNarrow):
        estimate_constant_s(series)
    with pytest.raises(ValidationError):
        estimate_constant_s(series, decades=0.0)


# ---------------------------------------------------------------------------
# cross-ray comparison


def test_period_doubling_report(ref_meta):
    pos = estimate_periodic_s(
        synthetic_series(ref_meta, "+", {0.0: 0.32, 1.0: 0.60}), (0.0, 1.0))
    neg = estimate_periodic_s(
        synthetic_series(ref_meta, "-", {0.0: 0.33, 1.0: 0.58}), (0.0, 1.0))
    report = period_doubling_check(pos, neg)
    assert report.phases == (0.0, 1.0)
    assert all(a < 0.15 for a in report.agreement)
    assert abs(report.agreement[0] - abs(0.32 - 0.33) / 0.33) < 5e-3
    assert report.pos_disjoint
    assert report.neg_disjoint


def test_period_doubling_validation(ref_meta):
    pos = estimate_periodic_s(
        synthetic_series(ref_meta, "+", {0.0: 0.32, 1.0: 0.60}), (0.0, 1.0))
    meta = nonarith_meta()
    mags = np.geomspace(1e2, 1e6, 41)
    const = estimate_constant_s(
        series_from_arrays(mags, np.rint(0.5 * mags ** meta.D_half), meta))
    with pytest.raises(ValidationError):
        period_doubling_check(pos, const)
    with pytest.raises(ValidationError):
        period_doubling_check(pos, pos, phases=(0.0, 0.5))
