"""Tests for LG modes, radial quadrature, decompositions, and far fields."""

import math

import numpy as np
import pytest

from oamsim.lgfield import (
    FarFieldImage,
    LgMode,
    decompose_plate_output,
    far_field,
    lg_amplitude,
    lg_overlap,
    peak_radius,
    radial_overlap,
    radial_overlaps,
)
from oamsim.plates import Spiral


def _analytic_radial_overlap(l, p):
    """Closed-form overlap of R_{l,p} with R_{0,0} via Gamma functions."""
    from math import exp, lgamma

    a = abs(l) / 2.0
    if p == 0:
        integral = exp(lgamma(a + 1.0))
    elif a == 0.0:
        integral = 0.0  # 1/Gamma(0): higher radial orders are orthogonal at l=0
    else:
        integral = exp(lgamma(a + 1.0) + lgamma(p + a) - lgamma(p + 1.0) - lgamma(a))
    return (-1.0) ** p * exp(0.5 * (lgamma(p + 1.0) - lgamma(p + abs(l) + 1.0))) * integral


def test_mode_validation():
    with pytest.raises(ValueError):
        LgMode(0, -1)
    with pytest.raises(ValueError):
        LgMode(0, 0, w0=0.0)


def test_lg_modes_orthonormal():
    for la, pa in ((0, 0), (1, 0), (1, 2), (-2, 1), (3, 3)):
        for lb, pb in ((0, 0), (1, 0), (1, 2), (-2, 1), (3, 3)):
            expected = 1.0 if (la, pa) == (lb, pb) else 0.0
            got = lg_overlap(LgMode(la, pa), LgMode(lb, pb))
            assert abs(got - expected) < 1e-12


def test_mixed_waist_rejected():
    with pytest.raises(ValueError):
        lg_overlap(LgMode(0, 0, 1.0), LgMode(0, 0, 2.0))


def test_lg_amplitude_normalized_numerically():
    mode = LgMode(2, 3)
    r = np.linspace(1e-6, 12.0, 20000)
    radial = np.abs(lg_amplitude(mode, r, 0.0)) ** 2 * r
    total = 2.0 * math.pi * np.trapezoid(radial, r)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_radial_overlaps_match_analytic():
    for l in (0, 1, 3, 5, 8):
        got = radial_overlaps(l, 50, order=200)
        for p in (0, 1, 5, 20, 50):
            assert got[p] == pytest.approx(_analytic_radial_overlap(l, p), abs=1e-13)


def test_radial_overlap_high_order_is_stable():
    # the scaled recurrence must stay finite far beyond the library root
    # finder's overflow point
    got = radial_overlaps(5, 300, order=1200)
    assert np.all(np.isfinite(got))
    assert got[300] == pytest.approx(_analytic_radial_overlap(5, 300), abs=1e-13)


def test_fundamental_decomposition_is_trivial():
    d = decompose_plate_output(Spiral(0.0), l_window=(-3, 3), p_max=5)
    assert d.entries[0][:2] == (0, 0)
    assert d.entries[0][3] == pytest.approx(1.0, abs=1e-12)
    assert d.count_at(0.87) == 1


def test_integer_spiral_decomposition_single_column():
    d = decompose_plate_output(Spiral(2.0), l_window=(-5, 5), p_max=10)
    assert all(l == 2 for l, *_ in d.entries)
    top = d.entries[0]
    assert top[:2] == (2, 0)
    assert top[3] == pytest.approx(_analytic_radial_overlap(2, 0) ** 2, abs=1e-12)


def test_half_integer_decomposition_count():
    d = decompose_plate_output(Spiral(0.5), l_window=(-60, 61), p_max=120)
    assert 9 <= d.count_at(0.87) <= 13


def test_decomposition_total_power_approaches_one():
    d = decompose_plate_output(Spiral(0.5), l_window=(-60, 61), p_max=200)
    total = float(d.cumulative_powers[-1]) + d.angular_tail
    # the radial index is truncated at p_max, so a small in-window radial
    # tail remains on top of the analytic angular tail
    assert 0.985 < total <= 1.0 + 1e-9


def test_decomposition_csv(tmp_path):
    d = decompose_plate_output(Spiral(0.5), l_window=(-5, 6), p_max=10)
    path = tmp_path / "decomp.csv"
    d.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "l,p,re,im,power,cumulative_power"
    assert len(lines) == len(d.entries) + 1


def test_count_at_raises_when_window_insufficient():
    d = decompose_plate_output(Spiral(0.5), l_window=(0, 1), p_max=2)
    assert d.incomplete
    with pytest.raises(ValueError):
        d.count_at(0.87)


def test_decomposition_validation():
    with pytest.raises(ValueError):
        decompose_plate_output(Spiral(0.5), input_mode=LgMode(1, 0))
    with pytest.raises(ValueError):
        decompose_plate_output(Spiral(0.5), l_window=(3, -3))


def test_far_field_validation():
    with pytest.raises(ValueError):
        far_field(Spiral(0.0), n=100)
    with pytest.raises(ValueError):
        far_field(Spiral(0.0), n=256, extent=2.0)


def test_far_field_gaussian_is_symmetric():
    image = far_field(Spiral(0.0), n=256)
    assert image.azimuthal_variance() < 1e-6
    assert image.on_axis_ratio() == pytest.approx(1.0, abs=1e-12)


def test_far_field_vortex_has_on_axis_null():
    image = far_field(Spiral(3.0), n=256)
    assert image.on_axis_ratio() < 1e-6
    assert image.azimuthal_variance() < 1e-3  # Cartesian sampling residue


def test_far_field_fractional_vortex_breaks_symmetry():
    image = far_field(Spiral(3.5), n=256)
    assert image.asymmetry_metric() > 1.5


def test_far_field_power_conserved():
    for ell in (0.0, 3.0, 3.5):
        image = far_field(Spiral(ell), n=256)
        assert float(np.sum(image.intensity)) == pytest.approx(1.0, abs=1e-6)


def test_peak_radius_fallback_for_on_axis_peak():
    image = far_field(Spiral(0.0), n=256)
    assert peak_radius(image.intensity) >= 1.0


def test_far_field_pgm_and_sidecar(tmp_path):
    image = far_field(Spiral(1.0), n=128, extent=8.0)
    pgm = tmp_path / "field.pgm"
    image.write_pgm(pgm)
    data = pgm.read_bytes()
    assert data.startswith(b"P5\n128 128\n65535\n")
    assert len(data) == len(b"P5\n128 128\n65535\n") + 128 * 128 * 2
    sidecar = tmp_path / "field.pgm.json"
    image.write_sidecar(sidecar)
    assert '"grid": 128' in sidecar.read_text()
