import math

import numpy as np
import pytest

from billiardlab.billiard import (
    WavevectorSpectrum,
    mode_intensities_at,
    point_scatterer_spectrum,
    sector_eigenvalues,
)
from billiardlab.errors import InvalidArgumentError

SCATTERER_XY = (0.64, 0.40)  # one-disk setup position, metres


@pytest.fixture(scope="module")
def base(sector):
    # truncation well above the reporting edge k_max = 30
    return sector_eigenvalues(sector, 60.0)


@pytest.fixture(scope="module")
def intensities(sector, base):
    return mode_intensities_at(sector, base, *SCATTERER_XY)


def test_interlacing_exact(sector, base, intensities):
    k_max = 30.0
    perturbed = point_scatterer_spectrum(base, intensities, coupling=5.0, k_max=k_max)
    poles = base.values[intensities > 0]
    idx = np.searchsorted(poles, perturbed.values)
    # each perturbed level falls strictly between two consecutive active poles
    assert np.all(idx >= 1)
    lower = poles[idx - 1]
    upper = poles[np.minimum(idx, poles.size - 1)]
    assert np.all(perturbed.values > lower)
    assert np.all(perturbed.values < upper)
    # and no two perturbed levels share a gap
    assert np.all(np.diff(idx) >= 1)


def test_weak_coupling_limit_returns_base(sector, base, intensities):
    k_max = 25.0
    # 1/coupling -> +-inf: roots hug the base eigenvalues
    perturbed = point_scatterer_spectrum(base, intensities, coupling=1e-9, k_max=k_max)
    sel = base.values[base.values <= k_max]
    matched = perturbed.values[np.argmin(np.abs(perturbed.values[:, None] - sel), axis=0)]
    np.testing.assert_allclose(matched, sel, rtol=1e-5)


def test_strong_coupling_limit_roots_of_f(sector, base, intensities):
    # coupling -> inf handled as 1/coupling = 0: perturbed levels solve F = 0
    k_max = 25.0
    perturbed = point_scatterer_spectrum(base, intensities, math.inf, k_max)
    E = base.values**2
    for k in perturbed.values[:10]:
        e = k * k
        f = np.sum(intensities * (1.0 / (e - E) + E / (1.0 + E * E)))
        assert abs(f) < 1e-6 * np.sum(intensities)


def test_unaffected_modes_survive(sector, base):
    w = np.asarray(mode_intensities_at(sector, base, *SCATTERER_XY)).copy()
    w[10] = 0.0  # kill the coupling of one mode by hand
    perturbed = point_scatterer_spectrum(base, w, coupling=3.0, k_max=30.0)
    assert np.min(np.abs(perturbed.values - base.values[10])) < 1e-12


def test_truncation_convergence(sector):
    # the subtraction kernel makes the pole sum converge ~ 1/truncation:
    # doubling the truncation shifts the roots by a small fraction of the
    # mean spacing, and doubling again shrinks the shift by ~4x
    k_max = 20.0
    shifts = []
    previous = None
    for factor in (2, 4, 8):
        spec = sector_eigenvalues(sector, factor * k_max)
        w = mode_intensities_at(sector, spec, *SCATTERER_XY)
        p = point_scatterer_spectrum(spec, w, coupling=2.0, k_max=k_max).values
        if previous is not None:
            assert p.size == previous.size
            shifts.append(np.max(np.abs(p - previous)))
        previous = p
    mean_spacing = float(np.diff(previous).mean())
    assert shifts[0] < 0.05 * mean_spacing
    assert shifts[1] < 0.5 * shifts[0]


def test_zero_coupling_rejected(base, intensities):
    with pytest.raises(InvalidArgumentError):
        point_scatterer_spectrum(base, intensities, coupling=0.0, k_max=10.0)


def test_unsorted_base_rejected(intensities, base):
    bad_values = base.values.copy()
    bad_values[3], bad_values[4] = bad_values[4], bad_values[3]
    with pytest.raises(InvalidArgumentError):
        point_scatterer_spectrum(bad_values, intensities, 1.0, 10.0)


def test_mismatched_intensities_rejected(base, intensities):
    with pytest.raises(InvalidArgumentError):
        point_scatterer_spectrum(base, intensities[:-1], 1.0, 10.0)


def test_semi_poisson_statistics_with_tuned_coupling(sector):
    # spacing distribution of the perturbed spectrum sits closer to the
    # semi-Poisson law than to Poisson or Wigner (KS on ~300 levels)
    from billiardlab.reference import spacing_ks
    from billiardlab.unfolding import UnfoldedSpectrum, unfold
    from billiardlab.billiard import fit_weyl_constant

    k_max = 112.0
    base = sector_eigenvalues(sector, 2 * k_max)
    w = mode_intensities_at(sector, base, *SCATTERER_XY)
    perturbed = point_scatterer_spectrum(base, w, coupling=math.inf, k_max=k_max)
    assert len(perturbed) >= 300
    params = fit_weyl_constant(perturbed.values, sector.area, sector.perimeter)
    u = unfold(perturbed, params)
    ks = {m: spacing_ks(u, m) for m in ("poisson", "goe", "semi-poisson")}
    assert ks["semi-poisson"] < ks["poisson"]
    assert ks["semi-poisson"] < ks["goe"]
