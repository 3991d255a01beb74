import numpy as np
import pytest

from graphhodge.cross_section import (
    boundary_condition,
    discrete_cross_section,
    spectral_gap,
    weyl_counting,
    weyl_fit,
)
from graphhodge.errors import BadResolutionError, EmptySpectrumError, InsufficientModesError

TWO_PI = 2.0 * np.pi


def fourier_eigenvalue(length, n, m):
    """Closed-form circle eigenvalue for Fourier index m."""
    h = length / n
    return (2.0 / h) * np.sin(np.pi * m / n)


@pytest.fixture(scope="module")
def spec64():
    return discrete_cross_section(TWO_PI, 64, edge="e")


def test_bad_resolution():
    with pytest.raises(BadResolutionError):
        discrete_cross_section(TWO_PI, 4)
    with pytest.raises(BadResolutionError):
        discrete_cross_section(-1.0, 16)


def test_smallest_positive_matches_fourier(spec64):
    lam1 = spec64.min_positive()
    assert lam1 == pytest.approx(fourier_eigenvalue(TWO_PI, 64, 1), rel=1e-12)
    # within 0.05% of the continuum value 1 at this resolution
    assert abs(lam1 - 1.0) < 5e-4


def test_kernel_dimension_four(spec64):
    assert spec64.kernel_dim == 4
    assert np.count_nonzero(spec64.lam_pos == 0.0) == 2
    assert weyl_counting(spec64, 0.0) == 4


def test_spectrum_exactly_symmetric(spec64):
    lams = spec64.all_eigenvalues()
    assert sorted(lams.tolist()) == sorted((-lams).tolist())


def test_sigma_identities(spec64):
    sig = spec64.sigma.toarray()
    n4 = sig.shape[0]
    assert np.max(np.abs(sig @ sig + np.eye(n4))) < 1e-12
    # skew-adjointness in the doubled mass inner product
    m = spec64.mass
    adj = np.diag(1.0 / m) @ sig.T @ np.diag(m)
    assert np.max(np.abs(adj + sig)) < 1e-12
    dhat = spec64.operator_matrix().toarray()
    anti = sig @ dhat + dhat @ sig
    assert np.max(np.abs(anti)) < 1e-12 * max(1.0, np.max(np.abs(dhat)))


def test_sigma_maps_kernel_zero_form_to_dt_slot(spec64):
    n = spec64.n_theta
    phi1 = spec64.vector(1)
    assert np.max(np.abs(phi1[n:])) < 1e-12          # pure constant 0-form
    image = spec64.sigma @ phi1
    assert np.max(np.abs(image[: 2 * n])) < 1e-12    # lands in the dt slot
    assert np.max(np.abs(image - spec64.vector(-1))) < 1e-12


def test_sigma_pairs_eigenvectors(spec64):
    dhat = spec64.operator_matrix()
    w = np.sqrt(spec64.mass)
    for k in (3, 7, 20):
        lam = spec64.eigenvalue(k)
        phi = w * spec64.vector(k)          # symmetrized coordinates
        sphi = spec64.sigma @ phi
        resid = dhat @ sphi + lam * sphi
        assert np.linalg.norm(resid) < 1e-10 * np.linalg.norm(phi)


def test_eigenvectors_orthonormal_in_mass(spec64):
    cols = [spec64.vector(k) for k in (1, 2, -1, -2, 3, 4, -3, 17)]
    v = np.column_stack(cols)
    gram = v.T @ (spec64.mass[:, None] * v)
    assert np.max(np.abs(gram - np.eye(len(cols)))) < 1e-10


def test_doubling_multiset(spec64):
    circ = np.sort(np.abs(spec64.circle_eigenvalues))
    doubled = np.sort(np.abs(spec64.all_eigenvalues()))
    assert np.allclose(doubled, np.sort(np.concatenate([circ, circ])), atol=1e-12)


def test_spectral_gap_two_edges():
    a = discrete_cross_section(TWO_PI, 64, edge="a")
    b = discrete_cross_section(np.pi, 64, edge="b")
    # the shorter circle has the larger gap, so the minimum comes from a
    assert b.min_positive() == pytest.approx(2.0, rel=1e-3)
    assert spectral_gap([a, b]) == pytest.approx(a.min_positive())
    with pytest.raises(EmptySpectrumError):
        spectral_gap([])


def test_counting_function_small_values(spec64):
    # spectrum starts 0 x4, then ~1 with multiplicity 4
    assert weyl_counting(spec64, 1.5) == 8
    lams = np.sort(spec64.lam_pos)
    assert np.allclose(lams[2:6], fourier_eigenvalue(TWO_PI, 64, 1), atol=1e-12)


def test_counting_monotone_right_continuous(spec64):
    grid = np.linspace(0.0, 5.0, 40)
    counts = [weyl_counting(spec64, x) for x in grid]
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    for lam in np.unique(spec64.lam_pos)[:5]:
        assert weyl_counting(spec64, lam + 1e-9) == weyl_counting(spec64, lam)


def test_weyl_fit_exponent_and_constant():
    spec = discrete_cross_section(TWO_PI, 1024)
    slope, constant = weyl_fit(spec, 200)
    assert abs(slope - 1.0) <= 0.02
    oracle = 2.0 * TWO_PI / np.pi   # counting constant of the Fourier oracle
    assert abs(constant - oracle) / oracle <= 0.02


def test_weyl_fit_band_guard(spec64):
    with pytest.raises(InsufficientModesError):
        weyl_fit(spec64, 1000)
    with pytest.raises(InsufficientModesError):
        weyl_fit(spec64, 100)  # reaches past n/4 at this resolution


def test_boundary_condition_partitions(spec64):
    p = boundary_condition(spec64, +1, with_kernel=False)
    assert all(spec64.eigenvalue(k) > 0 for k in p.selected)
    pbar = boundary_condition(spec64, -1, with_kernel=True)
    sel = set(pbar.selected)
    assert all(spec64.eigenvalue(k) < 0 for k in pbar.negative)
    assert set(pbar.kernel) <= sel
    # flipping the side negates the sign set
    flipped = boundary_condition(spec64, +1, with_kernel=True)
    assert set(flipped.selected) == {-k for k in sel}
    # the three index sets partition everything
    allk = set(p.positive) | set(p.negative) | set(p.kernel)
    assert allk == set(range(1, spec64.n_modes + 1)) | {-k for k in range(1, spec64.n_modes + 1)}
