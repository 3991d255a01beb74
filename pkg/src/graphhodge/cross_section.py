"""Discrete cross-section operators on circles and their doubling.

A cross section is a circle of circumference L sampled at N uniform nodes
(spacing h = L/N).  Mixed-degree forms on the circle are pairs
(node values, integrated edge values) and the first-order operator

    D = d + delta

acts on them.  On a cylinder over the circle, a mixed form splits into a
transversal part and a dt part, giving the doubled bundle with sections
(u0, u1) and the involution

    sigma = [[0, (-1)^(deg+1)], [(-1)^deg, 0]],     Dhat = sigma (D + D)

which anti-commutes with D + D.  The doubled operator is assembled from
the eigendecomposition of the circle operator, so its spectrum is exactly
symmetric and the sigma-pairing between opposite eigenvalues is exact.

Vector layout for doubled sections: [f0 (N), w0 (N), f1 (N), w1 (N)] with
f* node values and w* integrated edge values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import BadResolutionError, EmptySpectrumError, InsufficientModesError

KERNEL_DIM = 4  # per circle edge: two copies of {constant 0-form, uniform 1-form}


def circle_incidence(n: int) -> sp.csr_matrix:
    """Signed incidence d0 of the oriented n-cycle (edge i: node i -> i+1)."""
    rows = np.repeat(np.arange(n), 2)
    cols = np.empty(2 * n, dtype=np.int64)
    data = np.empty(2 * n, dtype=np.int64)
    cols[0::2] = np.arange(n)
    data[0::2] = -1
    cols[1::2] = (np.arange(n) + 1) % n
    data[1::2] = 1
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def circle_masses(length: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Lumped masses (m0 per node, m1 per edge) for the uniform n-cycle."""
    h = length / n
    return np.full(n, h), np.full(n, 1.0 / h)


def _sigma_matrix(n: int) -> sp.csr_matrix:
    """The involution on doubled sections, exact signed permutation.

    Output slots: f0 = -f1, w0 = +w1, f1 = +f0, w1 = -w0.  The same matrix
    represents sigma in natural and mass-symmetrized coordinates because
    it only mixes slots of equal mass.
    """
    eye = sp.identity(n, format="csr")
    z = sp.csr_matrix((n, n))
    return sp.bmat([
        [z, z, -eye, z],
        [z, z, z, eye],
        [eye, z, z, z],
        [z, -eye, z, z],
    ], format="csr")


@dataclass
class BoundaryConditionSpace:
    """Index partition of the doubled spectrum realizing an APS-type condition."""

    edge: str
    side: int
    with_kernel: bool
    positive: tuple[int, ...]
    negative: tuple[int, ...]
    kernel: tuple[int, ...]

    @property
    def selected(self) -> tuple[int, ...]:
        base = self.positive if self.side > 0 else self.negative
        return base + self.kernel if self.with_kernel else base


@dataclass
class CrossSectionSpectrum:
    """Eigen-data of the doubled circle operator for one edge.

    Signed indices k in +-1..+-(2N) with lambda_{-k} = -lambda_k exactly;
    the kernel occupies k in {+-1, +-2} with the canonical basis

        phi_{+1} = (const, 0)   phi_{-1} = sigma phi_{+1} = (0, const)
        phi_{+2} = (dtheta, 0)  phi_{-2} = sigma phi_{+2} = (0, -dtheta)

    so absolute (transversal) kernel modes carry positive index and
    relative (dt) kernel modes negative index.  Eigenvectors are stored in
    natural cochain coordinates, orthonormal in the doubled mass inner
    product.
    """

    edge: str
    circumference: float
    n_theta: int
    lam_pos: np.ndarray          # eigenvalues for k = 1..2N (kernel first, then ascending)
    vectors_pos: np.ndarray      # (4N, 2N) columns phi_{+k}
    vectors_neg: np.ndarray      # (4N, 2N) columns phi_{-k}
    kernel_dim: int
    mass: np.ndarray             # doubled mass diagonal, length 4N
    sigma: sp.csr_matrix
    circle_eigenvalues: np.ndarray = field(repr=False)

    @property
    def h_theta(self) -> float:
        return self.circumference / self.n_theta

    @property
    def n_modes(self) -> int:
        return self.lam_pos.size

    def eigenvalue(self, k: int) -> float:
        if k > 0:
            return float(self.lam_pos[k - 1])
        return -float(self.lam_pos[-k - 1])

    def vector(self, k: int) -> np.ndarray:
        return self.vectors_pos[:, k - 1] if k > 0 else self.vectors_neg[:, -k - 1]

    def all_eigenvalues(self) -> np.ndarray:
        return np.concatenate([self.lam_pos, -self.lam_pos])

    def positive_eigenvalues(self) -> np.ndarray:
        """Strictly positive part of the spectrum, ascending."""
        vals = self.lam_pos[self.kernel_dim // 2:]
        return np.sort(vals)

    def min_positive(self) -> float:
        return float(self.positive_eigenvalues()[0])

    def operator_matrix(self) -> sp.csr_matrix:
        """Dhat in mass-symmetrized coordinates (dense-friendly sparse)."""
        n = self.n_theta
        d = circle_incidence(n)
        h = self.h_theta
        s = d / h
        z = sp.csr_matrix((n, n))
        d_sym = sp.bmat([[z, s.T], [s, z]], format="csr")
        dd = sp.block_diag([d_sym, d_sym], format="csr")
        return (self.sigma @ dd).tocsr()

    def project_kernel(self, trace: np.ndarray) -> np.ndarray:
        """Coefficients of a doubled section on the four kernel modes."""
        ker = np.column_stack([self.vector(k) for k in (1, 2, -1, -2)])
        return ker.T @ (self.mass * trace)


def discrete_cross_section(length: float, n_theta: int, edge: str = "") -> CrossSectionSpectrum:
    """Diagonalize the circle operator and assemble the doubled spectrum.

    The doubled eigenpairs are constructed from circle eigenpairs
    (lambda, psi) as (psi, +-G psi)/sqrt(2) with G the degree sign, which
    realizes the exact lambda <-> -lambda pairing through sigma.
    """
    if n_theta < 8:
        raise BadResolutionError(f"n_theta={n_theta} < 8")
    if length <= 0:
        raise BadResolutionError("circumference must be positive")
    n = n_theta
    h = length / n
    d = circle_incidence(n).toarray()
    s = d / h
    # symmetrized circle operator on (f, w) blocks
    dsym = np.zeros((2 * n, 2 * n))
    dsym[:n, n:] = s.T
    dsym[n:, :n] = s
    lam, psi = np.linalg.eigh(dsym)

    # exact kernel replacement: constant function and uniform 1-form
    m0, m1 = circle_masses(length, n)
    w = np.sqrt(np.concatenate([m0, m1]))
    k_const = np.zeros(2 * n)
    k_const[:n] = w[:n]                      # symmetrized image of u = 1
    k_const /= np.linalg.norm(k_const)
    k_unif = np.zeros(2 * n)
    k_unif[n:] = w[n:]                       # symmetrized image of w = 1
    k_unif /= np.linalg.norm(k_unif)

    order = np.argsort(np.abs(lam), kind="stable")
    lam = lam[order]
    psi = psi[:, order]
    if np.abs(lam[1]) > 1e-8 * max(np.abs(lam[-1]), 1.0):
        raise BadResolutionError("circle kernel not resolved")
    lam = lam.copy()
    lam[0] = lam[1] = 0.0
    psi[:, 0] = k_const
    psi[:, 1] = k_unif

    # Doubled eigenvectors: every circle eigenpair (lambda, psi) spans a
    # sector span{(psi,0),(0,G psi)} on which Dhat acts as [[0,lambda],
    # [lambda,0]], so each nonzero circle mode contributes exactly one
    # positive doubled mode |lambda| with vector (psi, sign(lambda) G psi)
    # and its sigma-image at -|lambda|.
    gamma = np.concatenate([np.ones(n), -np.ones(n)])
    sigma = _sigma_matrix(n)
    npos = 2 * n
    vec_pos = np.zeros((4 * n, npos))
    vec_neg = np.zeros((4 * n, npos))
    lam_pos = np.zeros(npos)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)

    # kernel block: canonical basis, absolute modes in the first slot
    vec_pos[: 2 * n, 0] = k_const
    vec_pos[: 2 * n, 1] = k_unif
    vec_neg[:, 0] = sigma @ vec_pos[:, 0]
    vec_neg[:, 1] = sigma @ vec_pos[:, 1]
    lam_pos[0] = lam_pos[1] = 0.0

    nonzero_idx = [i for i in range(2 * n) if abs(lam[i]) > 1e-8 * max(np.abs(lam[-1]), 1.0)]
    nonzero_idx.sort(key=lambda i: (abs(lam[i]), lam[i]))
    col = 2
    for i in nonzero_idx:
        p = psi[:, i]
        sgn = 1.0 if lam[i] > 0 else -1.0
        plus = np.concatenate([p, sgn * gamma * p]) * inv_sqrt2
        vec_pos[:, col] = plus
        vec_neg[:, col] = sigma @ plus       # phi_{-k} := sigma phi_{+k}
        lam_pos[col] = abs(lam[i])
        col += 1
    if col != npos:
        raise BadResolutionError("doubled spectrum incomplete (unexpected near-zero modes)")

    # convert symmetrized eigenvectors to natural cochain coordinates
    w4 = np.concatenate([w, w])
    vec_pos_nat = vec_pos / w4[:, None]
    vec_neg_nat = vec_neg / w4[:, None]
    mass = w4 ** 2

    return CrossSectionSpectrum(
        edge=edge,
        circumference=float(length),
        n_theta=n,
        lam_pos=lam_pos,
        vectors_pos=vec_pos_nat,
        vectors_neg=vec_neg_nat,
        kernel_dim=KERNEL_DIM,
        mass=mass,
        sigma=sigma,
        circle_eigenvalues=lam,
    )


def spectral_gap(spectra) -> float:
    """Smallest positive eigenvalue over a collection of edge spectra."""
    spectra = list(spectra)
    if not spectra:
        raise EmptySpectrumError("no edge spectra given")
    return min(s.min_positive() for s in spectra)


def weyl_counting(spec: CrossSectionSpectrum, lam: float) -> int:
    """Number of non-negative doubled eigenvalues <= lam, with multiplicity."""
    allv = spec.all_eigenvalues()
    nonneg = allv[allv >= 0.0]
    return int(np.count_nonzero(nonneg <= lam + 1e-12))


def weyl_fit(spec: CrossSectionSpectrum, k_modes: int) -> tuple[float, float]:
    """Power-law fit of the positive spectrum: returns (exponent, counting constant).

    Regresses log lambda_k against log k over the first ``k_modes``
    strictly positive eigenvalues.  Only modes below a quarter of the
    discrete band are allowed, where the sine-shaped dispersion still
    tracks the continuum.  The counting constant is the coefficient C in
    N+(lambda) ~ C lambda^(n-1) + dim ker, i.e. exp(-intercept/slope) in
    the surface case.
    """
    pos = spec.positive_eigenvalues()
    if k_modes > pos.size:
        raise InsufficientModesError(f"requested {k_modes} modes, have {pos.size}")
    band_edge = (2.0 / spec.h_theta) * np.sin(np.pi / 4.0)
    used = pos[:k_modes]
    if used[-1] > band_edge:
        raise InsufficientModesError("fit window reaches into the upper discrete band")
    # the law is asymptotic: regress over the top half of the window so the
    # O(1) index offset of the lowest multiplicity plateaus cannot bias it
    lo = max(8, k_modes // 2)
    k = np.arange(lo, k_modes + 1, dtype=float)
    slope, _ = np.polyfit(np.log(k), np.log(used[lo - 1:]), 1)
    constant = float(k_modes / used[-1])
    return float(slope), constant


def boundary_condition(spec: CrossSectionSpectrum, side: int, with_kernel: bool) -> BoundaryConditionSpace:
    """Index partition for the spectral condition on one side of the edge.

    side +1 selects positive modes, side -1 negative ones; with_kernel
    adds the four kernel indices.
    """
    nker = spec.kernel_dim // 2
    pos = tuple(range(nker + 1, spec.n_modes + 1))
    neg = tuple(-k for k in pos)
    ker = tuple(range(1, nker + 1)) + tuple(range(-1, -nker - 1, -1))
    return BoundaryConditionSpace(
        edge=spec.edge,
        side=int(np.sign(side)),
        with_kernel=with_kernel,
        positive=pos,
        negative=neg,
        kernel=ker,
    )
