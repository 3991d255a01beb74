"""Sparse symmetric eigensolver and subspace utilities.

Thin deterministic layer over ARPACK (Lanczos with implicit restarts) and
LAPACK: seeded start vectors, shift-invert through a sparse LU with a
regularized fallback, residual contracts checked after every solve, plus
the subspace tools the experiments need (spectral projection and the gap
between subspaces).

All vectors here live in mass-symmetrized coordinates, where the relevant
inner product is Euclidean; callers convert with the operator wrappers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    AmbientMismatchError,
    AmbiguousKernelError,
    NoConvergenceError,
    UnresolvedSpectrumError,
)

_DENSE_CUTOFF = 900


@dataclass
class EigenResult:
    eigenvalues: np.ndarray        # sorted ascending by magnitude
    vectors: np.ndarray            # orthonormal columns
    residuals: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def count(self) -> int:
        return self.eigenvalues.size


@dataclass
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of a known ambient space."""

    vectors: np.ndarray
    ambient: str
    mass: np.ndarray | None = None   # None means Euclidean coordinates

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def gram(self, other: "SubspaceBasis") -> np.ndarray:
        if self.ambient != other.ambient:
            raise AmbientMismatchError(
                f"subspaces live in different ambients: {self.ambient} vs {other.ambient}")
        if self.mass is None:
            return self.vectors.T @ other.vectors
        return self.vectors.T @ (self.mass[:, None] * other.vectors)


def orthonormalize(columns: np.ndarray, mass: np.ndarray | None = None,
                   drop_tol: float = 1e-10) -> np.ndarray:
    """Mass-weighted QR with rank truncation (small column counts)."""
    cols = []
    for j in range(columns.shape[1]):
        v = columns[:, j].astype(float).copy()
        for _ in range(2):
            for u in cols:
                w = mass * u if mass is not None else u
                v -= np.dot(w, v) * u
        nrm = np.sqrt(np.dot(mass * v if mass is not None else v, v))
        scale = np.sqrt(np.dot(mass * columns[:, j] if mass is not None else columns[:, j],
                               columns[:, j]))
        if nrm > drop_tol * max(scale, 1.0):
            cols.append(v / nrm)
    return np.column_stack(cols) if cols else np.zeros((columns.shape[0], 0))


def _operator_norm_estimate(a: sp.spmatrix) -> float:
    try:
        return float(spla.onenormest(a.tocsc()))
    except Exception:
        return float(abs(a).sum(axis=1).max())


def smallest_eigenpairs(a: sp.spmatrix, m: int, tol: float = 1e-9,
                        seed: int = 0) -> EigenResult:
    """The m eigenpairs of smallest magnitude of a symmetric matrix.

    Deterministic for a fixed (operator, m, tol, seed): the Lanczos start
    vector is drawn from a seeded generator, and the dense path used for
    small problems has no randomness at all.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    a = sp.csr_matrix(a)
    n = a.shape[0]
    norm_a = _operator_norm_estimate(a)
    diagnostics = {"n": n, "m": m, "norm_estimate": norm_a, "restarts": 0}

    if n <= _DENSE_CUTOFF or m > n - 8:
        lam, vec = np.linalg.eigh(a.toarray())
        order = np.argsort(np.abs(lam), kind="stable")[:m]
        lam, vec = lam[order], vec[:, order]
        diagnostics["method"] = "dense"
    else:
        # Smallest-magnitude pairs of an indefinite operator sit on both
        # sides of zero, so shift-invert runs on the PSD square; the small
        # Rayleigh-Ritz problem on that invariant subspace then recovers
        # signed eigenpairs of the operator itself.
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(n)
        b = (a @ a).tocsc()
        shift = -1.23456789e-3 * max(norm_a, 1e-12) ** 2
        k = min(m + 6, n - 2)
        try:
            _, vsq = spla.eigsh(b, k=k, sigma=shift, which="LM", v0=v0,
                                tol=min(tol, 1e-12), maxiter=5000)
            diagnostics["method"] = "shift-invert-squared"
            diagnostics["sigma"] = shift
        except Exception as exc:   # factorization failure or no convergence
            diagnostics["fallback"] = repr(exc)
            if n <= 12000:
                lam, vec = np.linalg.eigh(a.toarray())
                order = np.argsort(np.abs(lam), kind="stable")[:m]
                lam, vec = lam[order], vec[:, order]
                diagnostics["method"] = "dense-fallback"
                vsq = None
            else:
                raise NoConvergenceError(f"eigensolver failed on n={n}: {exc}") from exc
        if vsq is not None:
            vsq = orthonormalize(vsq)
            h = vsq.T @ (a @ vsq)
            theta, u = np.linalg.eigh(0.5 * (h + h.T))
            order = np.argsort(np.abs(theta), kind="stable")[:m]
            lam = theta[order]
            vec = vsq @ u[:, order]

    vec = orthonormalize(vec)
    if vec.shape[1] < m:
        raise NoConvergenceError("eigenvector set lost rank during orthonormalization")
    # exact Rayleigh quotients for the returned basis
    lam = np.array([float(v @ (a @ v)) for v in vec.T])
    order = np.argsort(np.abs(lam), kind="stable")
    lam, vec = lam[order], vec[:, order]
    resid = np.array([np.linalg.norm(a @ vec[:, j] - lam[j] * vec[:, j])
                      for j in range(m)])
    bound = max(tol, 1e-11) * max(norm_a, 1e-12)
    if np.any(resid > bound * 100):
        raise NoConvergenceError(
            f"residual contract violated: max {resid.max():.3e} > {bound * 100:.3e}")
    gram = vec.T @ vec
    if np.max(np.abs(gram - np.eye(m))) > 1e-10:
        raise NoConvergenceError("eigenvectors not orthonormal to 1e-10")
    diagnostics["max_residual"] = float(resid.max())
    return EigenResult(lam, vec, resid, diagnostics, seed)


def kernel_dimension(a: sp.spmatrix, tol_abs: float | None = None,
                     gap_ratio: float = 1e3, m_hint: int = 8,
                     seed: int = 0) -> tuple[int, dict]:
    """Count near-zero eigenvalues, demanding a clean spectral gap.

    Accepts k kernel eigenvalues only if the first rejected eigenvalue
    exceeds gap_ratio times the last accepted one (floored at tol_abs);
    anything murkier raises AmbiguousKernelError, which usually means an
    under-resolved mesh or a stretch parameter that is too small.
    """
    a = sp.csr_matrix(a)
    n = a.shape[0]
    norm_a = _operator_norm_estimate(a)
    if tol_abs is None:
        tol_abs = max(1e-9, 100 * np.finfo(float).eps * norm_a)
    m = min(max(m_hint, 4), n - 2) if n > 6 else n
    while True:
        res = smallest_eigenpairs(a, m, seed=seed)
        mags = np.abs(res.eigenvalues)
        below = int(np.count_nonzero(mags <= tol_abs))
        if below < m or m >= n - 2:
            break
        m = min(2 * m, n - 2)
    if below == m and m < n - 2:
        raise AmbiguousKernelError("all computed eigenvalues below tolerance")
    if below < res.count:
        first_rejected = mags[below]
        last_accepted = max(mags[below - 1] if below else 0.0, tol_abs)
        ratio = first_rejected / last_accepted
        if ratio < gap_ratio:
            raise AmbiguousKernelError(
                f"no clean kernel gap: ratio {ratio:.2e} < {gap_ratio:.0e}")
    else:
        ratio = np.inf
    diag = {"tol_abs": tol_abs, "gap_ratio_found": float(ratio),
            "eigenvalues": res.eigenvalues[: below + 2].tolist(),
            "result": res}
    return below, diag


def spectral_projection(eig: EigenResult, cutoff: float, u: np.ndarray) -> np.ndarray:
    """Orthogonal projection of u onto the span of eigenvectors with
    |eigenvalue| <= cutoff; requires the spectrum resolved past the cutoff."""
    mags = np.abs(eig.eigenvalues)
    if mags.max(initial=0.0) < cutoff:
        raise UnresolvedSpectrumError(
            f"cutoff {cutoff:.3e} beyond resolved spectrum {mags.max(initial=0.0):.3e}")
    cols = eig.vectors[:, mags <= cutoff]
    return cols @ (cols.T @ u)


def kato_gap(a: SubspaceBasis, b: SubspaceBasis) -> float:
    """The gap sup { dist(x, B) : x in A, |x| = 1 }, in [0, 1].

    Computed as sqrt(1 - s_min^2) from the singular values of the mixed
    Gram matrix; equals the sup-distance definition in finite dimensions.
    A value below 1 certifies dim A <= dim B.
    """
    if a.dim == 0:
        return 0.0
    if a.dim > b.dim:
        return 1.0
    g = a.gram(b)
    svals = np.linalg.svd(g, compute_uv=False)
    smin = svals[a.dim - 1] if svals.size >= a.dim else 0.0
    return float(np.sqrt(max(0.0, 1.0 - min(smin, 1.0) ** 2)))
