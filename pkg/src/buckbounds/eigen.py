"""Dense symmetric-definite generalized eigensolver and buckling spectra.

The pencil (A, B) with B positive definite is reduced through B = L L^T to a
standard symmetric problem on L^-1 A L^-T, which LAPACK solves by
tridiagonalization plus implicitly shifted iteration.  A Jacobi scaling of
both matrices keeps the reduction well conditioned; it is a congruence, so
eigenvalues are untouched.  Results are deterministic: the same matrices give
bitwise identical output.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import LinAlgError, eigh, solve_triangular

from .bounds import Spectrum
from .errors import (
    ConvergenceError,
    InternalConsistencyError,
    InvalidParameterError,
    NotPositiveDefiniteError,
)
from .galerkin import Domain, assemble_forms
from .polyrec import _require_int

PIVOT_RELATIVE = 1e-14
ORTHONORMALITY_TOL = 1e-10
RESIDUAL_TOL = 1e-8
SYMMETRY_TOL = 1e-12


def _as_symmetric(matrix, name):
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidParameterError(f"{name} must be a square matrix, got shape {mat.shape}")
    scale = max(1.0, float(np.max(np.abs(mat))) if mat.size else 0.0)
    if float(np.max(np.abs(mat - mat.T))) > SYMMETRY_TOL * scale:
        raise InvalidParameterError(f"{name} is not symmetric")
    return mat


def cholesky_spd(matrix):
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Fails with the offending pivot index as soon as a pivot drops to
    1e-14 times the largest diagonal entry, instead of propagating NaNs.
    """
    mat = _as_symmetric(matrix, "matrix")
    n = mat.shape[0]
    threshold = PIVOT_RELATIVE * float(np.max(np.diagonal(mat))) if n else 0.0
    lower = np.zeros_like(mat)
    for j in range(n):
        pivot = mat[j, j] - float(lower[j, :j] @ lower[j, :j])
        if not pivot > threshold:
            raise NotPositiveDefiniteError(
                f"pivot {pivot} at index {j} is not above {threshold}",
                index=j,
                pivot=pivot,
            )
        lower[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            lower[j + 1 :, j] = (mat[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[
                j, j
            ]
    return lower


class EigenSolution:
    """Ascending eigenvalues with B-orthonormal eigenvectors, one per column."""

    def __init__(self, eigenvalues, eigenvectors):
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors


def _fix_signs(vectors):
    # First significant component positive, columnwise.
    for j in range(vectors.shape[1]):
        column = vectors[:, j]
        peak = float(np.max(np.abs(column)))
        significant = np.nonzero(np.abs(column) > 1e-12 * peak)[0]
        lead = significant[0] if significant.size else 0
        if column[lead] < 0.0:
            vectors[:, j] = -column
    return vectors


def solve_generalized(a_matrix, b_matrix, count):
    """First ``count`` eigenpairs of A x = lambda B x with B positive definite.

    Postconditions are validated before returning: B-orthonormality of the
    vectors to 1e-10 and pair residuals below 1e-8 times the norm of A.
    """
    a_mat = _as_symmetric(a_matrix, "A")
    b_mat = _as_symmetric(b_matrix, "B")
    if a_mat.shape != b_mat.shape:
        raise InvalidParameterError(
            f"A and B must share a shape, got {a_mat.shape} and {b_mat.shape}"
        )
    n = a_mat.shape[0]
    _require_int(count, "count", 1)
    if count > n:
        raise InvalidParameterError(f"count={count} exceeds the matrix size {n}")
    diag = np.diagonal(b_mat).copy()
    if np.any(diag <= 0.0):
        index = int(np.argmax(diag <= 0.0))
        raise NotPositiveDefiniteError(
            f"diagonal entry {diag[index]} of B at index {index} is not positive",
            index=index,
            pivot=float(diag[index]),
        )
    scale = 1.0 / np.sqrt(diag)
    jacobi = np.outer(scale, scale)
    a_scaled = a_mat * jacobi
    b_scaled = b_mat * jacobi
    lower = cholesky_spd(b_scaled)
    half = solve_triangular(lower, a_scaled, lower=True)
    reduced = solve_triangular(lower, half.T, lower=True)
    reduced = 0.5 * (reduced + reduced.T)
    try:
        eigenvalues, transformed = eigh(reduced, driver="ev")
    except LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigeniteration failed: {exc}") from None
    back = solve_triangular(lower, transformed, trans="T", lower=True)
    vectors = back * scale[:, None]
    eigenvalues = np.ascontiguousarray(eigenvalues[:count])
    vectors = _fix_signs(np.ascontiguousarray(vectors[:, :count]))
    gram = vectors.T @ b_mat @ vectors
    ortho_dev = float(np.max(np.abs(gram - np.eye(count))))
    if ortho_dev > ORTHONORMALITY_TOL:
        raise ConvergenceError(
            f"eigenvectors deviate from B-orthonormality by {ortho_dev}"
        )
    norm_a = float(np.linalg.norm(a_mat))
    residuals = a_mat @ vectors - b_mat @ vectors * eigenvalues[None, :]
    worst = float(np.max(np.linalg.norm(residuals, axis=0)))
    if worst > RESIDUAL_TOL * max(norm_a, 1.0):
        raise ConvergenceError(
            f"pair residual {worst} exceeds {RESIDUAL_TOL} * |A| = {RESIDUAL_TOL * norm_a}"
        )
    return EigenSolution(eigenvalues, vectors)


def solve_buckling(domain, l, m, count):
    """Buckling spectrum of order l on a domain: A_l x = lambda A_1 x.

    Returns a computed Spectrum with the eigenvectors and assembled forms
    retained for later verification.  n is the domain dimension.
    """
    if not isinstance(domain, Domain):
        raise InvalidParameterError("domain must be a Domain instance")
    forms = assemble_forms(domain, l, m)
    if count > forms.n_basis:
        raise InvalidParameterError(
            f"count={count} exceeds the basis size {forms.n_basis}"
        )
    solution = solve_generalized(forms.matrices[-1], forms.matrices[0], count)
    if float(solution.eigenvalues[0]) <= 0.0:
        raise InternalConsistencyError(
            f"nonpositive buckling eigenvalue {solution.eigenvalues[0]} from a definite pencil"
        )
    return Spectrum(
        values=tuple(float(v) for v in solution.eigenvalues),
        n=domain.dim,
        l=l,
        provenance="computed",
        vectors=solution.eigenvectors,
        forms=forms,
        m=m,
    )
