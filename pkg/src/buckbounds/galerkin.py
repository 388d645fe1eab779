"""Clamped polynomial bases and exact assembly of polyharmonic form matrices.

The 1D basis on [0, 1] is b_a(x) = x**l (1-x)**l * L_a(2x - 1) with L_a the
Legendre polynomial of degree a, so b_a and its first l-1 derivatives vanish
at both endpoints.  Shifted Legendre polynomials have integer coefficients,
hence every basis function, every derivative, and every product integral is
exact; matrices are rationals rounded to binary64 exactly once at export.
Rectangles use the tensor product of two scaled copies of the 1D basis.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .errors import InvalidParameterError
from .polyrec import Polynomial, _require_int

DEGREE_CAP = 24
CONDITIONING_NOTE = 16


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box: an interval (one edge) or a rectangle (two edges)."""

    edges: tuple

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        if len(edges) not in (1, 2):
            raise InvalidParameterError(f"domain needs 1 or 2 edges, got {len(edges)}")
        for e in edges:
            if not (e > 0.0) or not np.isfinite(e):
                raise InvalidParameterError(f"edge lengths must be positive finite, got {e}")
        object.__setattr__(self, "edges", edges)

    @property
    def dim(self):
        return len(self.edges)

    @classmethod
    def interval(cls, length=1.0):
        return cls((length,))

    @classmethod
    def rectangle(cls, a=1.0, b=1.0):
        return cls((a, b))


@dataclass(frozen=True)
class Basis1D:
    """The m clamped basis polynomials on [0, 1] for boundary order l."""

    l: int
    m: int
    functions: tuple

    def __post_init__(self):
        if len(self.functions) != self.m:
            raise InvalidParameterError("basis length does not match m")


def _shifted_legendre(a):
    # L_a(2x - 1) has integer coefficients: sum_k (-1)**(a+k) C(a,k) C(a+k,k) x**k.
    return Polynomial(tuple((-1) ** (a + k) * comb(a, k) * comb(a + k, k) for k in range(a + 1)))


def _clamp_factor(l):
    # x**l (1-x)**l, ascending integer coefficients.
    coeffs = [0] * (2 * l + 1)
    for j in range(l + 1):
        coeffs[l + j] = (-1) ** j * comb(l, j)
    return Polynomial(tuple(coeffs))


def build_basis_1d(l, m):
    """Construct the clamped basis of size m; degree of b_a is 2l + a."""
    _require_int(l, "l", 2)
    _require_int(m, "m", 1)
    if m > DEGREE_CAP:
        raise InvalidParameterError(f"m={m} exceeds the supported cap {DEGREE_CAP}")
    if m > CONDITIONING_NOTE:
        warnings.warn(
            f"basis size m={m} is above {CONDITIONING_NOTE}; the mass matrix grows "
            "ill conditioned and eigenvalues may lose digits",
            stacklevel=2,
        )
    clamp = _clamp_factor(l)
    return Basis1D(l=l, m=m, functions=tuple(clamp * _shifted_legendre(a) for a in range(m)))


def _integral01(c, d):
    # Exact integral over [0, 1] of the product of two integer polynomials.
    conv = [0] * (len(c) + len(d) - 1)
    for i, ci in enumerate(c):
        if ci == 0:
            continue
        for j, dj in enumerate(d):
            conv[i + j] += ci * dj
    return sum(Fraction(v, k + 1) for k, v in enumerate(conv) if v)


def derivative_integral_table(basis, max_order):
    """Exact table M[r][s][a][b] = integral of b_a^(r) * b_b^(s) over [0, 1].

    Orders run from 0 to max_order <= l; beyond l the integration-by-parts
    identities used downstream stop holding at the boundary, so larger orders
    are refused.  Entries with odd a + b + r + s vanish by the x -> 1-x
    symmetry of the basis and are emitted as exact zeros.
    """
    _require_int(max_order, "max_order", 0)
    if max_order > basis.l:
        raise InvalidParameterError(
            f"max_order={max_order} exceeds the boundary order l={basis.l}"
        )
    m = basis.m
    derivs = []
    for r in range(max_order + 1):
        derivs.append([basis.functions[a].derivative(r).coefficients for a in range(m)])
    zero = Fraction(0)
    table = [[None] * (max_order + 1) for _ in range(max_order + 1)]
    for r in range(max_order + 1):
        for s in range(max_order + 1):
            block = [[zero] * m for _ in range(m)]
            for a in range(m):
                for b in range(m):
                    if (r + s + a + b) % 2:
                        continue
                    block[a][b] = _integral01(derivs[r][a], derivs[s][b])
            table[r][s] = block
    return table


@dataclass(frozen=True)
class OperatorForms:
    """Form matrices A_1..A_l of one domain discretization, binary64, symmetric.

    ``matrices[k-1]`` represents the order-k polyharmonic form; the first one
    doubles as the mass-like matrix B of the buckling pencil.  ``n_basis`` is
    the matrix size: m on intervals, m**2 on rectangles (index a*m + c for
    the product b_a(x) b_c(y)).
    """

    domain: Domain
    l: int
    m: int
    n_basis: int
    matrices: tuple = field(repr=False)

    @property
    def b_matrix(self):
        return self.matrices[0]


def _scaled_table(table, edge, max_order):
    factor = Fraction(edge)
    if factor == 1:
        return table
    scaled = []
    for r in range(max_order + 1):
        row = []
        for s in range(max_order + 1):
            weight = factor ** (1 - r - s)
            row.append([[v * weight for v in line] for line in table[r][s]])
        scaled.append(row)
    return scaled


def _entry_1d(table, k, a, b, factor):
    return table[k][k][a][b] * factor ** (1 - 2 * k)


def _entry_2d(sx, sy, k, a, c, a2, c2):
    # Binomial expansion of the k-th power of the Laplacian on a product
    # b_a(x) b_c(y); even k pairs equal-order blocks, odd k adds one gradient.
    total = Fraction(0)
    if k % 2 == 0:
        p = k // 2
        for u in range(p + 1):
            cu = comb(p, u)
            for v in range(p + 1):
                w = cu * comb(p, v)
                total += w * sx[2 * u][2 * v][a][a2] * sy[2 * (p - u)][2 * (p - v)][c][c2]
    else:
        p = (k - 1) // 2
        for u in range(p + 1):
            cu = comb(p, u)
            for v in range(p + 1):
                w = cu * comb(p, v)
                total += w * sx[2 * u + 1][2 * v + 1][a][a2] * sy[2 * (p - u)][2 * (p - v)][c][c2]
                total += w * sx[2 * u][2 * v][a][a2] * sy[2 * (p - u) + 1][2 * (p - v) + 1][c][c2]
    return total


def _assemble(domain, basis):
    l, m = basis.l, basis.m
    table = derivative_integral_table(basis, l)
    matrices = []
    if domain.dim == 1:
        factor = Fraction(domain.edges[0])
        for k in range(1, l + 1):
            exact = [[_entry_1d(table, k, a, b, factor) for b in range(m)] for a in range(m)]
            matrices.append(exact)
        n_basis = m
    else:
        sx = _scaled_table(table, domain.edges[0], l)
        sy = _scaled_table(table, domain.edges[1], l)
        n_basis = m * m
        for k in range(1, l + 1):
            exact = [[Fraction(0)] * n_basis for _ in range(n_basis)]
            for i in range(n_basis):
                a, c = divmod(i, m)
                for j in range(i, n_basis):
                    a2, c2 = divmod(j, m)
                    value = _entry_2d(sx, sy, k, a, c, a2, c2)
                    exact[i][j] = value
                    exact[j][i] = value
            matrices.append(exact)
    rounded = []
    for exact in matrices:
        mat = np.array([[float(v) for v in row] for row in exact], dtype=float)
        rounded.append(mat)
    return n_basis, tuple(rounded)


def assemble_forms(domain, l, m):
    """Assemble A_1..A_l on the given domain from exact rationals.

    Every matrix is exactly symmetric because symmetric entries are the same
    rational rounded once.  Positive definiteness of B = A_1 and of A_l is
    checked by Cholesky before returning.
    """
    if not isinstance(domain, Domain):
        raise InvalidParameterError("domain must be a Domain instance")
    basis = build_basis_1d(l, m)
    n_basis, matrices = _assemble(domain, basis)
    from .eigen import cholesky_spd  # deferred: eigen imports this module

    cholesky_spd(matrices[0])
    cholesky_spd(matrices[-1])
    return OperatorForms(domain=domain, l=l, m=m, n_basis=n_basis, matrices=matrices)


def export_forms(forms, path):
    """Write a one-line JSON header, then each matrix as row-major binary64."""
    header = {
        "schema": 1,
        "n_basis": forms.n_basis,
        "l": forms.l,
        "m": forms.m,
        "domain": list(forms.domain.edges),
        "matrices": len(forms.matrices),
        "dtype": "<f8",
        "order": "C",
    }
    with open(path, "wb") as handle:
        handle.write((json.dumps(header, sort_keys=True) + "\n").encode("ascii"))
        for mat in forms.matrices:
            handle.write(np.ascontiguousarray(mat, dtype="<f8").tobytes())


def load_forms(path):
    """Read a file written by ``export_forms`` back into ``OperatorForms``."""
    with open(path, "rb") as handle:
        header = json.loads(handle.readline().decode("ascii"))
        if header.get("schema") != 1:
            raise InvalidParameterError(f"unknown forms schema {header.get('schema')!r}")
        n = header["n_basis"]
        matrices = []
        for _ in range(header["matrices"]):
            block = handle.read(8 * n * n)
            if len(block) != 8 * n * n:
                raise InvalidParameterError(f"truncated matrix block in {path}")
            matrices.append(np.frombuffer(block, dtype="<f8").reshape(n, n).copy())
    return OperatorForms(
        domain=Domain(tuple(float(e) for e in header["domain"])),
        l=header["l"],
        m=header["m"],
        n_basis=n,
        matrices=tuple(matrices),
    )
