"""Integer polynomial recursions and the scalar terms built from their coefficients.

Three polynomial families in the spectral parameter t are generated by one
shared three-term recursion

    P_q = (2t - 2) P_{q-1} - (t**2 + 2t - n(n-2)) P_{q-2},

differing only in their seeds.  All coefficients stay exact integers; Python
integers make overflow impossible.  The interior coefficients of the main
family feed the scalar terms ``h_term`` and ``s_term`` used by the gap
inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainViolationError, InternalConsistencyError, InvalidParameterError


def _require_int(value, name, minimum):
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidParameterError(f"{name} must be >= {minimum}, got {value}")


def _require_positive(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be a positive real, got {value!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidParameterError(f"{name} must be a positive finite real, got {value!r}")
    return value


@dataclass(frozen=True)
class Polynomial:
    """Dense univariate polynomial with exact integer coefficients.

    Coefficients are stored ascending by power.  The zero polynomial is
    disallowed; the leading coefficient is always nonzero.
    """

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        for c in coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise InvalidParameterError(f"coefficients must be integers, got {c!r}")
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if coeffs == () or coeffs == (0,):
            raise InvalidParameterError("the zero polynomial is not representable here")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def _combine(self, other, sign):
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self.coefficients, other.coefficients
        size = max(len(a), len(b))
        out = [0] * size
        for i, c in enumerate(a):
            out[i] += c
        for i, c in enumerate(b):
            out[i] += sign * c
        return Polynomial(tuple(out))

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return Polynomial(tuple(other * c for c in self.coefficients))
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def derivative(self, order=1):
        _require_int(order, "order", 0)
        coeffs = self.coefficients
        for _ in range(order):
            coeffs = tuple(p * coeffs[p] for p in range(1, len(coeffs)))
        return Polynomial(coeffs)

    def __call__(self, t):
        result = 0
        for c in reversed(self.coefficients):
            result = result * t + c
        return result

    def __str__(self):
        parts = []
        for power in range(self.degree, -1, -1):
            c = self.coefficients[power]
            if c == 0:
                continue
            if power == 0:
                body = str(abs(c))
            else:
                var = "t" if power == 1 else f"t^{power}"
                body = var if abs(c) == 1 else f"{abs(c)} {var}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)


_T = Polynomial((0, 1))
_ONE = Polynomial((1,))


def _recursion_step(n, prev, prev2):
    # (2t - 2) * prev - (t**2 + 2t - n(n-2)) * prev2
    left = Polynomial((-2, 2)) * prev
    right = Polynomial((-n * (n - 2), 2, 1)) * prev2
    return left - right


def phi_polynomial(q, n):
    """Main family member of index q at dimension n, exact integers.

    Seeds are t - 1 and t**2 - (n+5) t - (n-2); the shared recursion extends
    the family for q >= 3.  The result is monic of degree q with constant
    term -(n-2)**(q-1).
    """
    _require_int(q, "q", 1)
    _require_int(n, "n", 2)
    first = Polynomial((-1, 1))
    if q == 1:
        return first
    second = Polynomial((-(n - 2), -(n + 5), 1))
    prev2, prev = first, second
    for _ in range(3, q + 1):
        prev2, prev = prev, _recursion_step(n, prev, prev2)
    return prev


def fg_polynomials(q, n):
    """Auxiliary pair (F_q, G_q) sharing the recursion of ``phi_polynomial``.

    Seeds are F_0 = G_0 = 1, F_1 = t - (n+2), G_1 = 3t + n - 2.  They satisfy
    the splitting identity phi_{q} = t*F_{q-1} - G_{q-1}.
    """
    _require_int(q, "q", 0)
    _require_int(n, "n", 2)
    f_prev2, g_prev2 = _ONE, _ONE
    if q == 0:
        return f_prev2, g_prev2
    f_prev = Polynomial((-(n + 2), 1))
    g_prev = Polynomial((n - 2, 3))
    for _ in range(2, q + 1):
        f_prev2, f_prev = f_prev, _recursion_step(n, f_prev, f_prev2)
        g_prev2, g_prev = g_prev, _recursion_step(n, g_prev, g_prev2)
    return f_prev, g_prev


@dataclass(frozen=True)
class ACoefficients:
    """Interior coefficients a_1..a_{l-2} of the degree-(l-1) family member.

    ``a_plus`` holds the clipped values max(a_j, 0) that enter the scalar
    terms.  Empty tuples at l = 2.
    """

    l: int
    n: int
    a: tuple
    a_plus: tuple


@lru_cache(maxsize=None)
def extract_a_coefficients(l, n):
    """Read the alternating-sign interior coefficients out of phi_{l-1}.

    The member of degree l-1 has the shape

        t**(l-1) - a_{l-2} t**(l-2) + ... + (-1)**(l-2) a_1 t - (n-2)**(l-2),

    so a_j = (-1)**(l-1-j) * coefficient(t**j).  Monicity and the constant
    term are validated; a violation means the recursion itself is broken.
    """
    _require_int(l, "l", 2)
    _require_int(n, "n", 2)
    phi = phi_polynomial(l - 1, n)
    coeffs = phi.coefficients
    if phi.degree != l - 1 or coeffs[-1] != 1:
        raise InternalConsistencyError(
            f"family member for l={l}, n={n} is not monic of degree {l - 1}"
        )
    if coeffs[0] != -((n - 2) ** (l - 2)):
        raise InternalConsistencyError(
            f"constant term {coeffs[0]} != -(n-2)**(l-2) for l={l}, n={n}"
        )
    a = tuple((-1) ** (l - 1 - j) * coeffs[j] for j in range(1, l - 1))
    a_plus = tuple(max(v, 0) for v in a)
    return ACoefficients(l=l, n=n, a=a, a_plus=a_plus)


def h_term(l, n, lam):
    """Scalar term (-1)**l (n-2)**(l-2) + sum_j a_j^+ lam**(j/(l-1)).

    Nondecreasing in lam since every a_j^+ is nonnegative.  The empty sum at
    l = 2 leaves only the sign term, with the convention 0**0 = 1 at n = 2.
    """
    lam = _require_positive(lam, "lam")
    coeffs = extract_a_coefficients(l, n)
    tail = math.fsum(
        ap * lam ** (j / (l - 1)) for j, ap in enumerate(coeffs.a_plus, start=1)
    )
    return (-1) ** l * (n - 2) ** (l - 2) + tail


def s_term(l, n, lam):
    """Scalar term lam*(1 - 1/(lam**(1/(l-1)) - (n-2))) + h_term(l, n, lam).

    Requires lam**(1/(l-1)) > n - 2; otherwise the reciprocal is undefined
    and a domain violation is raised.
    """
    lam = _require_positive(lam, "lam")
    _require_int(l, "l", 2)
    _require_int(n, "n", 2)
    root = lam ** (1.0 / (l - 1))
    gap = root - (n - 2)
    if gap <= 0.0:
        raise DomainViolationError(
            f"s_term requires lam**(1/(l-1)) > n - 2; got lam={lam} with "
            f"lam**(1/(l-1))={root} and n-2={n - 2}"
        )
    return lam * (1.0 - 1.0 / gap) + h_term(l, n, lam)
