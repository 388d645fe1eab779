"""Universal gap inequalities for clamped buckling spectra and their bound solvers.

A Spectrum carries ascending positive eigenvalues plus the dimension n and
order l it belongs to.  Evaluators score one inequality at one candidate for
the next eigenvalue and report lhs, rhs, and the satisfaction margin; solvers
turn an inequality into the largest admissible candidate.  Weight sequences
delta must be positive and non-increasing; ``optimize_delta`` produces the
minimizing one by pool-adjacent-violators.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BracketError,
    DomainViolationError,
    InfeasibleSpectrumError,
    InternalConsistencyError,
    InvalidParameterError,
    SpectrumFormatError,
)
from .polyrec import _require_int, s_term

RESIDUAL_TOLERANCE = 1e-9
MAX_DOUBLINGS = 64
PROBES_PER_DOUBLING = 16
BISECT_RELATIVE = 1e-13

_PROVENANCES = ("computed", "synthetic", "file")
_HEADER_RE = re.compile(r"^#\s*n=(\d+)\s+l=(\d+)\s*$")


def euclidean_coefficient(n, l):
    """Exact rational 2 l**2 + (n - 14/3) l + 8/3 - n; strictly positive.

    At l = 2 this collapses to n + 4/3.  Positivity is asserted because the
    square-root bound divides by it.
    """
    _require_int(n, "n", 2)
    _require_int(l, "l", 2)
    value = Fraction(6 * l * l + 3 * n * l - 14 * l + 8 - 3 * n, 3)
    if value <= 0:
        raise InternalConsistencyError(f"coefficient {value} at n={n}, l={l} is not positive")
    return value


@dataclass(frozen=True)
class Spectrum:
    """Ascending positive eigenvalues with their origin.

    ``provenance`` is one of computed (solved here, with eigenvectors and
    forms retained), synthetic (constructed numbers), or file (parsed from a
    spectrum file).  Only computed spectra may claim theorem verification.
    """

    values: tuple
    n: int
    l: int
    provenance: str = "synthetic"
    vectors: object = field(default=None, compare=False, repr=False)
    forms: object = field(default=None, compare=False, repr=False)
    m: object = field(default=None, compare=False)

    def __post_init__(self):
        _require_int(self.n, "n", 1)
        _require_int(self.l, "l", 2)
        if self.provenance not in _PROVENANCES:
            raise InvalidParameterError(
                f"provenance must be one of {_PROVENANCES}, got {self.provenance!r}"
            )
        values = tuple(float(v) for v in self.values)
        if not values:
            raise InvalidParameterError("a spectrum needs at least one eigenvalue")
        previous = 0.0
        for v in values:
            if not math.isfinite(v) or v <= 0.0:
                raise InvalidParameterError(f"eigenvalues must be positive finite, got {v}")
            if v < previous:
                raise InvalidParameterError("eigenvalues must be nondecreasing")
            previous = v
        object.__setattr__(self, "values", values)

    @property
    def k(self):
        return len(self.values)


def parse_spectrum(text):
    """Parse the spectrum text format: '# n=<int> l=<int>' then one value per line."""
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise SpectrumFormatError("empty spectrum input")
    match = _HEADER_RE.match(lines[0])
    if match is None:
        raise SpectrumFormatError(
            f"first line must look like '# n=<int> l=<int>', got {lines[0]!r}"
        )
    n, l = int(match.group(1)), int(match.group(2))
    values = []
    for line in lines[1:]:
        try:
            values.append(float(line))
        except ValueError:
            raise SpectrumFormatError(f"unreadable eigenvalue line {line!r}") from None
    try:
        return Spectrum(values=tuple(values), n=n, l=l, provenance="file")
    except InvalidParameterError as exc:
        raise SpectrumFormatError(str(exc)) from None


def read_spectrum(path):
    with open(path, "r", encoding="ascii") as handle:
        return parse_spectrum(handle.read())


def format_spectrum_csv(spectrum):
    lines = [f"# n={spectrum.n} l={spectrum.l}"]
    lines.extend(repr(v) for v in spectrum.values)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DeltaSequence:
    """Positive non-increasing weight sequence."""

    values: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise InvalidParameterError("delta sequence must be nonempty")
        previous = math.inf
        for v in values:
            if not math.isfinite(v) or v <= 0.0:
                raise InvalidParameterError(f"delta entries must be positive finite, got {v}")
            if v > previous:
                raise InvalidParameterError("delta entries must be non-increasing")
            previous = v
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class BoundReport:
    """Outcome of scoring one inequality at one candidate.

    ``residual`` is lhs - rhs; the inequality is satisfied when the residual
    does not exceed ``tolerance`` = 1e-9 * max(1, |lhs|, |rhs|).  Solvers fill
    ``bound_value`` with the candidate they certify.
    """

    method: str
    k: int
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    satisfied: bool
    bound_value: object = None

    def to_dict(self):
        out = {
            "method": self.method,
            "k": self.k,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "satisfied": self.satisfied,
        }
        if self.bound_value is not None:
            out["bound_value"] = self.bound_value
        return out


def _report(method, k, lhs, rhs, bound_value=None):
    residual = lhs - rhs
    tolerance = RESIDUAL_TOLERANCE * max(1.0, abs(lhs), abs(rhs))
    return BoundReport(
        method=method,
        k=k,
        lhs=lhs,
        rhs=rhs,
        residual=residual,
        tolerance=tolerance,
        satisfied=residual <= tolerance,
        bound_value=bound_value,
    )


def _as_delta(delta, k):
    if not isinstance(delta, DeltaSequence):
        delta = DeltaSequence(tuple(delta))
    if len(delta) != k:
        raise InvalidParameterError(f"delta has length {len(delta)}, expected k={k}")
    return delta


def _check_candidate(spectrum, k, candidate):
    _require_int(k, "k", 1)
    if k > spectrum.k:
        raise InvalidParameterError(f"k={k} exceeds the spectrum length {spectrum.k}")
    candidate = float(candidate)
    if not math.isfinite(candidate):
        raise InvalidParameterError(f"candidate must be finite, got {candidate}")
    if candidate < spectrum.values[k - 1]:
        raise InvalidParameterError(
            f"candidate {candidate} is below eigenvalue {k} = {spectrum.values[k - 1]}"
        )
    return candidate


def _sphere_admissible(spectrum, k):
    # Every used eigenvalue must satisfy lam**(1/(l-1)) > n - 2.
    n, l = spectrum.n, spectrum.l
    roots = []
    for i in range(k):
        root = spectrum.values[i] ** (1.0 / (l - 1))
        if root - (n - 2) <= 0.0:
            raise DomainViolationError(
                f"eigenvalue {i + 1} = {spectrum.values[i]} violates "
                f"lam**(1/(l-1)) > n - 2 (root {root}, n - 2 = {n - 2})"
            )
        roots.append(root)
    return roots


def eval_thm11(spectrum, k, candidate, delta):
    """Score the Euclidean gap inequality at ``candidate`` with weights delta.

    lhs is n * sum of squared gaps; rhs couples each squared gap to the
    coefficient from ``euclidean_coefficient`` times lam**((l-2)/(l-1)) and
    each plain gap to lam**(1/(l-1)) / delta.
    """
    candidate = _check_candidate(spectrum, k, candidate)
    delta = _as_delta(delta, k)
    n, l = spectrum.n, spectrum.l
    coeff = float(euclidean_coefficient(n, l))
    e_heavy = (l - 2) / (l - 1)
    e_light = 1 / (l - 1)
    values = spectrum.values[:k]
    gaps = [candidate - v for v in values]
    lhs = n * math.fsum(g * g for g in gaps)
    rhs = math.fsum(
        d * g * g * coeff * v**e_heavy for d, g, v in zip(delta, gaps, values)
    ) + math.fsum(g / d * v**e_light for d, g, v in zip(delta, gaps, values))
    return _report("thm11", k, lhs, rhs)


def eval_eq112(spectrum, k, candidate):
    """Score the square-root form obtained from the constant optimal delta.

    Normalized like the weighted form (lhs carries the factor n) so the
    residual here equals the weighted residual at the optimal constant
    delta.
    """
    candidate = _check_candidate(spectrum, k, candidate)
    n, l = spectrum.n, spectrum.l
    coeff = float(euclidean_coefficient(n, l))
    e_heavy = (l - 2) / (l - 1)
    e_light = 1 / (l - 1)
    values = spectrum.values[:k]
    gaps = [candidate - v for v in values]
    lhs = n * math.fsum(g * g for g in gaps)
    t_heavy = math.fsum(g * g * v**e_heavy for g, v in zip(gaps, values))
    t_light = math.fsum(g * v**e_light for g, v in zip(gaps, values))
    rhs = 2.0 * math.sqrt(coeff) * math.sqrt(t_heavy) * math.sqrt(t_light)
    return _report("eq112", k, lhs, rhs)


def eval_cor11(spectrum, k, candidate):
    """Score the quadratic corollary: sum of squared gaps vs C * sum(gap * lam)."""
    candidate = _check_candidate(spectrum, k, candidate)
    n, l = spectrum.n, spectrum.l
    big_c = 4.0 * float(euclidean_coefficient(n, l)) / (n * n)
    values = spectrum.values[:k]
    gaps = [candidate - v for v in values]
    lhs = math.fsum(g * g for g in gaps)
    rhs = big_c * math.fsum(g * v for g, v in zip(gaps, values))
    return _report("cor11", k, lhs, rhs)


def optimize_delta(a, b):
    """Minimize sum(delta_i a_i + b_i / delta_i) over positive non-increasing delta.

    Unconstrained minimizers sqrt(b_i / a_i) are pooled by adjacent
    violators; a pooled block takes the value sqrt(sum b / sum a), which is
    the exact minimizer of the block subproblem.  All weights must be
    strictly positive.
    """
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    if len(a) != len(b) or not a:
        raise InvalidParameterError("weight lists must be nonempty and of equal length")
    for v in a + b:
        if not math.isfinite(v) or v <= 0.0:
            raise InvalidParameterError(f"weights must be positive finite, got {v}")
    blocks = []  # (sum_a, sum_b, count, value)
    for ai, bi in zip(a, b):
        sum_a, sum_b, count = ai, bi, 1
        value = math.sqrt(sum_b / sum_a)
        while blocks and blocks[-1][3] < value:
            pa, pb, pc, _ = blocks.pop()
            sum_a += pa
            sum_b += pb
            count += pc
            value = math.sqrt(sum_b / sum_a)
        blocks.append((sum_a, sum_b, count, value))
    out = []
    previous = math.inf
    for _, _, count, value in blocks:
        value = min(value, previous)
        out.extend([value] * count)
        previous = value
    return DeltaSequence(tuple(out))


def delta_objective(delta, a, b):
    """The bilinear objective sum(delta_i a_i) + sum(b_i / delta_i)."""
    values = list(delta)
    if len(values) != len(a) or len(a) != len(b):
        raise InvalidParameterError("objective needs matching lengths")
    return math.fsum(d * ai for d, ai in zip(values, a)) + math.fsum(
        bi / d for d, bi in zip(values, b)
    )


def thm11_optimal_delta(spectrum, k, candidate):
    """The minimizing weights for ``eval_thm11`` at one candidate.

    Gaps of zero contribute nothing to either side, so those trailing
    indices are excluded from the optimization and inherit the last
    optimized value (1.0 when every gap vanishes).
    """
    candidate = _check_candidate(spectrum, k, candidate)
    n, l = spectrum.n, spectrum.l
    coeff = float(euclidean_coefficient(n, l))
    e_heavy = (l - 2) / (l - 1)
    e_light = 1 / (l - 1)
    values = spectrum.values[:k]
    gaps = [candidate - v for v in values]
    kept = sum(1 for g in gaps if g > 0.0)
    if kept == 0:
        return DeltaSequence((1.0,) * k)
    a = [g * g * coeff * v**e_heavy for g, v in zip(gaps[:kept], values[:kept])]
    b = [g * v**e_light for g, v in zip(gaps[:kept], values[:kept])]
    head = list(optimize_delta(a, b))
    tail = [head[-1]] * (k - kept)
    return DeltaSequence(tuple(head + tail))


def next_bound_cor11(spectrum, k):
    """Largest root of the quadratic corollary, an upper bound for the next eigenvalue.

    With C = 4 * coefficient / n**2 the feasible candidates satisfy
    k x**2 - (2 + C) S1 x + (1 + C) S2 <= 0 where S1, S2 are the power sums
    of the first k eigenvalues.  A negative discriminant or a largest root
    below eigenvalue k means the input is not a buckling spectrum prefix.
    """
    _require_int(k, "k", 1)
    if k > spectrum.k:
        raise InvalidParameterError(f"k={k} exceeds the spectrum length {spectrum.k}")
    n, l = spectrum.n, spectrum.l
    big_c = 4.0 * float(euclidean_coefficient(n, l)) / (n * n)
    values = spectrum.values[:k]
    s1 = math.fsum(values)
    s2 = math.fsum(v * v for v in values)
    linear = (2.0 + big_c) * s1
    constant = (1.0 + big_c) * s2
    disc = linear * linear - 4.0 * k * constant
    if disc < 0.0:
        raise InfeasibleSpectrumError(
            f"negative discriminant {disc}: no candidate satisfies the quadratic bound"
        )
    root = (linear + math.sqrt(disc)) / (2.0 * k)
    top = values[-1]
    if root < top * (1.0 - 1e-12):
        raise InfeasibleSpectrumError(
            f"largest root {root} lies below eigenvalue {k} = {top}"
        )
    return max(root, top)


def _largest_root(f, start, max_doublings=MAX_DOUBLINGS, rel_tol=BISECT_RELATIVE):
    # Probe geometrically up to start * 2**max_doublings, keep the last sign
    # change, then bisect it.  Sub-doubling spacing matters: a feasible window
    # can open just above start (where f sits at roundoff from a saturated
    # prefix) and close before 2 * start, which factor-2 probes would skip.
    step = 2.0 ** (1.0 / PROBES_PER_DOUBLING)
    probes = [start * step**j for j in range(max_doublings * PROBES_PER_DOUBLING + 1)]
    signs = [f(x) for x in probes]
    lo = hi = None
    for left, right, f_left, f_right in zip(probes, probes[1:], signs, signs[1:]):
        if f_left <= 0.0 < f_right:
            lo, hi = left, right
    if lo is None:
        raise BracketError(
            f"no sign change within {max_doublings} doublings from {start}; "
            "the inequality brackets no candidate"
        )
    for _ in range(200):
        if hi - lo <= rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def next_bound_sharp(spectrum, k):
    """Largest candidate allowed by the square-root form, by bracketing and bisection."""
    _require_int(k, "k", 1)
    if k > spectrum.k:
        raise InvalidParameterError(f"k={k} exceeds the spectrum length {spectrum.k}")
    n, l = spectrum.n, spectrum.l
    coeff = float(euclidean_coefficient(n, l))
    e_heavy = (l - 2) / (l - 1)
    e_light = 1 / (l - 1)
    values = spectrum.values[:k]
    scale = 2.0 * math.sqrt(coeff) / n

    def shortfall(x):
        gaps = [x - v for v in values]
        lhs = math.fsum(g * g for g in gaps)
        t_heavy = math.fsum(g * g * v**e_heavy for g, v in zip(gaps, values))
        t_light = math.fsum(g * v**e_light for g, v in zip(gaps, values))
        return lhs - scale * math.sqrt(t_heavy) * math.sqrt(t_light)

    return _largest_root(shortfall, values[-1])


def eval_thm12(spectrum, k, candidate, delta):
    """Score the spherical-domain gap inequality at ``candidate`` with weights delta.

    Each eigenvalue must satisfy lam**(1/(l-1)) > n - 2.  The lhs weights a
    squared gap by 2 + (n-2)/(lam**(1/(l-1)) - (n-2)); the rhs couples
    squared gaps to delta_i * s_term and plain gaps to
    (lam**(1/(l-1)) + (n-2)**2/4) / delta_i.
    """
    candidate = _check_candidate(spectrum, k, candidate)
    delta = _as_delta(delta, k)
    n, l = spectrum.n, spectrum.l
    roots = _sphere_admissible(spectrum, k)
    values = spectrum.values[:k]
    gaps = [candidate - v for v in values]
    s_values = [s_term(l, n, v) for v in values]
    lhs = math.fsum(
        g * g * (2.0 + (n - 2) / (r - (n - 2))) for g, r in zip(gaps, roots)
    )
    quarter = (n - 2) ** 2 / 4.0
    rhs = math.fsum(g * g * d * s for g, d, s in zip(gaps, delta, s_values)) + math.fsum(
        g / d * (r + quarter) for g, d, r in zip(gaps, delta, roots)
    )
    return _report("thm12", k, lhs, rhs)


def next_bound_sphere(spectrum, k):
    """Largest candidate for which the spherical inequality with optimized delta holds.

    At each probe the weights are re-optimized over positive non-increasing
    sequences; zero-gap indices contribute nothing and are dropped.  Every
    s_term must be strictly positive, otherwise the inner minimization is
    unbounded and no finite bound exists.
    """
    _require_int(k, "k", 1)
    if k > spectrum.k:
        raise InvalidParameterError(f"k={k} exceeds the spectrum length {spectrum.k}")
    n, l = spectrum.n, spectrum.l
    roots = _sphere_admissible(spectrum, k)
    values = spectrum.values[:k]
    s_values = [s_term(l, n, v) for v in values]
    for i, s in enumerate(s_values):
        if s <= 0.0:
            raise InfeasibleSpectrumError(
                f"s_term of eigenvalue {i + 1} is {s} <= 0; the delta optimization "
                "needs positive quadratic weights, so no bound can be extracted "
                "from this prefix"
            )
    quarter = (n - 2) ** 2 / 4.0
    lhs_weights = [2.0 + (n - 2) / (r - (n - 2)) for r in roots]
    rhs_light = [r + quarter for r in roots]

    def shortfall(x):
        gaps = [x - v for v in values]
        kept = sum(1 for g in gaps if g > 0.0)
        if kept == 0:
            return 0.0
        a = [g * g * s for g, s in zip(gaps[:kept], s_values[:kept])]
        b = [g * c for g, c in zip(gaps[:kept], rhs_light[:kept])]
        delta = optimize_delta(a, b)
        lhs = math.fsum(g * g * w for g, w in zip(gaps[:kept], lhs_weights[:kept]))
        return lhs - delta_objective(delta, a, b)

    return _largest_root(shortfall, values[-1])


def chain_bounds(lambda1, count, n, l, method):
    """Iterate a next-bound solver from a single starting eigenvalue.

    Each produced bound joins the synthetic spectrum used for the next step,
    so entry j bounds eigenvalue j of any spectrum starting at lambda1.  The
    output is strictly increasing.
    """
    _require_int(count, "count", 1)
    lambda1 = float(lambda1)
    if not math.isfinite(lambda1) or lambda1 <= 0.0:
        raise InvalidParameterError(f"lambda1 must be positive finite, got {lambda1}")
    solvers = {"cor11": next_bound_cor11, "sharp": next_bound_sharp}
    if method not in solvers:
        raise InvalidParameterError(f"method must be one of {sorted(solvers)}, got {method!r}")
    solver = solvers[method]
    values = [lambda1]
    for j in range(1, count):
        spectrum = Spectrum(values=tuple(values), n=n, l=l, provenance="synthetic")
        nxt = solver(spectrum, j)
        if nxt <= values[-1]:
            raise InternalConsistencyError(
                f"chain stalled at step {j}: bound {nxt} does not exceed {values[-1]}"
            )
        values.append(nxt)
    return values


def eval_l2_priors(spectrum, k, candidate, delta_scalar=1.0):
    """Score the three earlier order-2 inequalities for comparison.

    prior16 and prior18 are the quadratic forms with coefficients
    4(n+2)/n**2 and 4(n+4/3)/n**2; prior18 is sharper since 4/3 < 2.
    prior19 is the spherical single-weight form and uses ``delta_scalar``.
    Only meaningful at l = 2.
    """
    if spectrum.l != 2:
        raise InvalidParameterError(f"the prior inequalities require l=2, got l={spectrum.l}")
    candidate = _check_candidate(spectrum, k, candidate)
    delta_scalar = float(delta_scalar)
    if not math.isfinite(delta_scalar) or delta_scalar <= 0.0:
        raise InvalidParameterError(f"delta must be positive finite, got {delta_scalar}")
    n = spectrum.n
    values = spectrum.values[:k]
    gaps = [candidate - v for v in values]
    sq = math.fsum(g * g for g in gaps)
    cross = math.fsum(g * v for g, v in zip(gaps, values))
    reports = [
        _report("prior16", k, sq, 4.0 * (n + 2.0) / (n * n) * cross),
        _report("prior18", k, sq, 4.0 * (n + 4.0 / 3.0) / (n * n) * cross),
    ]
    d = delta_scalar
    heavy = math.fsum(
        g * g * (d * v + d * d * (v - (n - 2)) / (4.0 * (d * v + n - 2)))
        for g, v in zip(gaps, values)
    )
    light = math.fsum(g * (v + (n - 2) ** 2 / 4.0) for g, v in zip(gaps, values)) / d
    reports.append(_report("prior19", k, 2.0 * sq, heavy + light))
    return reports
