import math
from fractions import Fraction

import numpy as np
import pytest

from buckbounds import (
    DeltaSequence,
    DomainViolationError,
    InfeasibleSpectrumError,
    InvalidParameterError,
    Spectrum,
    SpectrumFormatError,
    chain_bounds,
    delta_objective,
    euclidean_coefficient,
    eval_cor11,
    eval_eq112,
    eval_l2_priors,
    eval_thm11,
    eval_thm12,
    format_spectrum_csv,
    next_bound_cor11,
    next_bound_sharp,
    next_bound_sphere,
    optimize_delta,
    parse_spectrum,
    thm11_optimal_delta,
)
from buckbounds.errors import BracketError
from buckbounds.polyrec import s_term

import oracles


def random_spectrum(rng, n=None, l=None, k=None):
    n = n if n is not None else int(rng.integers(2, 6))
    l = l if l is not None else int(rng.integers(2, 6))
    k = k if k is not None else int(rng.integers(1, 7))
    start = float(rng.uniform(0.5, 20.0))
    values = start + np.cumsum(rng.uniform(0.0, 10.0, size=k))
    return Spectrum(values=tuple(float(v) for v in values), n=n, l=l)


# -- spectrum parsing and validation


def test_spectrum_round_trip_preserves_floats():
    spectrum = Spectrum(values=(1.0, math.pi, 11.000000000000002), n=3, l=4)
    text = format_spectrum_csv(spectrum)
    back = parse_spectrum(text)
    assert back.values == spectrum.values
    assert (back.n, back.l) == (3, 4)
    assert back.provenance == "file"


def test_parse_spectrum_rejects_bad_input():
    with pytest.raises(SpectrumFormatError):
        parse_spectrum("")
    with pytest.raises(SpectrumFormatError):
        parse_spectrum("1.0\n2.0\n")
    with pytest.raises(SpectrumFormatError):
        parse_spectrum("# n=2 l=2\nane\n")
    with pytest.raises(SpectrumFormatError):
        parse_spectrum("# n=2 l=2\n2.0\n1.0\n")
    with pytest.raises(SpectrumFormatError):
        parse_spectrum("# n=2 l=2\n-1.0\n")


def test_spectrum_validation():
    with pytest.raises(InvalidParameterError):
        Spectrum(values=(), n=2, l=2)
    with pytest.raises(InvalidParameterError):
        Spectrum(values=(1.0,), n=2, l=1)
    with pytest.raises(InvalidParameterError):
        Spectrum(values=(1.0,), n=0, l=2)
    with pytest.raises(InvalidParameterError):
        Spectrum(values=(1.0,), n=2, l=2, provenance="guessed")
    with pytest.raises(InvalidParameterError):
        Spectrum(values=(math.inf,), n=2, l=2)


def test_delta_sequence_validation():
    assert tuple(DeltaSequence((3.0, 3.0, 1.0))) == (3.0, 3.0, 1.0)
    with pytest.raises(InvalidParameterError):
        DeltaSequence((1.0, 2.0))
    with pytest.raises(InvalidParameterError):
        DeltaSequence((1.0, 0.0))
    with pytest.raises(InvalidParameterError):
        DeltaSequence(())


# -- the dimensional coefficient


def test_coefficient_values():
    assert euclidean_coefficient(2, 2) == Fraction(10, 3)
    assert euclidean_coefficient(3, 3) == Fraction(38, 3)
    for n in range(2, 9):
        assert euclidean_coefficient(n, 2) == n + Fraction(4, 3)
        for l in range(2, 9):
            assert euclidean_coefficient(n, l) > 0


def test_coefficient_is_exact():
    value = euclidean_coefficient(5, 4)
    assert isinstance(value, Fraction)
    assert value == Fraction(6 * 16 + 3 * 5 * 4 - 14 * 4 + 8 - 3 * 5, 3)


def test_coefficient_validation():
    with pytest.raises(InvalidParameterError):
        euclidean_coefficient(1, 2)
    with pytest.raises(InvalidParameterError):
        euclidean_coefficient(2, 1)


# -- inequality evaluators, hand instances


def test_eval_thm11_hand_instance():
    spectrum = Spectrum(values=(1.0,), n=2, l=2)
    report = eval_thm11(spectrum, 1, 2.0, (1.0,))
    assert report.lhs == 2.0
    assert report.rhs == pytest.approx(13.0 / 3.0, rel=1e-15)
    assert report.residual == pytest.approx(-7.0 / 3.0, rel=1e-15)
    assert report.satisfied
    double = eval_thm11(Spectrum(values=(1.0, 1.0), n=2, l=2), 2, 2.0, (1.0, 1.0))
    assert double.lhs == 4.0
    assert double.rhs == pytest.approx(26.0 / 3.0, rel=1e-15)


def test_eval_report_fields():
    spectrum = Spectrum(values=(1.0, 2.0), n=2, l=2)
    report = eval_cor11(spectrum, 2, 4.0)
    assert report.method == "cor11"
    assert report.k == 2
    assert report.residual == report.lhs - report.rhs
    assert report.tolerance == 1e-9 * max(1.0, abs(report.lhs), abs(report.rhs))
    keys = set(report.to_dict())
    assert keys == {"method", "k", "lhs", "rhs", "residual", "tolerance", "satisfied"}


def test_candidate_must_dominate_kth_eigenvalue():
    spectrum = Spectrum(values=(1.0, 2.0), n=2, l=2)
    with pytest.raises(InvalidParameterError):
        eval_cor11(spectrum, 2, 1.5)
    with pytest.raises(InvalidParameterError):
        eval_thm11(spectrum, 3, 5.0, (1.0, 1.0, 1.0))
    with pytest.raises(InvalidParameterError):
        eval_thm11(spectrum, 2, 5.0, (1.0,))


def test_eq112_equals_thm11_at_constant_optimal_delta():
    # the square-root form is the weighted form minimized over constant delta
    rng = np.random.default_rng(31)
    worst = 0.0
    for _ in range(300):
        spectrum = random_spectrum(rng)
        k = spectrum.k
        candidate = spectrum.values[-1] * float(rng.uniform(1.0, 3.0))
        if candidate == spectrum.values[-1]:
            continue
        n, l = spectrum.n, spectrum.l
        coeff = float(euclidean_coefficient(n, l))
        gaps = [candidate - v for v in spectrum.values]
        t_heavy = math.fsum(
            g * g * v ** ((l - 2) / (l - 1)) for g, v in zip(gaps, spectrum.values)
        )
        t_light = math.fsum(g * v ** (1 / (l - 1)) for g, v in zip(gaps, spectrum.values))
        star = math.sqrt(t_light / (coeff * t_heavy))
        weighted = eval_thm11(spectrum, k, candidate, (star,) * k)
        plain = eval_eq112(spectrum, k, candidate)
        scale = max(1.0, abs(plain.lhs), abs(plain.rhs))
        worst = max(worst, abs(weighted.residual - plain.residual) / scale)
    assert worst <= 1e-12


def test_cor11_hand_instance():
    spectrum = Spectrum(values=(1.0, 2.0), n=2, l=2)
    report = eval_cor11(spectrum, 2, 4.0)
    assert report.lhs == 13.0
    assert report.rhs == pytest.approx(4.0 * (10.0 / 3.0) / 4.0 * 7.0, rel=1e-15)


# -- weight optimization


def test_optimize_delta_unconstrained_case():
    delta = optimize_delta((1.0, 4.0), (1.0, 1.0))
    assert tuple(delta) == (1.0, 0.5)


def test_optimize_delta_pooled_case():
    delta = optimize_delta((4.0, 1.0), (1.0, 1.0))
    pooled = math.sqrt(2.0 / 5.0)
    assert tuple(delta) == (pooled, pooled)


def test_optimize_delta_flat_case():
    assert tuple(optimize_delta((1.0, 1.0, 1.0), (1.0, 1.0, 1.0))) == (1.0, 1.0, 1.0)


def test_optimize_delta_never_loses_to_any_feasible_delta():
    rng = np.random.default_rng(32)
    for _ in range(2000):
        k = int(rng.integers(1, 7))
        a = rng.uniform(0.1, 10.0, size=k)
        b = rng.uniform(0.1, 10.0, size=k)
        best = optimize_delta(a, b)
        optimum = delta_objective(best, a, b)
        steps = rng.uniform(0.0, 2.0, size=k)
        steps[0] += 1e-3
        rival = tuple(np.cumsum(steps[::-1])[::-1])
        assert optimum <= delta_objective(rival, a, b) * (1.0 + 1e-12)


def test_optimize_delta_matches_partition_enumeration():
    rng = np.random.default_rng(33)
    for _ in range(200):
        k = int(rng.integers(1, 7))
        a = tuple(float(v) for v in rng.uniform(0.1, 10.0, size=k))
        b = tuple(float(v) for v in rng.uniform(0.1, 10.0, size=k))
        value = delta_objective(optimize_delta(a, b), a, b)
        assert value == pytest.approx(oracles.partition_min_objective(a, b), rel=1e-12)


def test_optimize_delta_matches_grid_search():
    a = (3.0, 1.0, 0.5)
    b = (0.25, 1.0, 2.0)
    ours = delta_objective(optimize_delta(a, b), a, b)
    _, reference = oracles.grid_search_delta(a, b)
    assert ours == pytest.approx(reference, rel=1e-10)


def test_optimize_delta_output_is_feasible():
    rng = np.random.default_rng(34)
    for _ in range(300):
        k = int(rng.integers(1, 9))
        delta = optimize_delta(rng.uniform(0.01, 50.0, size=k), rng.uniform(0.01, 50.0, size=k))
        values = tuple(delta)
        assert all(v > 0.0 for v in values)
        assert all(x >= y for x, y in zip(values, values[1:]))


def test_optimize_delta_validation():
    with pytest.raises(InvalidParameterError):
        optimize_delta((), ())
    with pytest.raises(InvalidParameterError):
        optimize_delta((1.0,), (1.0, 2.0))
    with pytest.raises(InvalidParameterError):
        optimize_delta((0.0,), (1.0,))


def test_thm11_optimal_delta_beats_constant_choices():
    rng = np.random.default_rng(35)
    for _ in range(200):
        spectrum = random_spectrum(rng)
        k = spectrum.k
        candidate = spectrum.values[-1] * float(rng.uniform(1.0001, 2.0))
        best = thm11_optimal_delta(spectrum, k, candidate)
        tuned = eval_thm11(spectrum, k, candidate, best)
        for scale in (0.5, 1.0, 2.0):
            flat = eval_thm11(spectrum, k, candidate, (scale,) * k)
            assert tuned.rhs <= flat.rhs * (1.0 + 1e-12)


def test_thm11_optimal_delta_handles_zero_gaps():
    spectrum = Spectrum(values=(1.0, 2.0, 2.0), n=2, l=2)
    delta = thm11_optimal_delta(spectrum, 3, 2.0)
    values = tuple(delta)
    assert len(values) == 3
    assert values[1] == values[2]
    flat = thm11_optimal_delta(Spectrum(values=(2.0, 2.0), n=2, l=2), 2, 2.0)
    assert tuple(flat) == (1.0, 1.0)


# -- next-eigenvalue solvers, Euclidean


def test_cor11_first_bound_is_exact():
    spectrum = Spectrum(values=(1.0,), n=2, l=2)
    assert next_bound_cor11(spectrum, 1) == pytest.approx(13.0 / 3.0, rel=1e-15)
    for n in (2, 3, 5):
        for l in (2, 3, 4):
            big_c = 4.0 * float(euclidean_coefficient(n, l)) / (n * n)
            one = Spectrum(values=(7.0,), n=n, l=l)
            assert next_bound_cor11(one, 1) == pytest.approx(7.0 * (1.0 + big_c), rel=1e-13)


def test_cor11_matches_quadratic_oracle():
    rng = np.random.default_rng(36)
    for _ in range(200):
        spectrum = random_spectrum(rng)
        k = spectrum.k
        try:
            ours = next_bound_cor11(spectrum, k)
        except InfeasibleSpectrumError:
            continue
        reference = oracles.yang_quadratic_bound(spectrum.values, k, spectrum.n, spectrum.l)
        assert ours == pytest.approx(reference, rel=1e-12)


def test_cor11_two_gap_instance():
    spectrum = Spectrum(values=(1.0, 2.0), n=2, l=2)
    expected = (16.0 + math.sqrt(256.0 - 520.0 / 3.0)) / 4.0
    assert next_bound_cor11(spectrum, 2) == pytest.approx(expected, rel=1e-14)


def test_cor11_rejects_non_spectrum_prefix():
    stretched = Spectrum(values=(1.0, 100.0), n=2, l=2)
    with pytest.raises(InfeasibleSpectrumError):
        next_bound_cor11(stretched, 2)


def test_cor11_scale_covariance():
    rng = np.random.default_rng(37)
    for _ in range(100):
        spectrum = random_spectrum(rng, k=int(rng.integers(1, 5)))
        factor = float(rng.uniform(0.1, 50.0))
        scaled = Spectrum(
            values=tuple(factor * v for v in spectrum.values), n=spectrum.n, l=spectrum.l
        )
        try:
            base = next_bound_cor11(spectrum, spectrum.k)
        except InfeasibleSpectrumError:
            continue
        assert next_bound_cor11(scaled, scaled.k) == pytest.approx(factor * base, rel=1e-12)


def test_sharp_first_bound_matches_closed_form():
    spectrum = Spectrum(values=(1.0,), n=2, l=2)
    assert next_bound_sharp(spectrum, 1) == pytest.approx(13.0 / 3.0, rel=1e-12)


def test_sharp_never_exceeds_cor11():
    rng = np.random.default_rng(38)
    checked = 0
    for _ in range(300):
        spectrum = random_spectrum(rng)
        k = spectrum.k
        try:
            quad = next_bound_cor11(spectrum, k)
            sharp = next_bound_sharp(spectrum, k)
        except (InfeasibleSpectrumError, BracketError):
            continue
        assert sharp <= quad * (1.0 + 1e-9)
        checked += 1
    assert checked > 150


def test_sharp_matches_scan_oracle():
    spectrum = Spectrum(values=(2.0, 5.0, 7.0), n=3, l=2)
    ours = next_bound_sharp(spectrum, 3)
    coeff = float(euclidean_coefficient(3, 2))

    def shortfall(x):
        gaps = [x - v for v in spectrum.values]
        lhs = math.fsum(g * g for g in gaps)
        t_heavy = math.fsum(g * g for g in gaps)
        t_light = math.fsum(g * v for g, v in zip(gaps, spectrum.values))
        return lhs - (2.0 * math.sqrt(coeff) / 3.0) * math.sqrt(t_heavy * t_light)

    reference = oracles.scan_bisect_root(shortfall, 7.0)
    assert ours == pytest.approx(reference, rel=1e-11)


def test_sharp_scale_covariance():
    spectrum = Spectrum(values=(1.0, 3.0, 4.5), n=2, l=3)
    base = next_bound_sharp(spectrum, 3)
    scaled = Spectrum(values=(10.0, 30.0, 45.0), n=2, l=3)
    assert next_bound_sharp(scaled, 3) == pytest.approx(10.0 * base, rel=1e-11)


def test_sharp_brackets_nothing_on_stretched_spectrum():
    stretched = Spectrum(values=(1.0, 100.0), n=2, l=2)
    with pytest.raises(BracketError):
        next_bound_sharp(stretched, 2)


def test_chain_bounds_known_prefix():
    chain = chain_bounds(1.0, 4, 2, 2, "cor11")
    assert chain[0] == 1.0
    assert chain[1] == pytest.approx(13.0 / 3.0, rel=1e-15)
    assert chain[2] == pytest.approx(89.0 / 9.0, rel=1e-14)
    assert all(b > a for a, b in zip(chain, chain[1:]))
    sharp_chain = chain_bounds(1.0, 4, 2, 2, "sharp")
    for quad, sharp in zip(chain, sharp_chain):
        assert sharp <= quad * (1.0 + 1e-9)


def test_chain_bounds_validation():
    with pytest.raises(InvalidParameterError):
        chain_bounds(1.0, 3, 2, 2, "sphere")
    with pytest.raises(InvalidParameterError):
        chain_bounds(-1.0, 3, 2, 2, "cor11")
    with pytest.raises(InvalidParameterError):
        chain_bounds(1.0, 0, 2, 2, "cor11")


# -- spherical form


def test_eval_thm12_hand_instance():
    spectrum = Spectrum(values=(2.0,), n=3, l=2)
    report = eval_thm12(spectrum, 1, 3.0, (1.0,))
    assert report.lhs == 3.0
    assert report.rhs == 3.25
    assert report.residual == -0.25
    assert report.satisfied


def test_eval_thm12_rejects_inadmissible_eigenvalues():
    low = Spectrum(values=(1.0,), n=3, l=2)
    with pytest.raises(DomainViolationError):
        eval_thm12(low, 1, 2.0, (1.0,))
    deep = Spectrum(values=(3.9,), n=4, l=3)
    with pytest.raises(DomainViolationError):
        eval_thm12(deep, 1, 9.0, (1.0,))


def test_eval_thm12_zero_gap_is_trivially_tight():
    spectrum = Spectrum(values=(3.0, 3.0), n=3, l=2)
    report = eval_thm12(spectrum, 2, 3.0, (1.0, 1.0))
    assert report.lhs == 0.0
    assert report.rhs == 0.0
    assert report.satisfied


def test_s_term_reduces_to_identity_at_n2_l2():
    rng = np.random.default_rng(39)
    for lam in rng.uniform(0.2, 500.0, size=50):
        assert s_term(2, 2, float(lam)) == pytest.approx(float(lam), rel=1e-12)


def test_sphere_first_bound_closed_form():
    spectrum = Spectrum(values=(2.0,), n=3, l=2)
    bound = next_bound_sphere(spectrum, 1)
    # single gap: x = lam + 4 * (lam + (n-2)^2/4) / w^2 with w = 3
    assert bound == pytest.approx(3.0, rel=1e-12)


def test_sphere_bound_matches_oracle():
    spectrum = Spectrum(values=(9.0, 16.0), n=3, l=3)
    ours = next_bound_sphere(spectrum, 2)
    reference = oracles.sphere_bound_oracle((9.0, 16.0), 3, 3, 2)
    assert abs(ours - reference) <= 1e-12 * max(1.0, abs(reference))
    assert ours == pytest.approx(98.72673861575, rel=1e-12)


def test_sphere_bound_random_instances_agree_with_oracle():
    rng = np.random.default_rng(40)
    checked = 0
    for _ in range(60):
        n = int(rng.integers(2, 5))
        l = int(rng.integers(2, 5))
        k = int(rng.integers(1, 4))
        floor = (n - 2) ** (l - 1)
        start = floor + float(rng.uniform(0.5, 5.0))
        values = start + np.cumsum(rng.uniform(0.0, 5.0, size=k))
        spectrum = Spectrum(values=tuple(float(v) for v in values), n=n, l=l)
        try:
            ours = next_bound_sphere(spectrum, k)
        except InfeasibleSpectrumError:
            continue
        reference = oracles.sphere_bound_oracle(spectrum.values, n, l, k)
        assert abs(ours - reference) <= 1e-11 * max(1.0, abs(reference))
        checked += 1
    assert checked > 30


def test_sphere_bound_exceeds_constant_spectrum():
    spectrum = Spectrum(values=(5.0, 5.0, 5.0), n=3, l=2)
    bound = next_bound_sphere(spectrum, 3)
    assert bound > 5.0


def test_sphere_bound_rejects_nonpositive_s_term():
    # s_term goes negative just above the admissibility threshold
    spectrum = Spectrum(values=(2.05, 2.1), n=4, l=2)
    with pytest.raises(InfeasibleSpectrumError):
        next_bound_sphere(spectrum, 2)


# -- order-2 comparison forms


def test_l2_priors_frozen_values():
    spectrum = Spectrum(values=(1.0, 2.0), n=2, l=2)
    p16, p18, p19 = eval_l2_priors(spectrum, 2, 4.0, 1.0)
    assert (p16.lhs, p16.rhs) == (13.0, 28.0)
    assert p18.lhs == 13.0
    assert p18.rhs == pytest.approx(70.0 / 3.0, rel=1e-15)
    assert (p19.lhs, p19.rhs) == (26.0, 27.25)


def test_l2_prior18_is_tight_at_its_own_bound():
    spectrum = Spectrum(values=(1.0,), n=2, l=2)
    _, p18, _ = eval_l2_priors(spectrum, 1, 13.0 / 3.0)
    assert p18.residual == 0.0
    assert p18.satisfied


def test_l2_priors_ordering():
    # coefficient 4/3 < 2 makes prior18 at least as strong as prior16
    rng = np.random.default_rng(41)
    for _ in range(100):
        spectrum = random_spectrum(rng, l=2)
        candidate = spectrum.values[-1] * float(rng.uniform(1.0, 2.0))
        p16, p18, _ = eval_l2_priors(spectrum, spectrum.k, candidate)
        assert p18.rhs <= p16.rhs
        assert p16.lhs == p18.lhs


def test_l2_priors_zero_gap():
    spectrum = Spectrum(values=(4.0, 4.0), n=3, l=2)
    for report in eval_l2_priors(spectrum, 2, 4.0, 2.0):
        assert report.residual == 0.0


def test_thm11_order_two_matches_literal_oracle():
    rng = np.random.default_rng(42)
    for _ in range(100):
        spectrum = random_spectrum(rng, l=2)
        k = spectrum.k
        candidate = spectrum.values[-1] * float(rng.uniform(1.0, 2.0))
        delta = tuple(np.cumsum(rng.uniform(0.01, 1.0, size=k)[::-1])[::-1])
        report = eval_thm11(spectrum, k, candidate, delta)
        reference = oracles.l2_rhs_linear_gap(
            spectrum.n, spectrum.values, k, candidate, delta
        )
        assert report.rhs == pytest.approx(reference, rel=1e-12)


def test_l2_priors_require_order_two():
    spectrum = Spectrum(values=(1.0,), n=2, l=3)
    with pytest.raises(InvalidParameterError):
        eval_l2_priors(spectrum, 1, 2.0)
    flat = Spectrum(values=(1.0,), n=2, l=2)
    with pytest.raises(InvalidParameterError):
        eval_l2_priors(flat, 1, 2.0, delta_scalar=0.0)
