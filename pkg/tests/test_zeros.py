from dataclasses import replace

import numpy as np
import pytest

from robin_nls.errors import AZero, RealZero, ValidationFailure
from robin_nls.scattering import InitialProfile, build_table, evaluate_delta
from robin_nls.zeros import (
    DiscreteSpectrum,
    Rectangle,
    count_zeros,
    default_region,
    delta_derivative,
    discrete_spectrum,
    locate_zeros,
    residue_constants,
    scan_delta_minima,
)

from conftest import K_GRID


def test_counts(gaussian_table, defocusing_table, focusing_table, focusing_two_table):
    assert count_zeros(gaussian_table) == 0
    assert count_zeros(defocusing_table) == 1
    assert count_zeros(focusing_table) == 1
    assert count_zeros(focusing_two_table) == 2


def test_zero_potential_has_no_discrete_spectrum():
    profile = InitialProfile(samples=np.zeros(33), h=0.25, lam=-1, q=0.8)
    spectrum = discrete_spectrum(profile, build_table(profile, K_GRID))
    assert spectrum.M == 0
    assert len(spectrum.dropped) == 1
    assert spectrum.reflectionless_data().M == 0


def test_defocusing_soliton_pole_and_residue(defocusing_profile, defocusing_table, defocusing_params):
    spectrum = discrete_spectrum(defocusing_profile, defocusing_table)
    assert spectrum.M == 1
    assert abs(spectrum.xi[0] - 0.5j) <= 1e-6
    assert abs(spectrum.c[0] - 1j / (np.sqrt(2.0) + 1.0)) <= 1e-6
    assert abs(spectrum.c[0] - defocusing_params.c1) <= 1e-6


def test_focusing_soliton_pole_and_residue(focusing_profile, focusing_table):
    spectrum = discrete_spectrum(focusing_profile, focusing_table)
    assert spectrum.M == 1
    assert abs(spectrum.xi[0] - 0.5j) <= 1e-6
    assert abs(spectrum.c[0] + 1j * np.exp(-0.5)) <= 1e-6
    assert spectrum.dropped == ()


def test_common_zero_of_a_is_dropped(focusing_two_profile, focusing_two_table):
    spectrum = discrete_spectrum(focusing_two_profile, focusing_two_table)
    assert spectrum.M == 1
    assert abs(spectrum.xi[0] - 0.5j) <= 1e-6
    assert len(spectrum.dropped) == 1
    assert abs(spectrum.dropped[0] - 0.5j * np.tanh(0.5)) <= 1e-6


def test_common_zero_of_a_raises_when_strict(focusing_two_profile, focusing_two_table):
    with pytest.raises(AZero):
        discrete_spectrum(focusing_two_profile, focusing_two_table, strict=True)


def test_locate_orders_by_imaginary_part(focusing_two_profile):
    spectrum = locate_zeros(focusing_two_profile, 2)
    assert spectrum.xi[0].imag > spectrum.xi[1].imag
    assert spectrum.c is None


def test_residue_constants_are_stable_in_the_circle_radius(defocusing_profile):
    spectrum = locate_zeros(defocusing_profile, 1)
    small = residue_constants(defocusing_profile, spectrum, radius_scale=0.5)
    large = residue_constants(defocusing_profile, spectrum, radius_scale=1.0)
    assert abs(small.c[0] - large.c[0]) <= 1e-7


def test_delta_derivative_matches_closed_form(defocusing_profile, defocusing_params):
    rho, q = defocusing_params.rho1, defocusing_params.q_s
    derivative = delta_derivative(defocusing_profile, 1j * rho, radius=0.1)
    assert abs(derivative - (2 * rho + q) / (2 * rho)) <= 1e-6


def test_real_zero_is_reported(defocusing_table):
    # a table whose Delta vanishes at one node
    samples = list(defocusing_table.samples)
    mid = len(samples) // 2

    samples[mid] = replace(samples[mid], delta=0j, delta_vanishes=True)
    broken = replace(defocusing_table, samples=tuple(samples))
    with pytest.raises(RealZero):
        count_zeros(broken)


def test_rectangle_boundary_is_closed_and_counter_clockwise():
    box = Rectangle(complex(-1.0, 0.5), complex(2.0, 1.5))
    z = box.boundary(8)
    assert z[0] == z[-1]
    assert z.size == 4 * 8 + 1
    # shoelace area is positive for counter-clockwise orientation
    area = 0.5 * np.sum(z[:-1].real * z[1:].imag - z[1:].real * z[:-1].imag)
    assert area == pytest.approx(box.width * box.height)


def test_rectangle_split_covers_the_box():
    box = Rectangle(complex(-2.0, 0.0), complex(2.0, 1.0))
    left, right = box.split(0.5)
    assert left.hi.real == right.lo.real == 0.0
    assert left.width + right.width == pytest.approx(box.width)
    assert default_region(8.0).contains(0.5j)


def test_scan_finds_the_soliton_pole(focusing_profile):
    minima = scan_delta_minima(focusing_profile, Rectangle(complex(-1.0, 0.05), complex(1.0, 1.05)))
    assert any(abs(z - 0.5j) <= 0.05 for z in minima)


def test_spectrum_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        DiscreteSpectrum(lam=1, q=1.0, xi=(-0.5j,))
    with pytest.raises(ValidationFailure):
        DiscreteSpectrum(lam=1, q=1.0, xi=(0.5j, 0.5j), c=(1j, 1j)).reflectionless_data()


def _bumped(profile, amount):
    return InitialProfile(
        samples=profile.samples + amount * np.exp(-profile.x ** 2),
        h=profile.h, lam=profile.lam, q=profile.q,
    )


def test_zeros_move_linearly_with_the_perturbation(focusing_two_profile):
    base = locate_zeros(focusing_two_profile, 2).xi
    moves = []
    for amount in (1e-2, 1e-3):
        moved = locate_zeros(_bumped(focusing_two_profile, amount), 2).xi
        moves.append(np.abs(np.array(moved) - np.array(base)))
    assert np.all(moves[1] > 0)
    assert np.all((moves[0] / moves[1] >= 8.0) & (moves[0] / moves[1] <= 12.0))


def test_delta_is_conjugation_symmetric_at_the_zeros(focusing_profile):
    profile = InitialProfile(
        samples=focusing_profile.samples + 0.05 * np.exp(-focusing_profile.x ** 2) * np.exp(1j * focusing_profile.x),
        h=focusing_profile.h, lam=focusing_profile.lam, q=focusing_profile.q,
    )
    table = build_table(profile, K_GRID)
    spectrum = locate_zeros(profile, count_zeros(table))
    for xi in spectrum.xi:
        values = evaluate_delta(profile, [xi, -np.conj(xi)], converge=True)["delta"]
        assert abs(values[0] + np.conj(values[1])) <= 1e-10


def test_grid_scan_agrees_with_the_count(focusing_profile):
    profile = _bumped(focusing_profile, 0.05)
    count = count_zeros(build_table(profile, K_GRID))
    located = locate_zeros(profile, count).xi
    minima = scan_delta_minima(profile, Rectangle(complex(-1.0, 0.05), complex(1.0, 1.05)))
    assert len(minima) == count
    for xi in located:
        assert min(abs(z - xi) for z in minima) <= 0.05


def test_cauchy_radius_override(defocusing_profile, tol):
    spectrum = locate_zeros(defocusing_profile, 1)
    narrow = tol.model_copy(update={"cauchy_radius": 0.05})
    default = residue_constants(defocusing_profile, spectrum)
    assert abs(residue_constants(defocusing_profile, spectrum, narrow).c[0] - default.c[0]) <= 1e-7
