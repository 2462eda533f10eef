import numpy as np
import pytest

from robin_nls.errors import DomainError, PoleEvaluation, SingularW, ValidationFailure
from robin_nls.solitons import (
    ReflectionlessData,
    ReflectionlessSolution,
    RenormalizedBox,
    SolitonParams,
    darboux_dress,
    one_soliton_m,
    robin_beta,
    robin_determinant,
    shift_from_w,
    soliton_profile,
    soliton_spectral_functions,
    solve_reflectionless,
    solve_renormalized,
    stationary_soliton,
)

IDENTITY = np.eye(2, dtype=complex)


def _random_k(rng, avoid, radius=0.05):
    while True:
        k = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if all(abs(k - z) > radius for z in avoid):
            return k


@pytest.mark.parametrize("params_name", ["defocusing_params", "focusing_params", "focusing_two_params"])
def test_closed_form_matches_linear_system(params_name, request, rng):
    params = request.getfixturevalue(params_name)
    data = params.data()
    for _ in range(50):
        x, t = rng.uniform(0.0, 6.0), rng.uniform(0.0, 4.0)
        k = _random_k(rng, [params.xi1, np.conj(params.xi1)])
        solution = ReflectionlessSolution.solve(data, x, t)
        closed = one_soliton_m(params, x, t, k)
        m = solution.m(k)
        assert np.max(np.abs(m - closed)) <= 1e-10
        assert abs(np.linalg.det(m) - 1.0) <= 1e-10
        assert abs(solution.u - stationary_soliton(params, x, t)) <= 1e-10


def test_one_soliton_m_rejects_poles(focusing_params):
    with pytest.raises(PoleEvaluation):
        one_soliton_m(focusing_params, 0.0, 0.0, focusing_params.xi1)


def test_residue_defect_vanishes_at_the_pole():
    data = ReflectionlessData(xi=(0.5j, 0.4 + 0.8j), c=(-0.6j, 0.3 + 0.2j), lam=-1)
    solution = ReflectionlessSolution.solve(data, 0.7, 0.3)
    defects = [solution.residue_defect(1, data.xi[1] + eps * (1 + 1j)) for eps in (1e-2, 1e-3, 1e-4)]
    assert defects[2] < defects[0] / 50


def test_two_soliton_solves_nls():
    data = ReflectionlessData(xi=(0.5j, 0.4 + 0.8j), c=(-0.6j, 0.3 + 0.2j), lam=-1)
    h = 1e-3
    x, t = 1.0, 0.3

    def u(x, t):
        return ReflectionlessSolution.solve(data, x, t).u

    u_t = (u(x, t + h) - u(x, t - h)) / (2 * h)
    u_xx = (u(x + h, t) - 2 * u(x, t) + u(x - h, t)) / h ** 2
    value = u(x, t)
    residual = 1j * u_t + u_xx - 2 * data.lam * abs(value) ** 2 * value
    assert abs(residual) <= 1e-5


def test_solve_reflectionless_returns_values_and_u(focusing_params):
    values, u = solve_reflectionless(focusing_params.data(), 1.0, 0.5, ks=[1.0, 2j])
    assert values.shape == (2, 2, 2)
    assert u == pytest.approx(stationary_soliton(focusing_params, 1.0, 0.5), abs=1e-12)


def test_empty_data_gives_zero_solution():
    values, u = solve_reflectionless(ReflectionlessData(xi=(), c=(), lam=1), 0.3, 1.0, ks=[0.5])
    assert u == 0
    assert np.array_equal(values[0], IDENTITY)


@pytest.mark.parametrize(
    "xi, c",
    [
        ((-0.5j,), (1.0,)),
        ((0.5j,), (0.0,)),
        ((0.5j, 0.5j), (1.0, 2.0)),
        ((0.5j,), (1.0, 2.0)),
    ],
)
def test_reflectionless_data_validation(xi, c):
    with pytest.raises(ValidationFailure):
        ReflectionlessData(xi=xi, c=c, lam=-1)


def test_soliton_params_validation():
    with pytest.raises(ValueError):
        SolitonParams(lam=-1, omega=1.0, alpha=1.0)
    with pytest.raises(ValueError):
        SolitonParams(lam=1, omega=-1.0, alpha=1.0)
    assert SolitonParams.model_validate({"lambda": 1, "omega": 4.0, "alpha": 1.0}).rho1 == 1.0


def test_domain_errors(defocusing_params):
    with pytest.raises(DomainError):
        soliton_profile(defocusing_params, defocusing_params.singular_point)
    with pytest.raises(DomainError):
        stationary_soliton(defocusing_params, -0.1, 0.0)


@pytest.mark.parametrize("params_name", ["defocusing_params", "focusing_params", "focusing_two_params"])
def test_soliton_obeys_robin_condition(params_name, request):
    params = request.getfixturevalue(params_name)
    h = 1e-5
    u_x = (soliton_profile(params, h) - soliton_profile(params, -h)) / (2 * h)
    assert abs(u_x + params.q_s * soliton_profile(params, 0.0)) <= 1e-8
    assert soliton_profile(params, 0.0) == pytest.approx(params.boundary_value)


def test_closed_form_scattering_data_is_unimodular(defocusing_params, focusing_params):
    k = np.linspace(-5, 5, 41)
    for params in (defocusing_params, focusing_params):
        a, b, _ = soliton_spectral_functions(params, k)
        assert np.max(np.abs(np.abs(a) ** 2 - params.lam * np.abs(b) ** 2 - 1.0)) <= 1e-12


def test_boundary_determinant_is_time_independent(defocusing_params):
    q = defocusing_params.q_s
    _, b_at, _ = soliton_spectral_functions(defocusing_params, 0.5j * q)
    beta = robin_beta(q, b_at=complex(b_at))
    assert beta == pytest.approx(-q / 2)
    expected = -((np.sqrt(2.0) + 1.0) ** 2)
    for t in (0.0, 0.7, 3.0):
        assert robin_determinant(defocusing_params.data(), beta, t) == pytest.approx(expected, abs=1e-9)


def test_boundary_determinant_focusing_is_constant(focusing_params):
    q = focusing_params.q_s
    _, b_at, _ = soliton_spectral_functions(focusing_params, 0.5j * q)
    beta = robin_beta(q, b_at=complex(b_at))
    values = [robin_determinant(focusing_params.data(), beta, t) for t in (0.0, 1.3, 4.0)]
    assert max(values) - min(values) <= 1e-10


def test_robin_beta_needs_the_right_sample():
    with pytest.raises(ValidationFailure):
        robin_beta(-1.0, b_at=1.0)
    with pytest.raises(ValidationFailure):
        robin_beta(1.0, a_at=1.0)
    assert robin_beta(-1.0, a_at=0.3) == -0.5
    assert robin_beta(-1.0, a_at=0.0) == 0.5


@pytest.mark.parametrize("params_name", ["defocusing_params", "focusing_params"])
def test_darboux_dressing_of_identity_gives_the_soliton(params_name, request):
    params = request.getfixturevalue(params_name)
    for x, t in ((0.0, 0.0), (1.5, 0.4), (4.0, 2.5)):
        state = darboux_dress(params.xi1, params.c1, IDENTITY, IDENTITY, x, t, params.lam)
        assert abs(state.u_shift - stationary_soliton(params, x, t)) <= 1e-12
        assert abs(shift_from_w(state.W1, params.xi1, params.lam) - state.u_shift) <= 1e-12
        assert state.algebraic_residual(IDENTITY, IDENTITY) <= 1e-12


def _mirror(m, lam):
    """Regular solution at conj(xi) from its value at xi through the NLS symmetry."""
    return np.array([[np.conj(m[1, 1]), lam * np.conj(m[1, 0])],
                     [lam * np.conj(m[0, 1]), np.conj(m[0, 0])]])


@pytest.mark.parametrize("params_name", ["defocusing_params", "focusing_params"])
def test_darboux_dressing_of_a_perturbed_regular_solution(params_name, request):
    params = request.getfixturevalue(params_name)
    upper = np.array([[1.0, 0.1 * (0.3 + 0.2j)], [0.0, 1.0]])
    lower = np.array([[1.0, 0.0], [0.1 * (-0.1 + 0.4j), 1.0]])
    m_xi = upper @ lower
    m_xi_bar = _mirror(m_xi, params.lam)
    for x, t in ((1.5, 0.4), (4.0, 2.5)):
        state = darboux_dress(params.xi1, params.c1, m_xi, m_xi_bar, x, t, params.lam)
        assert state.algebraic_residual(m_xi, m_xi_bar) <= 1e-10
        assert abs(shift_from_w(state.W1, params.xi1, params.lam) - state.u_shift) <= 1e-10
        assert abs(state.u_shift - stationary_soliton(params, x, t)) >= 1e-4


def test_darboux_rejects_bad_input(focusing_params):
    with pytest.raises(ValidationFailure):
        darboux_dress(0.2 + 0.5j, 1.0, IDENTITY, IDENTITY, 0.0, 0.0, -1)
    with pytest.raises(ValidationFailure):
        darboux_dress(0.5j, 0.0, IDENTITY, IDENTITY, 0.0, 0.0, -1)
    with pytest.raises(ValidationFailure):
        darboux_dress(0.5j, 1.0, 2 * IDENTITY, IDENTITY, 0.0, 0.0, -1)


def test_darboux_singular_w():
    # |d1| = 1 at x = 0 makes det W1 = 1 - |d1|^2 vanish for lambda = 1
    with pytest.raises(SingularW):
        darboux_dress(0.5j, 1j, IDENTITY, IDENTITY, 0.0, 0.0, 1)


def test_renormalized_box(focusing_params):
    data = focusing_params.data()
    k = 1.0 + 0.3j
    plain = ReflectionlessSolution.solve(data, 0.5, 1.0).m(k)
    boxed = solve_renormalized(data, RenormalizedBox(frozenset({0})), 0.5, 1.0, k)
    a = (k - data.xi[0]) / (k - np.conj(data.xi[0]))
    assert np.allclose(boxed[:, 0], plain[:, 0] * a)
    assert np.allclose(boxed[:, 1], plain[:, 1] / a)
    with pytest.raises(ValidationFailure):
        solve_renormalized(data, RenormalizedBox(frozenset({3})), 0.5, 1.0, k)
