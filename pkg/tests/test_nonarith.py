import math

import numpy as np
import pytest

from fractal_spectra import (
    DecayCertificate,
    EnvelopeTooWide,
    Forcing,
    ForcingComponent,
    RenewalCoefficients,
    UnstableStep,
    eta_bound,
    gaussian_component,
    nonarithmetic_limit,
    solve_nonarithmetic,
    zero_component,
)

PHI = 0.5 * (1.0 + math.sqrt(5.0))


def golden_coeffs(scale: float = 1.0):
    return RenewalCoefficients.real_delays((0.3, 0.0), (0.0, 0.7),
                                           (scale, scale * PHI))


def unit_gaussian():
    return Forcing.from_components(gaussian_component(0.0, 1.0, 1.0),
                                   zero_component())


def test_golden_ratio_limit():
    coeffs = golden_coeffs()
    sol = solve_nonarithmetic(coeffs, unit_gaussian(), 1e-3, (-12.0, 200.0))
    rep = sol.limit_report
    assert rep.kind == "constant"
    closed = 1.0 / (2.0 * (0.3 + 0.7 * PHI))
    assert abs(rep.predicted[0] - closed) < 1e-9
    assert rep.predicted[0] == rep.predicted[1]
    assert rep.tail_discrepancy < 1e-6
    # the marched tail itself sits on the closed-form plateau
    tail = sol.grid >= 190.0
    assert np.max(np.abs(sol.z1[tail] - closed)) < 1e-6
    assert np.max(np.abs(sol.z2[tail] - closed)) < 1e-6


def test_single_component_unit_lag():
    # v = 0 decouples; with one unit delay Z telescopes to sum X(t - k)
    coeffs = RenewalCoefficients.real_delays((1.0,), (0.0,), (1.0,))
    forcing = Forcing.from_components(gaussian_component(6.0, 1.0, 0.8),
                                      zero_component())
    sol = solve_nonarithmetic(coeffs, forcing, 5e-3, (-6.0, 60.0))
    lim1, lim2 = sol.limit_report.predicted
    assert abs(lim1 - 0.8) < 1e-9
    assert lim2 == 0.0
    assert not sol.z2.any()
    assert sol.limit_report.tail_discrepancy < 1e-6


def test_v_zero_keeps_components_apart():
    coeffs = RenewalCoefficients.real_delays((0.5, 0.5), (0.0, 0.0), (1.0, PHI))
    forcing = Forcing.from_components(gaussian_component(5.0, 1.0, 1.0),
                                      gaussian_component(7.0, 1.0, 2.0))
    lim1, lim2 = nonarithmetic_limit(coeffs, forcing)
    j = 0.5 + 0.5 * PHI
    assert abs(lim1 - 1.0 / j) < 1e-9
    assert abs(lim2 - 2.0 / j) < 1e-9
    sol = solve_nonarithmetic(coeffs, forcing, 5e-3, (-8.0, 80.0))
    assert sol.limit_report.tail_discrepancy < 1e-4


def test_limit_ignores_u_v_split():
    forcing = unit_gaussian()
    a = nonarithmetic_limit(golden_coeffs(), forcing)
    b = nonarithmetic_limit(
        RenewalCoefficients.real_delays((0.15, 0.35), (0.15, 0.35), (1.0, PHI)),
        forcing,
    )
    assert a == b


def test_zero_forcing_limit():
    f = Forcing.from_components(zero_component(), zero_component())
    assert nonarithmetic_limit(golden_coeffs(), f) == (0.0, 0.0)


def test_unstable_step():
    with pytest.raises(UnstableStep):
        solve_nonarithmetic(golden_coeffs(), unit_gaussian(), 0.3, (-12.0, 40.0))


def test_envelope_too_wide():
    with pytest.raises(EnvelopeTooWide):
        solve_nonarithmetic(golden_coeffs(), unit_gaussian(), 1e-2, (0.0, 20.0))
    # the check is advisory; None disables it for truncated experiments
    sol = solve_nonarithmetic(golden_coeffs(), unit_gaussian(), 1e-2,
                              (0.0, 20.0), tail_mass_tol=None)
    assert sol.grid[0] == 0.0


def test_march_is_linear_in_forcing():
    coeffs = golden_coeffs()
    comp_a = gaussian_component(4.0, 0.8, 1.0)
    comp_b = gaussian_component(7.0, 1.2, 0.5)
    al, be = 0.6, -0.25
    combo = ForcingComponent(
        fn=lambda t: al * comp_a(t) + be * comp_b(t),
        kind="custom",
        sup=al * comp_a.sup + abs(be) * comp_b.sup,
    )
    cert = DecayCertificate(kind="exponential", bounds=(200.0, 0.0),
                            rate=5.0 / 3.0, center=4.0)
    window = (-10.0, 50.0)
    sol_a = solve_nonarithmetic(
        coeffs, Forcing.from_components(comp_a, zero_component()), 5e-3, window)
    sol_b = solve_nonarithmetic(
        coeffs, Forcing.from_components(comp_b, zero_component()), 5e-3, window)
    sol_c = solve_nonarithmetic(
        coeffs, Forcing.from_components(combo, zero_component(), certificate=cert),
        5e-3, window)
    np.testing.assert_array_equal(sol_a.grid, sol_c.grid)
    mix = al * sol_a.z1 + be * sol_b.z1
    assert np.max(np.abs(sol_c.z1 - mix)) < 1e-10
    mix2 = al * sol_a.z2 + be * sol_b.z2
    assert np.max(np.abs(sol_c.z2 - mix2)) < 1e-10


def test_positivity_random_instances():
    rng = np.random.default_rng(505)
    for _ in range(8):
        n = int(rng.integers(1, 4))
        delays = np.sort(rng.uniform(0.5, 2.5, n))
        w = rng.random(2 * n) + 0.05
        w /= w.sum()
        coeffs = RenewalCoefficients.real_delays(w[:n], w[n:], delays)
        comps = []
        for _ in range(2):
            if rng.random() < 0.25:
                comps.append(zero_component())
            else:
                comps.append(gaussian_component(rng.uniform(2.0, 8.0),
                                                rng.uniform(0.5, 1.5),
                                                rng.uniform(0.2, 2.0)))
        if all(c.sup == 0.0 for c in comps):
            comps[0] = gaussian_component(3.0, 1.0, 1.0)
        forcing = Forcing.from_components(*comps)
        sol = solve_nonarithmetic(coeffs, forcing, 0.02, (-14.0, 30.0))
        assert float(np.min(sol.z1)) >= -1e-12
        assert float(np.min(sol.z2)) >= -1e-12


def test_eta_bound_certifies_solution():
    coeffs = golden_coeffs()
    forcing = unit_gaussian()
    # the unit gaussian is dominated by 0.49 / (t^2 + 1)
    t = np.linspace(-30.0, 30.0, 4001)
    pi_const = 0.49
    assert np.max((t * t + 1.0) * forcing.x1(t)) <= pi_const
    eb = eta_bound(coeffs, pi_const)
    assert eb.C > 0.0
    assert eb.bound == eb.C * pi_const
    assert eb.tail_deviation < 0.1
    assert math.isclose(eb.J, coeffs.J, rel_tol=1e-12)
    sol = solve_nonarithmetic(coeffs, forcing, 5e-3, (-12.0, 60.0))
    sup_z = max(float(np.max(np.abs(sol.z1))), float(np.max(np.abs(sol.z2))))
    assert sup_z <= eb.bound + 1e-6


def test_eta_bound_rescaled_delays():
    forcing = unit_gaussian()
    eb = eta_bound(golden_coeffs(2.0), 0.49)
    sol = solve_nonarithmetic(golden_coeffs(2.0), forcing, 1e-2, (-12.0, 60.0))
    sup_z = max(float(np.max(np.abs(sol.z1))), float(np.max(np.abs(sol.z2))))
    assert sup_z <= eb.bound + 1e-6
