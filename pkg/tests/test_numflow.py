"""Numeric route: product-equation roots, the distance ODE, boundaries."""

import math

import numpy as np
import pytest

from imcf import (
    BoundaryKind,
    DomainError,
    NoConvergence,
    NoEvent,
    PreconditionError,
    continuation_sweep,
    estimate_boundary,
    hyperbolic_spectrum,
    integrate_mu,
    is_extension,
    path_from_dict,
    path_to_dict,
    solve_product_equation,
    solve_sphere,
    sphere_spectrum_from_k1,
    euclidean_spectrum,
)

from conftest import catalog_profiles, profile_grid

ROOT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# product-equation roots


def test_newton_horosphere_is_linear():
    spec = hyperbolic_spectrum("horosphere", 2, k=1.0)
    assert solve_product_equation(spec, 1.0) == pytest.approx(-0.5, abs=1e-15)
    assert solve_product_equation(spec, -3.0) == pytest.approx(1.5, abs=1e-15)
    assert solve_product_equation(spec, 0.0) == 0.0


def test_newton_matches_closed_form(catalog_profile):
    name, profile = catalog_profile
    spec = profile.spectrum
    for t in profile_grid(profile, -10.0, 10.0, points=41):
        mu_ref = profile.mu(float(t))
        mu_num = solve_product_equation(spec, float(t))
        # Newton stops at |log-residual| <= 1e-12, hence a mu error of
        # 1e-12/|H| where the flow is slow (near a minimal limit).
        bound = 1e-12 * max(1.0, abs(mu_ref)) + 2e-12 / abs(profile.h(float(t)))
        assert abs(mu_num - mu_ref) <= bound


def test_newton_warm_start_agrees_with_cold():
    profile = solve_sphere(3, 1, 2.0)
    spec = profile.spectrum
    t = -4.0
    cold = solve_product_equation(spec, t)
    warm = solve_product_equation(spec, t, mu_guess=cold + 1e-4)
    assert warm == pytest.approx(cold, abs=1e-13)
    # A guess outside the monotone basin must not poison the root.
    rogue = solve_product_equation(spec, t, mu_guess=40.0)
    assert rogue == pytest.approx(cold, abs=1e-13)


def test_newton_refuses_times_past_collapse():
    profile = solve_sphere(2, 1, ROOT2)
    spec = profile.spectrum
    for t in (profile.t_star + 1e-6, profile.t_star + 0.5):
        with pytest.raises(PreconditionError):
            solve_product_equation(spec, t)


def test_newton_refuses_minimal_start():
    clifford = sphere_spectrum_from_k1(2, 1.0, 1)  # H(0) = 0: no orientation
    with pytest.raises(PreconditionError):
        solve_product_equation(clifford, 0.5)
    with pytest.raises(PreconditionError):
        integrate_mu(clifford, (0.0, 1.0))


def test_newton_handles_unequal_multiplicity_extension():
    spec = hyperbolic_spectrum("cylinder", 3, k1=2.0, m=1)
    assert is_extension(spec)
    from imcf import log_product

    for t in (-4.0, -1.0, 0.0, 2.0, 6.0):
        mu = solve_product_equation(spec, t)
        assert abs(log_product(spec, mu) - t) <= 1e-11


# ---------------------------------------------------------------------------
# continuation sweeps


def test_sweep_matches_closed_form_inside_window(catalog_profile):
    name, profile = catalog_profile
    grid = profile_grid(profile, -6.0, 6.0, points=25)
    if 0.0 not in grid:
        grid = np.sort(np.append(grid, 0.0))
    path = continuation_sweep(profile.spectrum, grid)
    assert path.t.shape == grid.shape
    assert np.max(path.residual()) <= 1e-10
    mu_ref = profile.mu(path.t)
    bound = 1e-12 * np.maximum(1.0, np.abs(mu_ref)) + 2e-12 / np.abs(path.h)
    assert np.all(np.abs(path.mu - mu_ref) <= bound)


def test_sweep_stops_at_collapse_and_records_event():
    profile = solve_sphere(2, 1, ROOT2)
    grid = np.linspace(-2.0, 2.0, 17)
    path = continuation_sweep(profile.spectrum, grid)
    assert path.t.max() <= profile.t_star
    assert path.t.min() == -2.0
    ev = path.end_event("upper")
    assert ev is not None and ev.kind is BoundaryKind.MEAN_CURVATURE_ZERO
    assert ev.direction == 1
    assert abs(ev.t - profile.t_star) <= 1e-9


def test_sweep_grid_validation():
    spec = euclidean_spectrum(2, 2, 1.0)
    with pytest.raises(DomainError):
        continuation_sweep(spec, np.linspace(-6.0, 6.0, 24))  # no exact zero
    with pytest.raises(DomainError):
        continuation_sweep(spec, [])
    with pytest.raises(DomainError):
        continuation_sweep(spec, [[0.0, 1.0]])


def test_sweep_trivial_grid():
    spec = euclidean_spectrum(2, 2, 1.0)
    path = continuation_sweep(spec, [0.0])
    assert path.samples == ((0.0, 0.0, 2.0),)
    assert path.boundary_events == ()
    with pytest.raises(NoEvent):
        estimate_boundary(path, "upper")


# ---------------------------------------------------------------------------
# the distance ODE


def test_ode_matches_closed_form_example():
    profile_by_name = dict(catalog_profiles())
    for name in ("euclid_sphere", "hyp_cylinder", "sphere_g3"):
        profile = profile_by_name[name]
        t_eval = profile_grid(profile, -8.0, 8.0, points=33)
        span = (float(t_eval[0]), float(t_eval[-1]))
        path = integrate_mu(profile.spectrum, span, tol=1e-10, t_eval=t_eval)
        mask = np.isin(path.t, t_eval)
        err = np.abs(path.mu[mask] - profile.mu(path.t[mask]))
        assert float(np.max(err)) <= 1e-8


def test_ode_error_shrinks_with_tolerance():
    profile = dict(catalog_profiles())["hyp_umbilic_ball"]
    t_eval = np.linspace(0.0, 4.0, 9)

    def sup_err(tol):
        path = integrate_mu(profile.spectrum, (0.0, 4.0), tol=tol, t_eval=t_eval)
        return float(np.max(np.abs(path.mu - profile.mu(path.t))))

    coarse, fine = sup_err(1e-7), sup_err(1e-9)
    assert fine < coarse
    assert coarse / max(fine, 1e-16) >= 4.0


def test_ode_seed_sample_is_exact():
    spec = euclidean_spectrum(3, 2, 2.0)
    path = integrate_mu(spec, (-2.0, 2.0))
    i = int(np.searchsorted(path.t, 0.0))
    assert path.samples[i] == (0.0, 0.0, 1.0)


def test_ode_constant_rate_flow_is_exact():
    spec = hyperbolic_spectrum("horosphere", 2, k=-1.0)
    path = integrate_mu(spec, (-5.0, 5.0), tol=1e-9)
    assert np.all(path.h == -2.0)
    assert np.max(np.abs(path.mu - path.t / 2.0)) <= 1e-12
    assert path.boundary_events == ()


def test_ode_stops_at_minimal_limit():
    profile = solve_sphere(2, 1, ROOT2)
    path = integrate_mu(profile.spectrum, (0.0, 1.0), tol=1e-9)
    ev = path.event(BoundaryKind.MEAN_CURVATURE_ZERO)
    assert abs(ev.t - profile.t_star) <= 1e-6
    assert ev.direction == 1
    t_ref, kind = estimate_boundary(path, "upper")
    assert kind is BoundaryKind.MEAN_CURVATURE_ZERO
    assert abs(t_ref - profile.t_star) <= 1e-12


def test_ode_stops_at_immortal_birth():
    profile = dict(catalog_profiles())["hyp_umbilic_equidistant"]
    path = integrate_mu(profile.spectrum, (-2.0, 0.0), tol=1e-9)
    t_ref, kind = estimate_boundary(path, "lower")
    assert kind is BoundaryKind.MEAN_CURVATURE_ZERO
    assert abs(t_ref - math.log(0.75)) <= 1e-9


def test_ode_focal_end_is_asymptotic():
    profile = dict(catalog_profiles())["hyp_umbilic_ball"]
    path = integrate_mu(profile.spectrum, (-40.0, 0.0), tol=1e-9)
    ev = path.end_event("lower")
    assert ev is not None and ev.kind is BoundaryKind.FOCAL_DEGENERACY
    t_ref, kind = estimate_boundary(path, "lower")
    assert kind is BoundaryKind.FOCAL_DEGENERACY
    assert t_ref == -math.inf


def test_ode_eternal_window_reports_unbounded():
    spec = hyperbolic_spectrum("horosphere", 3, k=1.0)
    path = integrate_mu(spec, (-5.0, 5.0))
    assert estimate_boundary(path, "upper") == (math.inf, BoundaryKind.UNBOUNDED)
    assert estimate_boundary(path, "lower") == (-math.inf, BoundaryKind.UNBOUNDED)


def test_ode_empty_window():
    spec = euclidean_spectrum(2, 2, 1.0)
    path = integrate_mu(spec, (0.0, 0.0))
    assert path.samples == ((0.0, 0.0, 2.0),)
    for end in ("lower", "upper"):
        with pytest.raises(NoEvent):
            estimate_boundary(path, end)
    with pytest.raises(NoEvent):
        path.event(BoundaryKind.MEAN_CURVATURE_ZERO)


def test_ode_input_validation():
    spec = euclidean_spectrum(2, 2, 1.0)
    with pytest.raises(DomainError):
        integrate_mu(spec, (1.0, 2.0))  # window must straddle the anchor
    for bad_tol in (1e-3, 1e-15, 0.0):
        with pytest.raises(DomainError):
            integrate_mu(spec, (-1.0, 1.0), tol=bad_tol)
    with pytest.raises(DomainError):
        integrate_mu(spec, (-1.0, 1.0), t_eval=[-2.0, 0.5])
    with pytest.raises(DomainError):
        estimate_boundary(integrate_mu(spec, (0.0, 1.0)), "sideways")


def test_ode_step_budget_enforced():
    spec = euclidean_spectrum(2, 2, 1.0)
    with pytest.raises(NoConvergence):
        integrate_mu(spec, (0.0, 20.0), max_steps=3)


def test_ode_t_eval_controls_sampling():
    spec = euclidean_spectrum(2, 2, 1.0)
    t_eval = np.array([-1.5, -0.5, 0.75, 2.0])
    path = integrate_mu(spec, (-2.0, 2.0), t_eval=t_eval)
    got = set(np.round(path.t, 12))
    for want in t_eval:
        assert round(float(want), 12) in got
    # Sampling stays sparse: seed plus the requested times only.
    assert len(path.samples) == t_eval.size + 1


# ---------------------------------------------------------------------------
# extension flag and serialization


def test_extension_flag():
    assert is_extension(hyperbolic_spectrum("cylinder", 3, k1=2.0, m=1))
    assert not is_extension(hyperbolic_spectrum("cylinder", 2, k1=2.0, m=1))
    assert not is_extension(euclidean_spectrum(3, 2, 1.0))
    g4 = sphere_spectrum_from_k1(4, 4.0, 1)
    from imcf import PrincipalSpectrum, SPHERICAL

    mixed = PrincipalSpectrum(
        sf=SPHERICAL, n=6, entries=tuple(zip(g4.curvatures, (1, 2, 1, 2)))
    )
    assert is_extension(mixed)
    path = integrate_mu(mixed, (-1.0, 0.0))
    assert path.extension


def test_ode_handles_extension_spectrum():
    spec = hyperbolic_spectrum("cylinder", 3, k1=2.0, m=1)
    path = integrate_mu(spec, (-4.0, 4.0), tol=1e-10)
    assert path.extension
    assert float(np.max(path.residual())) <= 1e-7
    assert np.all(np.diff(path.mu) < 0.0)


def test_path_serialization_round_trip():
    profile = solve_sphere(2, 1, ROOT2)
    path = integrate_mu(profile.spectrum, (-3.0, 1.0), tol=1e-9)
    doc = path_to_dict(path)
    import json

    blob = json.dumps(doc)  # record must be plain JSON
    back = path_from_dict(json.loads(blob))
    assert back.tol == path.tol
    assert back.t_span == path.t_span
    assert back.extension == path.extension
    assert back.spectrum == path.spectrum
    assert np.array_equal(back.t, path.t)
    assert np.array_equal(back.mu, path.mu)
    assert len(back.boundary_events) == len(path.boundary_events)
    for a, b in zip(back.boundary_events, path.boundary_events):
        assert (a.t, a.kind, a.direction) == (b.t, b.kind, b.direction)


def test_path_from_dict_rejects_malformed():
    with pytest.raises(DomainError):
        path_from_dict({})
    profile = solve_sphere(2, 1, ROOT2)
    doc = path_to_dict(integrate_mu(profile.spectrum, (0.0, 0.0)))
    doc["samples"] = "nope"
    with pytest.raises(DomainError):
        path_from_dict(doc)
