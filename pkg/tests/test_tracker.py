import numpy as np
import pytest

from decksym.expr import parse_system
from decksym.tracker import (
    FiberSample,
    FiberTrackingError,
    NewtonError,
    TrackerConfig,
    compiled,
    newton_polish,
    track_fiber,
    track_path,
    track_two_segment,
)

EX41 = parse_system("unknowns x; parameters p; equations x^2 + p*x + 1;")
SEXTIC = parse_system(
    "unknowns x; parameters a, b, c, d;"
    "equations a*x^6 + b*x^5 + c*x^4 + d*x^3 + c*x^2 + b*x + a;"
)
CFG = TrackerConfig()


def quadratic_roots(p):
    disc = np.sqrt(complex(p * p - 4))
    return (-p + disc) / 2, (-p - disc) / 2


def test_compiled_evaluation_matches_symbolic():
    rng = np.random.default_rng(3)
    comp = compiled(SEXTIC)
    for _ in range(5):
        x = rng.standard_normal(1) + 1j * rng.standard_normal(1)
        p = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        z = np.concatenate([x, p])
        f = comp.f_at(x, p)
        assert abs(f[0] - SEXTIC.equations[0].evaluate(z)) < 1e-12 * (1 + abs(f[0]))
        jx = comp.jx_at(x, p)
        dfdx = SEXTIC.equations[0].differentiate(0).evaluate(z)
        assert abs(jx[0, 0] - dfdx) < 1e-12 * (1 + abs(dfdx))


def test_identity_path_returns_start():
    r = track_path(EX41, [2.0], [-2.5], [-2.5], CFG)
    assert r.success
    assert abs(r.endpoint[0] - 2.0) < 1e-10


def test_track_to_nearby_parameter_continuity():
    # x = 2 over p = -2.5 continues to the root of x^2 - 3x + 1 near 2.
    r = track_path(EX41, [2.0], [-2.5], [-3.0], CFG, rng=np.random.default_rng(0))
    assert r.success
    expected = (3 + np.sqrt(5)) / 2
    assert abs(r.endpoint[0] - expected) < 1e-8
    assert r.final_residual <= CFG.path_tol


def test_loop_permutes_fiber():
    rng = np.random.default_rng(1)
    p0 = -2.5
    roots = quadratic_roots(p0)
    q1 = rng.standard_normal() + 1j * rng.standard_normal()
    q2 = rng.standard_normal() + 1j * rng.standard_normal()
    ends = []
    for x in roots:
        cur = np.array([x])
        for a, b in [(p0, q1), (q1, q2), (q2, p0)]:
            r = track_path(EX41, cur, [a], [b], CFG, rng=np.random.default_rng(5))
            assert r.success
            cur = r.endpoint
        ends.append(cur[0])
    # endpoints are the two start roots in some order
    starts = sorted(roots, key=lambda z: (z.real, z.imag))
    finals = sorted(ends, key=lambda z: (z.real, z.imag))
    assert np.allclose(starts, finals, atol=1e-7)


def test_determinism_with_fixed_gamma():
    rng1 = np.random.default_rng(42)
    rng2 = np.random.default_rng(42)
    r1 = track_path(EX41, [2.0], [-2.5], [3.0 + 1j], CFG, rng=rng1)
    r2 = track_path(EX41, [2.0], [-2.5], [3.0 + 1j], CFG, rng=rng2)
    assert r1.success and r2.success
    assert np.abs(r1.endpoint - r2.endpoint).max() < 1e-8


def test_residual_invariant_random_targets():
    rng = np.random.default_rng(7)
    for _ in range(10):
        target = rng.standard_normal() + 1j * rng.standard_normal()
        r = track_path(EX41, [2.0], [-2.5], [target], CFG, rng=rng)
        if r.success:
            comp = compiled(EX41)
            assert np.abs(comp.f_at(r.endpoint, [target])).max() <= CFG.path_tol


def test_bad_start_point_rejected():
    with pytest.raises(ValueError, match="start point"):
        track_path(EX41, [17.0], [-2.5], [-3.0], CFG)


def test_newton_polish_exact_root_unchanged():
    out = newton_polish(EX41, np.array([2.0 + 0j]), np.array([-2.5 + 0j]), 1e-12)
    assert abs(out[0] - 2.0) < 1e-14


def test_newton_polish_recovers_perturbed_root():
    out = newton_polish(EX41, np.array([2.0 + 1e-4]), np.array([-2.5]), 1e-12)
    assert abs(out[0] - 2.0) < 1e-12


def test_newton_polish_no_convergence():
    with pytest.raises(NewtonError):
        newton_polish(EX41, np.array([50.0 + 0j]), np.array([-2.5]), 1e-12, max_iters=3)


def test_fiber_tracking_preserves_order_and_residuals():
    rng = np.random.default_rng(11)
    params = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    roots = np.roots(
        [params[0], params[1], params[2], params[3], params[2], params[1], params[0]]
    )
    fiber = FiberSample(params, tuple(np.array([r]) for r in roots))
    target = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    out = track_fiber(SEXTIC, fiber, target, CFG, rng=rng)
    assert len(out) == 6
    assert out.max_residual(SEXTIC) <= CFG.path_tol
    assert out.min_pairwise_distance() > 1e-6


def test_fiber_duplicate_solution_rejected():
    fiber = FiberSample(np.array([-2.5]), (np.array([2.0]), np.array([2.0])))
    with pytest.raises(FiberTrackingError, match="distinct"):
        track_fiber(EX41, fiber, np.array([1.0 + 1j]), CFG)


def test_two_segment_identity():
    r = track_two_segment(EX41, [2.0], [-2.5], [-2.5], [-2.5], CFG)
    assert r.success
    assert abs(r.endpoint[0] - 2.0) < 1e-9


def test_two_segment_detour_lands_in_fiber():
    rng = np.random.default_rng(13)
    q = rng.standard_normal() + 1j * rng.standard_normal()
    r = track_two_segment(EX41, [2.0], [-2.5], [q], [-2.5], CFG, rng=rng)
    assert r.success
    roots = quadratic_roots(-2.5)
    assert min(abs(r.endpoint[0] - z) for z in roots) < 1e-7


def test_segment_through_discriminant_fails():
    # without the gamma trick, the straight segment from p=-2.5 to p=-1.5
    # passes through the double root at p=-2
    cfg = TrackerConfig(use_gamma_trick=False)
    r = track_path(EX41, [2.0], [-2.5], [-1.5], cfg)
    assert r.status in ("singular", "step_underflow")
    assert r.endpoint is None


def test_gamma_trick_avoids_discriminant():
    r = track_path(EX41, [2.0], [-2.5], [-1.5], CFG, rng=np.random.default_rng(3))
    assert r.success
    roots = quadratic_roots(-1.5)
    assert min(abs(r.endpoint[0] - z) for z in roots) < 1e-7


def test_config_validation():
    with pytest.raises(ValueError):
        TrackerConfig(min_step=0.5, initial_step=0.1)
    with pytest.raises(ValueError):
        TrackerConfig(step_shrink=1.5)
