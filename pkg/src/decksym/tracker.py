"""Parameter-homotopy path tracking with an RK4 predictor and Newton corrector.

Paths follow the segment homotopy p(t) = (1-t) p_from + t p_to, optionally
reparametrized through a random unit complex gamma (tau = gamma t / (1 +
(gamma - 1) t)) so the path avoids the discriminant with probability one.
Step control: accept a step when the corrector converges, double the step
after three consecutive accepts, halve on rejection.

Systems are compiled once into flat exponent/coefficient arrays so that
residuals and Jacobians evaluate as a handful of vectorized numpy
operations; this is what keeps fibers with dozens of paths tractable.
"""

from __future__ import annotations

import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import expr
from .expr import Polynomial, System

_MAX_TOTAL_STEPS = 20_000


class TrackingError(RuntimeError):
    pass


class NewtonError(TrackingError):
    pass


class FiberTrackingError(TrackingError):
    pass


@dataclass(frozen=True)
class TrackerConfig:
    newton_tol: float = 1e-10
    max_newton_iters: int = 4
    initial_step: float = 0.1
    min_step: float = 1e-9
    max_step: float = 0.25
    step_expand: float = 2.0
    step_shrink: float = 0.5
    path_tol: float = 1e-8
    use_gamma_trick: bool = True
    max_norm: float = 1e8
    accept_streak: int = 3

    def __post_init__(self):
        if not (self.min_step <= self.initial_step <= self.max_step):
            raise ValueError("need min_step <= initial_step <= max_step")
        for name in ("newton_tol", "path_tol", "min_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.step_expand <= 1 or not 0 < self.step_shrink < 1:
            raise ValueError("bad step control factors")


@dataclass(frozen=True)
class PathResult:
    status: str  # "success" | "diverged" | "singular" | "step_underflow"
    endpoint: np.ndarray | None
    steps_taken: int
    final_residual: float

    @property
    def success(self) -> bool:
        return self.status == "success"


@dataclass(frozen=True)
class FiberSample:
    """A parameter point together with the ordered solutions above it."""

    params: np.ndarray
    solutions: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", np.asarray(self.params, dtype=complex))
        object.__setattr__(
            self, "solutions", tuple(np.asarray(s, dtype=complex) for s in self.solutions)
        )

    def __len__(self) -> int:
        return len(self.solutions)

    def max_residual(self, system: System) -> float:
        comp = compiled(system)
        return max(
            float(np.abs(comp.f_at(s, self.params)).max()) for s in self.solutions
        )

    def min_pairwise_distance(self) -> float:
        sols = self.solutions
        if len(sols) < 2:
            return np.inf
        return min(
            float(np.abs(sols[i] - sols[j]).max())
            for i in range(len(sols))
            for j in range(i + 1, len(sols))
        )


# ---------------------------------------------------------------------------
# Compiled evaluation
# ---------------------------------------------------------------------------


def _pack(polys: Sequence[Polynomial], nvars: int):
    exps: list[tuple[int, ...]] = []
    coeffs: list[complex] = []
    offsets = [0]
    for p in polys:
        if p.is_zero:
            exps.append((0,) * nvars)
            coeffs.append(0.0)
        else:
            for e, c in p.terms:
                exps.append(e)
                coeffs.append(expr.coeff_to_complex(c))
        offsets.append(len(exps))
    return (
        np.asarray(exps, dtype=np.int64),
        np.asarray(coeffs, dtype=complex),
        np.asarray(offsets[:-1], dtype=np.intp),
    )


class CompiledSystem:
    """Flattened evaluator for F, dF/dx and dF/dp of one system."""

    def __init__(self, system: System):
        self.system = system
        self.n = system.n
        self.m = system.m
        self.nvars = system.n + system.m
        n = self.n
        self._fe, self._fc, self._fo = _pack(system.equations, self.nvars)
        jac = expr.jacobian(system)
        self._je, self._jc, self._jo = _pack(
            [jac[i][j] for i in range(n) for j in range(n)], self.nvars
        )
        pj = expr.parameter_jacobian(system)
        self._pe, self._pc, self._po = _pack(
            [pj[i][j] for i in range(n) for j in range(self.m)], self.nvars
        )
        self.maxdeg = int(
            max(self._fe.max(initial=0), self._je.max(initial=0), self._pe.max(initial=0))
        )
        self._gather = np.arange(self.nvars)

    def _powers(self, x, p) -> np.ndarray:
        z = np.concatenate([np.asarray(x, complex), np.asarray(p, complex)])
        tab = np.empty((self.nvars, self.maxdeg + 1), dtype=complex)
        tab[:, 0] = 1.0
        for k in range(1, self.maxdeg + 1):
            tab[:, k] = tab[:, k - 1] * z
        return tab

    def _block(self, tab, e, c, o, shape):
        vals = c * np.prod(tab[self._gather[None, :], e], axis=1)
        return np.add.reduceat(vals, o).reshape(shape)

    def f_at(self, x, p) -> np.ndarray:
        return self._block(self._powers(x, p), self._fe, self._fc, self._fo, (self.n,))

    def jx_at(self, x, p) -> np.ndarray:
        return self._block(self._powers(x, p), self._je, self._jc, self._jo, (self.n, self.n))

    def jp_at(self, x, p) -> np.ndarray:
        return self._block(self._powers(x, p), self._pe, self._pc, self._po, (self.n, self.m))

    def f_and_jx(self, x, p):
        tab = self._powers(x, p)
        return (
            self._block(tab, self._fe, self._fc, self._fo, (self.n,)),
            self._block(tab, self._je, self._jc, self._jo, (self.n, self.n)),
        )


_COMPILED: "weakref.WeakKeyDictionary[System, CompiledSystem]" = weakref.WeakKeyDictionary()


def compiled(system: System) -> CompiledSystem:
    comp = _COMPILED.get(system)
    if comp is None:
        comp = CompiledSystem(system)
        _COMPILED[system] = comp
    return comp


# ---------------------------------------------------------------------------
# Newton
# ---------------------------------------------------------------------------


def _newton(comp, x, p, tol, max_iters, max_norm):
    """Returns (x, residual, converged, singular_flag, first_step_size)."""
    x = np.asarray(x, dtype=complex)
    first_step = 0.0
    for it in range(max_iters):
        f, jx = comp.f_and_jx(x, p)
        res = float(np.abs(f).max())
        if not np.isfinite(res):
            return x, np.inf, False, False, first_step
        if res <= tol:
            return x, res, True, False, first_step
        try:
            dx = np.linalg.solve(jx, -f)
        except np.linalg.LinAlgError:
            return x, res, False, True, first_step
        if it == 0:
            first_step = float(np.abs(dx).max())
        x = x + dx
        if float(np.abs(x).max()) > max_norm:
            return x, np.inf, False, False, first_step
    f = comp.f_at(x, p)
    res = float(np.abs(f).max())
    return x, res, res <= tol, False, first_step


def newton_polish(system: System, x, p, tol: float, max_iters: int = 30) -> np.ndarray:
    """Polish a point to ||F||_inf <= tol; raises NewtonError otherwise."""
    comp = compiled(system)
    out, res, ok, singular, _ = _newton(comp, x, p, tol, max_iters, 1e12)
    if singular:
        raise NewtonError("singular Jacobian during Newton polish")
    if not ok:
        raise NewtonError(f"Newton did not reach tolerance {tol:g} (residual {res:.3e})")
    return out


# ---------------------------------------------------------------------------
# Path tracking
# ---------------------------------------------------------------------------


def _draw_gamma(rng: np.random.Generator | None) -> complex:
    if rng is None:
        return 1.0 + 0.0j
    return complex(np.exp(2j * np.pi * rng.random()))


def track_path(
    system: System,
    x_start,
    p_from,
    p_to,
    cfg: TrackerConfig,
    *,
    rng: np.random.Generator | None = None,
    gamma: complex | None = None,
) -> PathResult:
    """Continue one solution from p_from to p_to along the segment homotopy."""
    comp = compiled(system)
    p_from = np.asarray(p_from, dtype=complex)
    p_to = np.asarray(p_to, dtype=complex)
    if gamma is None:
        gamma = _draw_gamma(rng) if cfg.use_gamma_trick else 1.0 + 0.0j
    dp = p_to - p_from

    x, res, ok, _sing, _ = _newton(
        comp, x_start, p_from, cfg.newton_tol * 10, cfg.max_newton_iters, cfg.max_norm
    )
    if not ok:
        raise ValueError(
            f"start point does not satisfy the system (residual {res:.3e})"
        )

    def path_point(t: float):
        if gamma == 1.0:
            return p_from + t * dp, 1.0 + 0.0j
        den = 1.0 + (gamma - 1.0) * t
        return p_from + (gamma * t / den) * dp, gamma / (den * den)

    def tangent(xv, t):
        p, rate = path_point(t)
        jx = comp.jx_at(xv, p)
        jp = comp.jp_at(xv, p)
        return np.linalg.solve(jx, -(jp @ dp) * rate)

    t = 0.0
    h = min(cfg.initial_step, cfg.max_step)
    steps = 0
    streak = 0
    singular_seen = False
    while t < 1.0 - 1e-14:
        if steps >= _MAX_TOTAL_STEPS:
            return PathResult("step_underflow", None, steps, np.inf)
        h = min(h, 1.0 - t)
        accepted = False
        try:
            k1 = tangent(x, t)
            k2 = tangent(x + 0.5 * h * k1, t + 0.5 * h)
            k3 = tangent(x + 0.5 * h * k2, t + 0.5 * h)
            k4 = tangent(x + h * k3, t + h)
            x_pred = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if np.all(np.isfinite(x_pred)):
                p_next, _ = path_point(t + h)
                x_new, res, ok, sing, first_step = _newton(
                    comp, x_pred, p_next, cfg.newton_tol, cfg.max_newton_iters, cfg.max_norm
                )
                singular_seen = singular_seen or sing
                # Guard against sheet jumps: the corrector must stay a small
                # fraction of the predicted motion away from the prediction,
                # otherwise it may have converged onto a different path.
                motion = float(np.abs(x_pred - x).max())
                contraction_ok = first_step <= max(
                    0.2 * motion, 1000 * cfg.newton_tol * (1.0 + float(np.abs(x).max()))
                )
                if ok and contraction_ok:
                    accepted = True
        except np.linalg.LinAlgError:
            singular_seen = True
        if accepted:
            t += h
            x = x_new
            steps += 1
            streak += 1
            if streak >= cfg.accept_streak:
                h = min(h * cfg.step_expand, cfg.max_step)
                streak = 0
        else:
            if float(np.abs(x).max()) > cfg.max_norm:
                return PathResult("diverged", None, steps, np.inf)
            streak = 0
            h *= cfg.step_shrink
            if h < cfg.min_step:
                status = "singular" if singular_seen else "step_underflow"
                return PathResult(status, None, steps, np.inf)

    x, res, ok, sing, _ = _newton(comp, x, p_to, cfg.newton_tol, 12, cfg.max_norm)
    if float(np.abs(x).max()) > cfg.max_norm or not np.isfinite(res):
        return PathResult("diverged", None, steps, np.inf)
    if res > cfg.path_tol:
        return PathResult("singular", None, steps, res)
    return PathResult("success", x, steps, res)


def track_two_segment(
    system: System,
    x_start,
    p0,
    p1,
    p2,
    cfg: TrackerConfig,
    *,
    rng: np.random.Generator | None = None,
    gammas: tuple[complex, complex] | None = None,
) -> PathResult:
    """Two chained segment homotopies p0 -> p1 -> p2; the intermediate fiber
    point is used as-is."""
    if gammas is None:
        gammas = (_draw_gamma(rng), _draw_gamma(rng)) if cfg.use_gamma_trick else (1.0, 1.0)
    first = track_path(system, x_start, p0, p1, cfg, gamma=gammas[0])
    if not first.success:
        return first
    second = track_path(system, first.endpoint, p1, p2, cfg, gamma=gammas[1])
    return replace(second, steps_taken=first.steps_taken + second.steps_taken)


def track_fiber(
    system: System,
    fiber: FiberSample,
    p_to,
    cfg: TrackerConfig,
    *,
    rng: np.random.Generator | None = None,
    gamma: complex | None = None,
    workers: int = 1,
    min_separation: float = 1e-6,
) -> FiberSample:
    """Track every solution of a fiber to new parameters, preserving order.

    All paths share one homotopy (one gamma).  Any path failure, or an
    endpoint collision within ``min_separation``, fails the whole fiber with
    FiberTrackingError.
    """
    if fiber.min_pairwise_distance() <= min_separation:
        raise FiberTrackingError("fiber solutions are not pairwise distinct")
    p_to = np.asarray(p_to, dtype=complex)
    if gamma is None:
        gamma = _draw_gamma(rng) if cfg.use_gamma_trick else 1.0 + 0.0j

    def run(sol):
        return track_path(system, sol, fiber.params, p_to, cfg, gamma=gamma)

    if workers > 1 and len(fiber.solutions) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, fiber.solutions))
    else:
        results = [run(sol) for sol in fiber.solutions]

    bad = [i for i, r in enumerate(results) if not r.success]
    if bad:
        raise FiberTrackingError(
            f"{len(bad)}/{len(results)} paths failed ({results[bad[0]].status})"
        )
    out = FiberSample(p_to, tuple(r.endpoint for r in results))
    if out.min_pairwise_distance() <= min_separation:
        raise FiberTrackingError("endpoint collision after tracking")
    return out
