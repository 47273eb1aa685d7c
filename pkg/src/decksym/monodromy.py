"""Monodromy solving: discover the fiber over a base point and the loop permutations.

Loops are triangles p* -> q1 -> q2 -> p* through two fully random complex
parameter points.  Endpoints are matched back to the known fiber by nearest
neighbor with a strict distinctness ratio, so a mislabeled path fails the
loop instead of corrupting the permutation record.  A loop contributes a
permutation only once the known fiber did not grow during it.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import permgrp, tracker
from .expr import System, coeff_to_complex
from .permgrp import Perm
from .tracker import FiberSample, FiberTrackingError, TrackerConfig

__all__ = [
    "FiberSample",
    "MonodromyConfig",
    "MonodromyError",
    "MonodromyResult",
    "batch_fibers",
    "run_monodromy",
    "sample_orbit",
    "seed_from_linear_params",
]


class MonodromyError(RuntimeError):
    pass


@dataclass
class MonodromyConfig:
    expected_degree: int | None = None
    stall_limit: int = 10
    perm_stall_limit: int = 5
    max_loops: int = 400
    match_tol: float = 1e-6
    # Round-trip check on orbit samples: sheet jumps inside a full tracked
    # fiber surface as endpoint collisions, but an orbit tracks only a few
    # sheets, so each sample is tracked back along an independent arc and
    # must return to its starting points.
    verify_samples: bool = True
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    workers: int = 1


@dataclass(frozen=True)
class LoopRecord:
    """Replay data for one permutation-producing loop: the two waypoints and
    the per-segment gamma factors."""

    q1: np.ndarray
    q2: np.ndarray
    gammas: tuple[complex, complex, complex]
    permutation: Perm


@dataclass
class MonodromyResult:
    base: FiberSample
    permutations: list[Perm]
    loop_count: int
    loop_log: list[LoopRecord] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return len(self.base.solutions)

    def group(self) -> permgrp.PermutationGroup:
        return permgrp.PermutationGroup(self.degree, tuple(self.permutations))


def replay_loop(
    system: System, result: MonodromyResult, record: LoopRecord, cfg: MonodromyConfig
) -> bool:
    """Re-track a recorded loop and check it reproduces the same matching."""
    p0 = result.base.params
    sols = result.base.solutions
    for i, sol in enumerate(sols):
        cur = sol
        for a, b, g in (
            (p0, record.q1, record.gammas[0]),
            (record.q1, record.q2, record.gammas[1]),
            (record.q2, p0, record.gammas[2]),
        ):
            r = tracker.track_path(system, cur, a, b, cfg.tracker, gamma=g)
            if not r.success:
                return False
            cur = r.endpoint
        best, d1, _ = _nearest(cur, sols)
        if d1 > cfg.match_tol or best != record.permutation[i]:
            return False
    return True


def _random_params(m: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(m) + 1j * rng.standard_normal(m)


def _lstsq_nullspace(a: np.ndarray) -> np.ndarray:
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    tol = 1e-10 * (s[0] if s.size else 1.0)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


def _group_signature(degree: int, perms: list[Perm]):
    """Cheap fingerprint of the generated group, used for stall detection.

    Repeating an already-seen permutation must not reset the stall counter,
    but any growth of the generated group must: otherwise a run can stop
    with a proper (even intransitive) subgroup and an inflated centralizer.
    The costlier invariants are skipped at large degrees.
    """
    group = permgrp.PermutationGroup(degree, tuple(perms))
    seen: set[int] = set()
    orbits = []
    for v in range(degree):
        if v in seen:
            continue
        orb = permgrp.orbit(group, v)
        seen |= orb
        orbits.append(len(orb))
    sig: list = [tuple(sorted(orbits))]
    if degree <= 64:
        sig.append(permgrp.group_order_capped(group, 3000))
    if degree <= 512 and len(orbits) == 1:
        sig.append(len(permgrp.centralizer_in_symmetric(group)))
    return tuple(sig)


def seed_from_linear_params(
    system: System,
    x_star="random",
    rng: np.random.Generator | None = None,
    residual_tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Sampling oracle for systems affine-linear in the parameters.

    Picks random complex unknowns (or uses the given ones), solves the
    induced linear system for the parameters by least squares, and accepts
    when the residual is small and the Jacobian in the unknowns has full
    rank.  Resamples up to 10 times in the random mode.
    """
    n, m = system.n, system.m
    for eq in system.equations:
        for exp, _ in eq.terms:
            if sum(exp[n:]) > 1:
                raise MonodromyError("system is not affine-linear in the parameters")
    given = not (isinstance(x_star, str) and x_star == "random")
    if given:
        attempts = [np.asarray(x_star, dtype=complex)]
    else:
        if rng is None:
            raise ValueError("random seeding needs an rng")
        attempts = [rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(10)]
    comp = tracker.compiled(system)
    last = "no attempt"
    for x in attempts:
        a = np.zeros((n, m), dtype=complex)
        c = np.zeros(n, dtype=complex)
        for i, eq in enumerate(system.equations):
            for exp, coeff in eq.terms:
                v = coeff_to_complex(coeff)
                for k, e in enumerate(exp[:n]):
                    if e:
                        v *= x[k] ** e
                pexp = exp[n:]
                j = next((k for k, e in enumerate(pexp) if e), None)
                if j is None:
                    c[i] += v
                else:
                    a[i, j] += v
        p, *_ = np.linalg.lstsq(a, -c, rcond=None)
        # The least-squares solution is minimal-norm; add a generic element of
        # the nullspace so under-determined parameters (e.g. homogeneous
        # coefficient systems) come out generic rather than zero.
        null = _lstsq_nullspace(a)
        if null.shape[1]:
            gen = rng if rng is not None else np.random.default_rng(0)
            coeffs = gen.standard_normal(null.shape[1]) + 1j * gen.standard_normal(
                null.shape[1]
            )
            p = p + null @ coeffs
        res = float(np.abs(comp.f_at(x, p)).max())
        if res > residual_tol:
            last = f"residual {res:.3e}"
            continue
        jx = comp.jx_at(x, p)
        s = np.linalg.svd(jx, compute_uv=False)
        if s[-1] <= 1e-8 * s[0]:
            last = "rank-deficient Jacobian at the seed"
            continue
        return x, p
    raise MonodromyError(f"could not build a valid seed pair ({last})")


def _nearest(point: np.ndarray, pool: Sequence[np.ndarray]) -> tuple[int, float, float]:
    dists = [float(np.abs(point - q).max()) for q in pool]
    order = np.argsort(dists)
    best = int(order[0])
    second = dists[int(order[1])] if len(dists) > 1 else math.inf
    return best, dists[best], second


def run_monodromy(
    system: System,
    seed: tuple[np.ndarray, np.ndarray],
    cfg: MonodromyConfig,
    rng: np.random.Generator,
) -> MonodromyResult:
    """Grow the fiber over the seed parameters and collect loop permutations.

    Terminates once the fiber is stable (expected degree reached, or
    ``stall_limit`` loops without a new solution) and ``perm_stall_limit``
    further loops produced no new permutation.
    """
    x0, p0 = np.asarray(seed[0], dtype=complex), np.asarray(seed[1], dtype=complex)
    x0 = tracker.newton_polish(system, x0, p0, cfg.tracker.path_tol / 100)
    fiber: list[np.ndarray] = [x0]
    perms: list[Perm] = []
    loop_log: list[LoopRecord] = []
    loops = 0
    since_new_sol = 0
    since_new_perm = 0
    last_signature = None
    failure_window: deque[float] = deque(maxlen=5)
    tcfg = cfg.tracker

    while loops < cfg.max_loops:
        loops += 1
        q1 = _random_params(system.m, rng)
        q2 = _random_params(system.m, rng)
        gammas = [tracker._draw_gamma(rng) for _ in range(3)] if tcfg.use_gamma_trick else [1.0] * 3

        def run_loop(sol):
            cur = sol
            for a, b, g in ((p0, q1, gammas[0]), (q1, q2, gammas[1]), (q2, p0, gammas[2])):
                r = tracker.track_path(system, cur, a, b, tcfg, gamma=g)
                if not r.success:
                    return None
                cur = r.endpoint
            return cur

        starts = list(fiber)
        if cfg.workers > 1 and len(starts) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                endpoints = list(pool.map(run_loop, starts))
        else:
            endpoints = [run_loop(sol) for sol in starts]
        failed = sum(1 for e in endpoints if e is None)
        failure_window.append(failed / len(endpoints))
        if len(failure_window) == 5 and all(f > 0.5 for f in failure_window):
            raise MonodromyError("persistent path failures during monodromy loops")

        start_count = len(fiber)
        images: list[int | None] = [None] * start_count
        clean = failed == 0
        for i, endpoint in enumerate(endpoints):
            if endpoint is None:
                continue
            best, d1, d2 = _nearest(endpoint, fiber)
            if d1 <= cfg.match_tol and d2 >= 100 * d1:
                images[i] = best
            elif d1 >= 100 * cfg.match_tol:
                try:
                    new = tracker.newton_polish(system, endpoint, p0, tcfg.path_tol / 100)
                except tracker.NewtonError:
                    clean = False
                    continue
                nb, nd, _ = _nearest(new, fiber)
                if nd <= cfg.match_tol:
                    images[i] = nb
                elif nd >= 100 * cfg.match_tol:
                    fiber.append(new)
                else:
                    clean = False
            else:
                clean = False

        grew = len(fiber) > start_count
        since_new_sol = 0 if grew else since_new_sol + 1
        if grew:
            # Earlier permutations were relative to a partial fiber; only
            # permutations recorded after the count stabilizes are total.
            perms.clear()
            loop_log.clear()
            since_new_perm = 0
            last_signature = None
        else:
            if clean and all(v is not None for v in images):
                candidate = tuple(images)  # type: ignore[arg-type]
                if permgrp.is_permutation(candidate) and candidate not in perms:
                    perms.append(candidate)
                    loop_log.append(LoopRecord(q1, q2, tuple(gammas), candidate))
            if perms:
                sig = _group_signature(len(fiber), perms)
                if sig != last_signature:
                    last_signature = sig
                    since_new_perm = 0
                else:
                    since_new_perm += 1

        fiber_stable = (
            cfg.expected_degree is not None and len(fiber) >= cfg.expected_degree
        ) or since_new_sol >= cfg.stall_limit
        if (
            fiber_stable
            and perms
            and since_new_perm >= cfg.perm_stall_limit
            and permgrp.is_transitive(permgrp.PermutationGroup(len(fiber), tuple(perms)))
        ):
            break

    if len(fiber) < 2:
        raise MonodromyError("monodromy stalled with fewer than 2 solutions")
    if cfg.expected_degree is not None and len(fiber) != cfg.expected_degree:
        raise MonodromyError(
            f"found {len(fiber)} solutions, expected {cfg.expected_degree}"
        )
    base = FiberSample(p0, tuple(fiber))
    if base.min_pairwise_distance() <= cfg.match_tol:
        raise MonodromyError("fiber solutions are not well separated")
    return MonodromyResult(base, perms, loops, loop_log)


def _check_deck_perms(result: MonodromyResult, deck_perms: Sequence[Perm]) -> list[Perm]:
    """Deck permutations must commute with the recorded monodromy; identity
    elements carry no extra orbit point and are dropped."""
    d = result.degree
    ident = permgrp.identity(d)
    out = []
    for sigma in deck_perms:
        if len(sigma) != d:
            raise ValueError("deck permutation degree mismatch")
        for g in result.permutations:
            if permgrp.compose(sigma, g) != permgrp.compose(g, sigma):
                raise ValueError("deck permutation does not centralize the monodromy")
        if sigma != ident:
            out.append(tuple(sigma))
    return out


def sample_orbit(
    system: System,
    result: MonodromyResult,
    deck_perms: Sequence[Perm],
    count: int,
    cfg: MonodromyConfig,
    rng: np.random.Generator,
) -> list[FiberSample]:
    """Track the deck orbit of the base solution to ``count`` random targets.

    Each returned sample holds the orbit only, index-correspondent: pair
    (solutions[0], solutions[j]) realizes (x, Psi_j(x)) for the j-th
    non-identity deck permutation.  Failed targets are redrawn up to 3 times.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    nontrivial = _check_deck_perms(result, deck_perms)
    orbit_indices = [0] + [sigma[0] for sigma in nontrivial]
    if len(set(orbit_indices)) != len(orbit_indices):
        raise ValueError("deck permutations do not have distinct images of the base point")
    orbit = FiberSample(
        result.base.params, tuple(result.base.solutions[i] for i in orbit_indices)
    )
    samples: list[FiberSample] = []
    for _ in range(count):
        sample = None
        for _attempt in range(3):
            target = _random_params(system.m, rng)
            gamma = tracker._draw_gamma(rng) if cfg.tracker.use_gamma_trick else 1.0 + 0.0j
            try:
                candidate = tracker.track_fiber(
                    system, orbit, target, cfg.tracker, gamma=gamma, workers=cfg.workers
                )
                if cfg.verify_samples and not _roundtrip_ok(
                    system, orbit, candidate, gamma, cfg
                ):
                    continue
                sample = candidate
                break
            except FiberTrackingError:
                continue
        if sample is None:
            raise MonodromyError("orbit sampling failed after 3 retries")
        samples.append(sample)
    return samples


def _roundtrip_ok(
    system: System,
    orbit: FiberSample,
    sample: FiberSample,
    gamma: complex,
    cfg: MonodromyConfig,
) -> bool:
    """Retrace the sample's arc backwards (gamma -> 1/gamma reverses the same
    arc exactly) and require every point to return to its start; a sheet jump
    on the way out lands somewhere else on the way back."""
    try:
        back = tracker.track_fiber(
            system,
            sample,
            orbit.params,
            cfg.tracker,
            gamma=1.0 / gamma,
            workers=cfg.workers,
        )
    except FiberTrackingError:
        return False
    for got, want in zip(back.solutions, orbit.solutions):
        if float(np.abs(got - want).max()) > cfg.match_tol:
            return False
    return True


@dataclass
class BatchFibers:
    samples: list[FiberSample]
    note: str


def batch_fibers(
    system: System,
    result: MonodromyResult,
    deck_perms: Sequence[Perm],
    t: int,
    d: int,
    cfg: MonodromyConfig,
    rng: np.random.Generator,
) -> BatchFibers:
    """Track ceil(2t/d) full fibers instead of per-sample orbits.

    Cheaper in tracked paths when d is large, but every solution of one
    fiber shares the same parameters, which is known to produce extra
    spurious nullspace rows downstream; the note records that caveat.
    """
    if d != result.degree:
        raise ValueError("d must equal the fiber size of the monodromy result")
    _check_deck_perms(result, deck_perms)
    r = max(1, math.ceil(2 * t / d)) if t > 0 else 1
    samples: list[FiberSample] = []
    for _ in range(r):
        sample = None
        for _attempt in range(3):
            target = _random_params(system.m, rng)
            try:
                sample = tracker.track_fiber(
                    system, result.base, target, cfg.tracker, rng=rng, workers=cfg.workers
                )
                break
            except FiberTrackingError:
                continue
        if sample is None:
            raise MonodromyError("batched fiber tracking failed after 3 retries")
        samples.append(sample)
    return BatchFibers(
        samples,
        "batched fibers duplicate parameter values; expect extra spurious nullspace rows",
    )
