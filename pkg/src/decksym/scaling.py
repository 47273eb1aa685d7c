"""Scaling symmetries from exact integer linear algebra.

The supports of the structural equations give a matrix of shifted exponent
vectors; its Smith Normal Form splits the variables' weight lattice into a
free part (continuous scalings, one C* per row) and torsion blocks
(candidate root-of-unity scalings mod each elementary divisor > 1).
Discrete candidates are then filtered by a probability-one homotopy test:
a candidate survives only if it maps the solution variety to itself and
commutes with the deck permutations.

All integer arithmetic is exact.  The SNF runs on int64 with an overflow
guard and falls back to arbitrary-precision Python integers when entries
grow; pivoting always picks the minimum-magnitude entry to limit growth.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .expr import Exponent, System, coeff_to_complex
from . import tracker

if TYPE_CHECKING:  # pragma: no cover
    from .monodromy import MonodromyResult

_INT64_GUARD = 2**31


@dataclass(frozen=True)
class IntMatrix:
    """Exact integer matrix; entries are Python ints (no overflow permitted)."""

    rows: int
    cols: int
    data: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError("ragged integer matrix")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in r) for r in rows)
        ncols = len(data[0]) if data else (cols if cols is not None else 0)
        return IntMatrix(len(data), ncols, data)

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.data)) if self.data else ())

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        bt = other.transpose().data
        out = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in bt) for row in self.data
        )
        return IntMatrix(self.rows, other.cols, out)

    def det(self) -> int:
        """Exact determinant by Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(r) for r in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if swap is None:
                    return 0
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SnfDecomposition:
    """U @ A @ V = diag(d_1, ..., d_k, 0, ...) with U, V unimodular and d_i | d_{i+1}."""

    U: IntMatrix
    diag: tuple[int, ...]
    V: IntMatrix

    def diagonal_entry(self, i: int) -> int:
        return self.diag[i] if i < len(self.diag) else 0

    def verify(self, a: IntMatrix) -> bool:
        prod = self.U.matmul(a).matmul(self.V)
        for i in range(prod.rows):
            for j in range(prod.cols):
                expected = self.diag[i] if (i == j and i < len(self.diag)) else 0
                if prod.data[i][j] != expected:
                    return False
        return abs(self.U.det()) == 1 and abs(self.V.det()) == 1


class _OverflowRisk(Exception):
    pass


def smith_normal_form(a: IntMatrix) -> SnfDecomposition:
    """Exact Smith Normal Form with minimum-magnitude pivoting."""
    try:
        m = np.array([list(r) for r in a.data], dtype=np.int64).reshape(a.rows, a.cols)
        u, d, v = _snf_inplace(m, guard=True)
    except _OverflowRisk:
        m = np.array([list(r) for r in a.data], dtype=object).reshape(a.rows, a.cols)
        u, d, v = _snf_inplace(m, guard=False)
    return SnfDecomposition(
        IntMatrix.from_rows([[int(x) for x in row] for row in u], a.rows),
        tuple(int(x) for x in d),
        IntMatrix.from_rows([[int(x) for x in row] for row in v], a.cols),
    )


def _snf_inplace(m: np.ndarray, guard: bool):
    rows, cols = m.shape
    u = np.eye(rows, dtype=m.dtype)
    v = np.eye(cols, dtype=m.dtype)

    def check():
        if guard and (np.abs(m).max(initial=0) > _INT64_GUARD or np.abs(u).max(initial=0) > _INT64_GUARD or np.abs(v).max(initial=0) > _INT64_GUARD):
            raise _OverflowRisk

    for k in range(min(rows, cols)):
        while True:
            sub = m[k:, k:]
            nz = np.nonzero(sub)
            if len(nz[0]) == 0:
                break
            mags = np.abs(sub[nz])
            best = int(np.argmin(mags))
            pi, pj = int(nz[0][best]) + k, int(nz[1][best]) + k
            if pi != k:
                m[[k, pi]] = m[[pi, k]]
                u[[k, pi]] = u[[pi, k]]
            if pj != k:
                m[:, [k, pj]] = m[:, [pj, k]]
                v[:, [k, pj]] = v[:, [pj, k]]
            if m[k, k] < 0:
                m[k] = -m[k]
                u[k] = -u[k]
            pivot = m[k, k]
            # Reduce column k, then row k.
            col = m[k + 1 :, k]
            if np.any(col):
                q = col // pivot
                m[k + 1 :] -= np.outer(q, m[k])
                u[k + 1 :] -= np.outer(q, u[k])
                check()
                if np.any(m[k + 1 :, k]):
                    continue
            rowr = m[k, k + 1 :]
            if np.any(rowr):
                q = rowr // pivot
                m[:, k + 1 :] -= np.outer(m[:, k], q)
                v[:, k + 1 :] -= np.outer(v[:, k], q)
                check()
                if np.any(m[k, k + 1 :]):
                    continue
            # Pivot must divide every remaining entry.
            rem = m[k + 1 :, k + 1 :] % pivot
            bad = np.nonzero(rem)
            if len(bad[0]) == 0:
                break
            i = int(bad[0][0]) + k + 1
            m[k] += m[i]
            u[k] += u[i]
            check()
        if m[k, k] == 0:
            break
    diag = [int(m[i, i]) for i in range(min(rows, cols))]
    while diag and diag[-1] == 0:
        diag.pop()
    return u, diag, v


# ---------------------------------------------------------------------------
# Scaling lattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionBlock:
    """Rows that become left-null vectors of the exponent matrix mod ``modulus``."""

    modulus: int
    rows: IntMatrix  # entries reduced into [0, modulus)

    @property
    def rank(self) -> int:
        return self.rows.rows


@dataclass(frozen=True)
class ScalingLattice:
    """Weight vectors of the detected scaling symmetries.

    ``free`` rows generate the continuous group (one C* factor per row,
    exact left-null vectors of the exponent-difference matrix); each torsion
    block generates root-of-unity candidates mod its divisor.
    """

    nvars: int
    free: IntMatrix
    torsion: tuple[TorsionBlock, ...]

    @property
    def free_rank(self) -> int:
        return self.free.rows

    def is_empty(self) -> bool:
        return self.free.rows == 0 and not self.torsion


def exponent_difference_matrix(system: System) -> IntMatrix:
    """Columns alpha_ij - alpha_i1 (j >= 2) per structural equation, stacked.

    The matrix has one row per variable (unknowns then parameters); patch
    equations contribute no columns.
    """
    nvars = system.n + system.m
    cols: list[tuple[int, ...]] = []
    for eq in system.structural_equations():
        supp = eq.support()
        if not supp:
            raise ValueError("equation with empty support")
        base = supp[0]
        for alpha in supp[1:]:
            cols.append(tuple(a - b for a, b in zip(alpha, base)))
    data = tuple(tuple(col[i] for col in cols) for i in range(nvars))
    return IntMatrix(nvars, len(cols), data)


def extract_scaling_lattice(snf: SnfDecomposition, n_plus_m: int) -> ScalingLattice:
    """Split the rows of U by their diagonal divisor: 1 -> dropped, d>1 ->
    torsion block (reduced mod d), 0 -> free."""
    if snf.U.cols != n_plus_m:
        raise ValueError("SNF does not match the variable count")
    free_rows = []
    torsion_rows: dict[int, list[tuple[int, ...]]] = {}
    for i in range(snf.U.rows):
        d = snf.diagonal_entry(i)
        if d == 0:
            free_rows.append(snf.U.row(i))
        elif d > 1:
            torsion_rows.setdefault(d, []).append(tuple(x % d for x in snf.U.row(i)))
    blocks = tuple(
        TorsionBlock(d, IntMatrix.from_rows(rows, n_plus_m))
        for d, rows in sorted(torsion_rows.items())
    )
    return ScalingLattice(
        n_plus_m, IntMatrix.from_rows(free_rows, n_plus_m), blocks
    )


def detect_scalings(system: System) -> ScalingLattice:
    """Exponent matrix -> SNF -> lattice, in one step."""
    a = exponent_difference_matrix(system)
    if a.cols == 0:
        return ScalingLattice(a.rows, IntMatrix.identity(a.rows), ())
    return extract_scaling_lattice(smith_normal_form(a), a.rows)


def equation_weight(row: Sequence[int], eq) -> int | None:
    """Common weight of all terms of eq under the scaling row, or None if mixed."""
    weights = {sum(u * e for u, e in zip(row, exp)) for exp in eq.support()}
    if len(weights) != 1:
        return None
    return weights.pop()


# ---------------------------------------------------------------------------
# Multidegrees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Multidegree:
    free: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    def __add__(self, other: "Multidegree") -> "Multidegree":
        return Multidegree(
            tuple(a + b for a, b in zip(self.free, other.free)),
            tuple(
                tuple((a + b) for a, b in zip(ta, tb))
                for ta, tb in zip(self.torsion, other.torsion)
            ),
        )


def multidegree(exponent: Exponent, lattice: ScalingLattice) -> Multidegree:
    if len(exponent) != lattice.nvars:
        raise ValueError("exponent length does not match the lattice")
    free = tuple(sum(u * e for u, e in zip(row, exponent)) for row in lattice.free.data)
    torsion = tuple(
        tuple(sum(u * e for u, e in zip(row, exponent)) % blk.modulus for row in blk.rows.data)
        for blk in lattice.torsion
    )
    return Multidegree(free, torsion)


def denominator_multidegree(numer: Multidegree, lattice: ScalingLattice, j: int) -> Multidegree:
    """Multidegree forced on the denominator class for unknown j (0-based):
    subtract column j of every weight matrix, mod d on torsion parts."""
    if not 0 <= j < lattice.nvars:
        raise ValueError("coordinate index out of range")
    free = tuple(nv - row[j] for nv, row in zip(numer.free, lattice.free.data))
    torsion = tuple(
        tuple((nv - row[j]) % blk.modulus for nv, row in zip(part, blk.rows.data))
        for part, blk in zip(numer.torsion, lattice.torsion)
    )
    return Multidegree(free, torsion)


def multidegrees_bulk(exponents: Sequence[Exponent], lattice: ScalingLattice) -> list[Multidegree]:
    """Vectorized multidegree of many exponent vectors (int64-safe sizes only)."""
    if not exponents:
        return []
    e = np.asarray(exponents, dtype=np.int64)
    frees = (
        np.asarray([list(r) for r in lattice.free.data], dtype=np.int64) @ e.T
        if lattice.free.rows
        else np.zeros((0, len(exponents)), dtype=np.int64)
    )
    tors = []
    for blk in lattice.torsion:
        w = np.asarray([list(r) for r in blk.rows.data], dtype=np.int64) @ e.T
        tors.append(w % blk.modulus)
    out = []
    for k in range(len(exponents)):
        out.append(
            Multidegree(
                tuple(int(x) for x in frees[:, k]),
                tuple(tuple(int(x) for x in t[:, k]) for t in tors),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Scaling actions on points
# ---------------------------------------------------------------------------


def scale_factors(row: Sequence[int], lam: complex) -> np.ndarray:
    return np.array([lam ** int(u) for u in row], dtype=complex)


def apply_scaling(row: Sequence[int], lam: complex, point: np.ndarray) -> np.ndarray:
    return np.asarray(point, dtype=complex) * scale_factors(row, lam)


def pure_unknown_free_rows(system: System, lattice: ScalingLattice) -> list[tuple[int, ...]]:
    """Free rows acting on the unknowns only (parameter weights all zero)."""
    n = system.n
    return [row for row in lattice.free.data if all(w == 0 for w in row[n:])]


def repatch_point(
    system: System, lattice: ScalingLattice, point: np.ndarray, tol: float = 1e-9
) -> np.ndarray:
    """Rescale a point along pure-unknown continuous scalings until the patch
    equations hold again.

    Discrete scalings move points off the affine patch slices; the projective
    scale they absorb is exactly a pure-unknown free scaling, so membership
    tests must quotient it out.  Supports patches whose non-constant terms
    share one weight under some pure-unknown free row.
    """
    if not system.patch_indices:
        return point
    z = np.array(point, dtype=complex)
    rows = pure_unknown_free_rows(system, lattice)
    for idx in system.patch_indices:
        eq = system.equations[idx]
        if abs(eq.evaluate(z)) <= tol * (1 + float(np.abs(z).max())):
            continue
        fixed = None
        for row in rows:
            weights = {sum(u * e for u, e in zip(row, exp)) for exp, _ in eq.terms}
            nonzero = [w for w in weights if w != 0]
            if len(weights) == 2 and 0 in weights and len(nonzero) == 1:
                fixed = (row, nonzero[0])
                break
        if fixed is None:
            raise ValueError("cannot re-normalize the scaled point to the patch slice")
        row, w = fixed
        const_val = 0j
        graded_val = 0j
        for exp, c in eq.terms:
            v = coeff_to_complex(c)
            for i, k in enumerate(exp):
                if k:
                    v *= z[i] ** k
            if sum(u * e for u, e in zip(row, exp)) == 0:
                const_val += v
            else:
                graded_val += v
        if graded_val == 0:
            raise ValueError("degenerate point: cannot re-normalize to the patch")
        lam = (-const_val / graded_val) ** (1.0 / w)
        z = apply_scaling(row, lam, z)
    return z


# ---------------------------------------------------------------------------
# Probability-one filtering of discrete candidates
# ---------------------------------------------------------------------------


@dataclass
class CandidateOutcome:
    modulus: int
    vector: tuple[int, ...]
    status: str  # "passed" | "failed_stability" | "failed_commutation" | "undetermined"


@dataclass
class DiscreteScalingFilter:
    lattice: ScalingLattice  # same free part, torsion replaced by commuting subset
    candidates: list[CandidateOutcome]
    enumeration_truncated: bool = False
    composite_modulus_note: bool = False


def _enumerate_candidates(block: TorsionBlock, cap: int = 4096):
    """All Z_d-combinations of the block rows (nonzero, deduplicated); above
    the cap, only single rows and pairwise sums."""
    d = block.modulus
    rows = [list(r) for r in block.rows.data]
    r = len(rows)
    seen: set[tuple[int, ...]] = set()
    out: list[tuple[int, ...]] = []
    truncated = d**r > cap

    def push(vec):
        v = tuple(x % d for x in vec)
        if any(v) and v not in seen:
            seen.add(v)
            out.append(v)

    if not truncated:
        coeffs = [0] * r

        def rec(i):
            if i == r:
                push([sum(c * rows[k][j] for k, c in enumerate(coeffs)) for j in range(block.rows.cols)])
                return
            for c in range(d):
                coeffs[i] = c
                rec(i + 1)
            coeffs[i] = 0

        rec(0)
    else:
        for row in rows:
            push(row)
        for a in range(r):
            for b in range(a + 1, r):
                push([x + y for x, y in zip(rows[a], rows[b])])
    return out, truncated


def _match_index(point: np.ndarray, pool: Sequence[np.ndarray], tol: float, ratio: float):
    """Index of the unique pool point within tol, requiring a distinctness
    ratio against the runner-up; None when no reliable match exists."""
    dists = np.array([float(np.abs(point - q).max()) for q in pool])
    order = np.argsort(dists)
    best = int(order[0])
    if dists[best] > tol:
        return None
    if len(pool) > 1 and dists[int(order[1])] < ratio * max(dists[best], 1e-300):
        return None
    return best


def commuting_discrete_scalings(
    lattice: ScalingLattice,
    system: System,
    mono: "MonodromyResult",
    deck_perms: Sequence[tuple[int, ...]],
    cfg: tracker.TrackerConfig,
    rng: np.random.Generator,
    match_tol: float = 1e-6,
) -> DiscreteScalingFilter:
    """Filter the torsion blocks down to scalings that preserve the tracked
    variety and commute with every deck permutation.

    For each candidate u and primitive d-th root of unity lam, the fiber is
    tracked through a random intermediate parameter point to lam^u (.) p0.
    Test (a): the scaled base solution must appear in the tracked fiber.
    Test (b): for each deck permutation, the tracked image of the permuted
    start must be the scaled image of the permuted match.  Tracking failures
    retry with a fresh intermediate point, then mark the candidate
    undetermined (excluded, with a warning).
    """
    base = mono.base
    x0 = np.asarray(base.solutions[0])
    p0 = np.asarray(base.params)
    n = system.n
    nontrivial = [p for p in deck_perms if p != tuple(range(len(p)))]

    outcomes: list[CandidateOutcome] = []
    passing: dict[int, list[tuple[int, ...]]] = {}
    truncated_any = False
    composite = any(
        blk.modulus > 1 and not _is_prime(blk.modulus) for blk in lattice.torsion
    )

    # The first homotopy leg p0 -> p1 does not depend on the candidate, so one
    # tracked intermediate fiber per retry round is shared by all of them.
    legs: list["tracker.FiberSample"] = []

    def leg(attempt: int):
        while len(legs) <= attempt:
            for _ in range(5):
                p_mid = rng.standard_normal(system.m) + 1j * rng.standard_normal(system.m)
                try:
                    legs.append(tracker.track_fiber(system, base, p_mid, cfg, rng=rng))
                    break
                except tracker.FiberTrackingError:
                    continue
            else:
                raise RuntimeError("could not track an intermediate fiber")
        return legs[attempt]

    for blk in lattice.torsion:
        d = blk.modulus
        lam = -1.0 + 0.0j if d == 2 else cmath.exp(2j * cmath.pi / d)
        candidates, truncated = _enumerate_candidates(blk)
        truncated_any = truncated_any or truncated
        for u in candidates:
            outcome = _test_candidate(
                system, lattice, base, u, lam, nontrivial, cfg, rng, match_tol, leg
            )
            outcomes.append(CandidateOutcome(d, u, outcome))
            if outcome == "passed":
                passing.setdefault(d, []).append(u)

    blocks = []
    for blk in lattice.torsion:
        vecs = passing.get(blk.modulus, [])
        if not vecs:
            continue
        if _is_prime(blk.modulus):
            kept = _independent_mod_p(vecs, blk.modulus)
        else:
            orig = {tuple(r) for r in blk.rows.data}
            kept = [v for v in vecs if v in orig]
        if kept:
            blocks.append(TorsionBlock(blk.modulus, IntMatrix.from_rows(kept, lattice.nvars)))
    filtered = ScalingLattice(lattice.nvars, lattice.free, tuple(blocks))
    return DiscreteScalingFilter(filtered, outcomes, truncated_any, composite)


def _test_candidate(
    system, lattice, base, u, lam, deck_perms, cfg, rng, match_tol, leg
) -> str:
    p0 = np.asarray(base.params)
    n = system.n
    p_scaled = apply_scaling(u[n:], lam, p0)
    scaled_fiber = []
    for sol in base.solutions:
        point = np.concatenate([np.asarray(sol), p0])
        sp = apply_scaling(u, lam, point)
        try:
            sp = repatch_point(system, lattice, sp)
        except ValueError:
            return "failed_stability"
        scaled_fiber.append(sp[:n])

    for attempt in range(3):
        try:
            mid = leg(attempt)
            end = tracker.track_fiber(system, mid, p_scaled, cfg, rng=rng)
        except (tracker.FiberTrackingError, RuntimeError):
            continue
        endpoints = [np.asarray(s) for s in end.solutions]
        # (a) the scaled base solution must lie in the tracked fiber
        if _match_index(scaled_fiber[0], endpoints, match_tol, 1.0) is None:
            return "failed_stability"
        a = _match_index(endpoints[0], scaled_fiber, match_tol, 100.0)
        if a is None:
            continue  # ambiguous: retry
        ok = True
        for sigma in deck_perms:
            b = _match_index(endpoints[sigma[0]], scaled_fiber, match_tol, 100.0)
            if b is None:
                ok = False
                break
            if b != sigma[a]:
                return "failed_commutation"
        if ok:
            return "passed"
    return "undetermined"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def _independent_mod_p(vectors: list[tuple[int, ...]], p: int) -> list[tuple[int, ...]]:
    """Maximal independent subset over Z_p by Gaussian elimination, keeping
    the earliest vectors."""
    kept: list[tuple[int, ...]] = []
    basis: list[list[int]] = []
    for vec in vectors:
        v = [x % p for x in vec]
        for b in basis:
            lead = next((j for j, x in enumerate(b) if x), None)
            if lead is not None and v[lead]:
                factor = (v[lead] * pow(b[lead], -1, p)) % p
                v = [(x - factor * y) % p for x, y in zip(v, b)]
        if any(v):
            basis.append(v)
            kept.append(vec)
    return kept
