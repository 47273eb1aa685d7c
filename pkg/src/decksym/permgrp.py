"""Permutation-group computations on fiber labels.

Permutations are image tuples on 0..d-1: ``sigma[i]`` is where label i goes.
Composition is (p * q)(i) = p(q(i)).  The key operation is the centralizer of
a transitive group in the full symmetric group: it is semiregular, so each of
its elements is determined by the image of label 0 and can be reconstructed
by propagating along a Schreier tree instead of enumerating the group.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Perm = tuple[int, ...]


def identity(degree: int) -> Perm:
    return tuple(range(degree))


def compose(p: Perm, q: Perm) -> Perm:
    """Apply q first, then p."""
    return tuple(p[q[i]] for i in range(len(p)))


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def order_of(p: Perm) -> int:
    seen = [False] * len(p)
    result = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        result = _lcm(result, length)
    return result


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a * b // gcd(a, b)


def cycles_string(p: Perm, one_based: bool = True) -> str:
    """Cycle notation, e.g. '(1 4)(2 5)(3 6)'; identity renders as '()'."""
    base = 1 if one_based else 0
    seen = set()
    out = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            seen.add(i)
            continue
        cyc = [i]
        j = p[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        seen.add(i)
        out.append("(" + " ".join(str(k + base) for k in cyc) + ")")
    return "".join(out) if out else "()"


def from_cycles(cycles: Iterable[Iterable[int]], degree: int, one_based: bool = True) -> Perm:
    base = 1 if one_based else 0
    images = list(range(degree))
    for cyc in cycles:
        cyc = [c - base for c in cyc]
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            images[a] = b
    p = tuple(images)
    if not is_permutation(p):
        raise ValueError("cycles do not define a permutation")
    return p


@dataclass(frozen=True)
class PermutationGroup:
    degree: int
    generators: tuple[Perm, ...]

    def __post_init__(self):
        for g in self.generators:
            if len(g) != self.degree or not is_permutation(g):
                raise ValueError(f"bad generator {g} for degree {self.degree}")


def orbit(group: PermutationGroup, start: int) -> set[int]:
    seen = {start}
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for g in group.generators:
            w = g[v]
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return seen


def is_transitive(group: PermutationGroup) -> bool:
    if group.degree == 0:
        return True
    if not group.generators:
        return group.degree == 1
    return len(orbit(group, 0)) == group.degree


def group_order_capped(group: PermutationGroup, cap: int) -> int | None:
    """Order of the generated group by breadth-first closure; None above cap."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    ident = identity(group.degree)
    elements = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for el in frontier:
            for g in group.generators:
                prod = compose(g, el)
                if prod not in elements:
                    elements.add(prod)
                    if len(elements) > cap:
                        return None
                    nxt.append(prod)
        frontier = nxt
    return len(elements)


def _schreier_tree(group: PermutationGroup) -> list[tuple[int, Perm] | None]:
    """Breadth-first tree over the orbit of 0: tree[v] = (parent, generator)."""
    d = group.degree
    tree: list[tuple[int, Perm] | None] = [None] * d
    seen = {0}
    queue = [0]
    while queue:
        v = queue.pop(0)
        for g in group.generators:
            w = g[v]
            if w not in seen:
                seen.add(w)
                tree[w] = (v, g)
                queue.append(w)
    return tree


def centralizer_in_symmetric(group: PermutationGroup) -> list[Perm]:
    """All elements of S_d commuting with every generator of a transitive group.

    For each candidate image c of label 0, the rest of sigma is forced by
    sigma(g(v)) = g(sigma(v)) along the Schreier tree; the candidate survives
    if the filled-in map is a permutation commuting with all generators.
    The output always contains the identity and has at most d elements.
    """
    if not is_transitive(group):
        raise ValueError("centralizer computation requires a transitive group")
    d = group.degree
    tree = _schreier_tree(group)
    order = sorted(range(d), key=lambda v: _tree_depth(tree, v))
    out: list[Perm] = []
    for c in range(d):
        sigma = [-1] * d
        sigma[0] = c
        ok = True
        for v in order[1:]:
            parent, g = tree[v]  # type: ignore[misc]
            if sigma[parent] == -1:
                ok = False
                break
            sigma[v] = g[sigma[parent]]
        if not ok or -1 in sigma or not is_permutation(sigma):
            continue
        cand = tuple(sigma)
        if all(compose(cand, g) == compose(g, cand) for g in group.generators):
            out.append(cand)
    out.sort()
    return out


def _tree_depth(tree, v: int) -> int:
    depth = 0
    while tree[v] is not None:
        v = tree[v][0]
        depth += 1
    return depth


def minimal_block_containing(group: PermutationGroup, alpha: int) -> tuple[frozenset, ...]:
    """Finest block system whose block through 0 contains alpha (Atkinson).

    Union-find refinement: merge 0 with alpha, then close under the
    generators until every generator maps classes onto classes.
    """
    d = group.degree
    parent = list(range(d))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> bool:
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[max(rx, ry)] = min(rx, ry)
        return True

    queue = [(0, alpha)]
    union(0, alpha)
    while queue:
        x, y = queue.pop()
        for g in group.generators:
            if union(g[x], g[y]):
                queue.append((g[x], g[y]))
    classes: dict[int, set[int]] = {}
    for v in range(d):
        classes.setdefault(find(v), set()).add(v)
    return tuple(sorted((frozenset(c) for c in classes.values()), key=sorted))


def minimal_block_systems(group: PermutationGroup) -> list[tuple[frozenset, ...]]:
    """Distinct nontrivial minimal block systems; empty iff the action is primitive."""
    if not is_transitive(group):
        raise ValueError("block systems require a transitive group")
    d = group.degree
    systems = []
    seen = set()
    for alpha in range(1, d):
        part = minimal_block_containing(group, alpha)
        if len(part) in (1, d):
            continue
        if part not in seen:
            seen.add(part)
            systems.append(part)
    return systems


def is_block_system(group: PermutationGroup, partition: Iterable[Iterable[int]]) -> bool:
    blocks = {frozenset(b) for b in partition}
    for g in group.generators:
        for b in blocks:
            if frozenset(g[v] for v in b) not in blocks:
                return False
    return True


def describe_group(elements: Sequence[Perm]) -> str:
    """Isomorphism-type label from elementary invariants (order, abelianness,
    element orders); exact for the small groups that actually occur here."""
    n = len(elements)
    if n == 0:
        return "trivial"
    if n == 1:
        return "trivial"
    abelian = all(
        compose(a, b) == compose(b, a) for i, a in enumerate(elements) for b in elements[i + 1 :]
    )
    orders = sorted(order_of(p) for p in elements)
    if abelian:
        if all(o <= 2 for o in orders):
            k = n.bit_length() - 1
            if 2**k == n:
                return "Z2" if n == 2 else " x ".join(["Z2"] * k)
        if n in orders:
            return f"Z{n}"
        return f"abelian of order {n} (element orders {sorted(set(orders))})"
    if n == 6:
        return "S3"
    return f"nonabelian of order {n} (element orders {sorted(set(orders))})"
