"""Regenerate the bundled fixture systems, seed pairs, and formula files.

Run as ``python -m decksym.fixtures.generate``.  Deterministic: every random
choice comes from fixed-seed generators, so regeneration is reproducible.
The textbook fixtures are written verbatim; the vision and kinematics
fixtures are built symbolically and their seeds come from forward simulation
(sample a scene/mechanism, project it, normalize to the fixture's gauge).
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np

from ..expr import (
    Polynomial,
    format_polynomial,
    format_seed_pair,
    parse_system,
)
from ..tracker import compiled

HERE = Path(__file__).parent

EXACT_ONE = (Fraction(1), Fraction(0))


# ---------------------------------------------------------------------------
# Small textbook fixtures (hand-written)
# ---------------------------------------------------------------------------

EX4_1 = """\
# Quadratic with reciprocal root pair: x * x' = 1 over every parameter value.
unknowns x;
parameters p;
equations
x^2 + p*x + 1;
"""

EX4_2 = """\
# Two-equation system whose deck transformation has polynomial coordinates.
unknowns x, y;
parameters p;
equations
x^2 + x + p;
x + y + p;
"""

SEXTIC = """\
# Palindromic sextic: invariant under x -> 1/x; decomposes through x + 1/x.
unknowns x;
parameters a, b, c, d;
equations
a*x^6 + b*x^5 + c*x^4 + d*x^3 + c*x^2 + b*x + a;
"""

TRIANGULAR = """\
# Sparse system decomposing through (x*z, y*z); degree 32, trivial deck group.
unknowns x, y, z;
parameters a, b, c, d, e, f, g, h, i, j, k, l, m, n, o, p, q, r, s, t, u, v, w;
equations
a*x^3*y*z^4 + b*x^2*y^2*z^4 + c*x^2*y*z^3 + d*x*y^2*z^3 + e*x^2*z^2 + f*x*y*z^2 + g*x*z + h;
i*x^3*y*z^4 + j*x^2*y^2*z^4 + k*x^2*y*z^3 + l*x*y^2*z^3 + m*x^2*z^2 + n*x*y*z^2 + o*x*z + p;
q*x*y*z^4 + r*y*z^5 + s*x*z^3 + t*z^4 + u*z^3 + v*z^2 + w;
"""

# Root-coordinate change of a cubic's solution triple, symmetrized under
# x4 -> -x4; the variety splits into two components with x1^2 = -1/2.
EX5_7 = """\
unknowns x1, x2, x3, x4;
parameters p1, p2, p3;
equations
2*x1^2 + 1;
x2 + 2*x1*x3 + p1;
3*x3^2 + x4^2 - 4*p1*x1*x3 - 2*p2;
x1*x3^3 + 3*x1*x3*x4^2 + p1*x3^2 + p1*x4^2 - 2*p2*x1*x3 - 2*p3;
"""


# ---------------------------------------------------------------------------
# Symbolic helpers
# ---------------------------------------------------------------------------


class Vars:
    """Name registry handing out variable polynomials."""

    def __init__(self):
        self.names: list[str] = []

    def declare(self, *names: str) -> None:
        for n in names:
            if n in self.names:
                raise ValueError(f"duplicate {n}")
            self.names.append(n)

    def finish(self):
        self.nvars = len(self.names)
        self.index = {n: k for k, n in enumerate(self.names)}

    def __getitem__(self, name: str) -> Polynomial:
        return Polynomial.variable(self.nvars, self.index[name])

    def const(self, value) -> Polynomial:
        return Polynomial.constant(self.nvars, (Fraction(value), Fraction(0)))


def write_system(path: Path, header: str, unknowns, parameters, equations, patches=()):
    names = list(unknowns) + list(parameters)
    lines = [header]
    lines.append("unknowns " + ", ".join(unknowns) + ";")
    lines.append("parameters " + ", ".join(parameters) + ";")
    lines.append("equations")
    for eq in equations:
        lines.append(format_polynomial(eq, names) + ";")
    if patches:
        lines.append("patch")
        for eq in patches:
            lines.append(format_polynomial(eq, names) + ";")
    path.write_text("\n".join(lines) + "\n")


def check_seed(path_sys: Path, x: np.ndarray, p: np.ndarray, tol=1e-8) -> None:
    system = parse_system(path_sys.read_text())
    comp = compiled(system)
    res = float(np.abs(comp.f_at(x, p)).max())
    if res > tol:
        raise AssertionError(f"{path_sys.name}: seed residual {res:.3e}")
    jx = comp.jx_at(x, p)
    s = np.linalg.svd(jx, compute_uv=False)
    if s[-1] <= 1e-10 * s[0]:
        raise AssertionError(f"{path_sys.name}: singular Jacobian at seed")


def random_rotation(rng) -> np.ndarray:
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


# ---------------------------------------------------------------------------
# Five-point relative pose
# ---------------------------------------------------------------------------

FIVEPOINT_PATCH = (Fraction(1, 3), Fraction(-1, 2), Fraction(1, 4))


def _rotation_orthogonality(v: Vars):
    eqs = []
    for i in range(3):
        for j in range(i, 3):
            acc = Polynomial.zero(v.nvars)
            for k in range(3):
                acc = acc + v[f"r{k + 1}{i + 1}"] * v[f"r{k + 1}{j + 1}"]
            if i == j:
                acc = acc - v.const(1)
            eqs.append(acc)
    return eqs


def build_fivepoint(homogeneous_points: bool):
    v = Vars()
    unknowns = [f"r{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    unknowns += ["t1", "t2", "t3"]
    unknowns += [f"al{i}" for i in range(1, 6)] + [f"be{i}" for i in range(1, 6)]
    coords = 3 if homogeneous_points else 2
    parameters = [f"x{i}{j}" for i in range(1, 6) for j in range(1, coords + 1)]
    parameters += [f"y{i}{j}" for i in range(1, 6) for j in range(1, coords + 1)]
    v.declare(*unknowns, *parameters)
    v.finish()

    eqs = _rotation_orthogonality(v)
    for i in range(1, 6):
        for j in range(1, 4):
            if homogeneous_points or j < 3:
                lhs = v[f"be{i}"] * v[f"y{i}{j}"]
            else:
                lhs = v[f"be{i}"]
            rhs = v[f"t{j}"]
            for l in range(1, 4):
                if homogeneous_points or l < 3:
                    xi = v[f"x{i}{l}"]
                    rhs = rhs + v[f"r{j}{l}"] * v[f"al{i}"] * xi
                else:
                    rhs = rhs + v[f"r{j}{l}"] * v[f"al{i}"]
            eqs.append(lhs - rhs)
    patch = Polynomial.zero(v.nvars)
    for c, name in zip(FIVEPOINT_PATCH, ("t1", "t2", "t3")):
        patch = patch + v[name].scale((Fraction(c), Fraction(0)))
    patch = patch - v.const(1)
    return unknowns, parameters, eqs, [patch]


def fivepoint_seed(homogeneous_points: bool, rng):
    r = random_rotation(rng)
    t = rng.standard_normal(3)
    alpha = 1.0 + rng.random(5)
    if homogeneous_points:
        x = rng.standard_normal((5, 3))
    else:
        x = np.hstack([rng.standard_normal((5, 2)), np.ones((5, 1))])
    beta = 1.0 + rng.random(5)
    y = np.zeros_like(x)
    for i in range(5):
        w = r @ (alpha[i] * x[i]) + t
        y[i] = w / beta[i]
        if not homogeneous_points:
            # last homogeneous coordinate must be 1: fold the scale into beta
            beta[i] *= y[i, 2]
            y[i] /= y[i, 2]
    # normalize the projective (t, alpha, beta) block onto the patch slice
    a = np.array([float(c) for c in FIVEPOINT_PATCH])
    lam = 1.0 / (a @ t)
    t, alpha, beta = lam * t, lam * alpha, lam * beta
    xs = list(r.flatten()) + list(t) + list(alpha) + list(beta)
    cols = 3 if homogeneous_points else 2
    ps = list(x[:, :cols].flatten()) + list(y[:, :cols].flatten())
    return np.array(xs, dtype=complex), np.array(ps, dtype=complex)


TWISTED_PAIR_DECK = """\
# Twisted-pair symmetry of five-point relative pose:
#   R' = (2 t t^T / |t|^2 - I) R,  t' = t,
#   al' = -al |t|^2 / (2 <t, be y> - |t|^2),  be' = be |t|^2 / (2 <t, be y> - |t|^2)
{rows}
"""


def twisted_pair_formulas() -> str:
    norm = "(t1^2 + t2^2 + t3^2)"
    rows = []
    for k in range(1, 4):
        for l in range(1, 4):
            dot = " + ".join(f"t{m}*r{m}{l}" for m in range(1, 4))
            rows.append(f"r{k}{l} = (2*t{k}*({dot}) - {norm}*r{k}{l})/{norm}")
    for j in range(1, 4):
        rows.append(f"t{j} = t{j}")
    for i in range(1, 6):
        dot = " + ".join(f"t{m}*be{i}*y{i}{m}" for m in range(1, 4))
        den = f"(2*({dot}) - {norm})"
        rows.append(f"al{i} = -al{i}*{norm}/{den}")
        rows.append(f"be{i} = be{i}*{norm}/{den}")
    return TWISTED_PAIR_DECK.format(rows="\n".join(rows))


# ---------------------------------------------------------------------------
# Perspective-3-point
# ---------------------------------------------------------------------------


def build_p3p(homogeneous_points: bool):
    v = Vars()
    unknowns = [f"r{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    unknowns += ["t1", "t2", "t3", "al1", "al2", "al3", "n1", "n2", "n3"]
    img = 3 if homogeneous_points else 2
    wrld = 4 if homogeneous_points else 3
    parameters = [f"x{i}{j}" for i in range(1, 4) for j in range(1, img + 1)]
    parameters += [f"X{i}{j}" for i in range(1, 4) for j in range(1, wrld + 1)]
    v.declare(*unknowns, *parameters)
    v.finish()

    eqs = _rotation_orthogonality(v)
    for i in range(1, 4):
        for j in range(1, 4):
            if homogeneous_points or j < 3:
                lhs = v[f"al{i}"] * v[f"x{i}{j}"]
            else:
                lhs = v[f"al{i}"]
            rhs = Polynomial.zero(v.nvars)
            for l in range(1, 4):
                rhs = rhs + v[f"r{j}{l}"] * v[f"X{i}{l}"]
            rhs = rhs + (v[f"t{j}"] * v[f"X{i}4"] if homogeneous_points else v[f"t{j}"])
            eqs.append(lhs - rhs)
    for i in range(1, 4):
        plane = Polynomial.zero(v.nvars)
        for l in range(1, 4):
            plane = plane + v[f"n{l}"] * v[f"X{i}{l}"]
        plane = plane + (v[f"X{i}4"] if homogeneous_points else -v.const(1))
        eqs.append(plane)
    return unknowns, parameters, eqs, []


def p3p_seed(homogeneous_points: bool, rng):
    r = random_rotation(rng)
    t = rng.standard_normal(3)
    world = rng.standard_normal((3, 3))
    # homogeneous: n . X~_i + X_i4 = 0 with X_i4 = 1; inhomogeneous: n . X~_i = 1
    rhs = -np.ones(3) if homogeneous_points else np.ones(3)
    n = np.linalg.solve(world, rhs)
    xs_img = []
    alphas = []
    for i in range(3):
        w = r @ world[i] + t
        if homogeneous_points:
            alpha = 1.0 + rng.random()
            img = w / alpha
        else:
            alpha = w[2]
            img = w[:2] / alpha
        alphas.append(alpha)
        xs_img.append(img)
    x_vec = list(r.flatten()) + list(t) + alphas + list(n)
    ps = []
    for img in xs_img:
        ps.extend(img)
    for i in range(3):
        ps.extend(world[i])
        if homogeneous_points:
            ps.append(1.0)
    return np.array(x_vec, dtype=complex), np.array(ps, dtype=complex)


P3P_DECK = """\
# Deck transformation of P3P through the plane normal:
#   R' = R (2 n n^T / |n|^2 - I),  t' = 2 R n / |n|^2 - t,  al' = -al,  n' = n
{rows}
"""


def p3p_formulas() -> str:
    norm = "(n1^2 + n2^2 + n3^2)"
    rows = []
    for k in range(1, 4):
        for l in range(1, 4):
            dot = " + ".join(f"r{k}{m}*n{m}" for m in range(1, 4))
            rows.append(f"r{k}{l} = (2*n{l}*({dot}) - {norm}*r{k}{l})/{norm}")
    for j in range(1, 4):
        dot = " + ".join(f"r{j}{m}*n{m}" for m in range(1, 4))
        rows.append(f"t{j} = (2*({dot}) - {norm}*t{j})/{norm}")
    for i in range(1, 4):
        rows.append(f"al{i} = -al{i}")
    for l in range(1, 4):
        rows.append(f"n{l} = n{l}")
    return P3P_DECK.format(rows="\n".join(rows))


# ---------------------------------------------------------------------------
# Radial camera relative pose (stretch fixture)
# ---------------------------------------------------------------------------

N_RADIAL_POINTS = 13


def _cayley_numerators(v: Vars, j: int):
    x, y, z = v[f"x{j}"], v[f"y{j}"], v[f"z{j}"]
    one = v.const(1)
    two = v.const(2)
    row1 = [
        one + x * x - y * y - z * z,
        two * (x * y - z),
        two * (x * z + y),
    ]
    row2 = [
        two * (x * y + z),
        one + y * y - x * x - z * z,
        two * (y * z - x),
    ]
    den = one + x * x + y * y + z * z
    return (row1, row2), den


def build_radial():
    v = Vars()
    unknowns = []
    for j in (2, 3, 4):
        unknowns += [f"x{j}", f"y{j}", f"z{j}"]
    unknowns += ["t31", "t32", "t41", "t42"]
    unknowns += [f"al{i}_{j}" for i in range(1, N_RADIAL_POINTS + 1) for j in range(1, 5)]
    unknowns += [f"X{i}" for i in range(1, N_RADIAL_POINTS + 1)]
    parameters = [
        f"l{i}_{j}_{c}"
        for i in range(1, N_RADIAL_POINTS + 1)
        for j in range(1, 5)
        for c in (1, 2)
    ]
    v.declare(*unknowns, *parameters)
    v.finish()

    eqs = []
    for j in (2, 3, 4):
        (row1, row2), den = _cayley_numerators(v, j)
        if j == 2:
            tj = [v.const(0), v.const(1)]
        else:
            tj = [v[f"t{j}1"], v[f"t{j}2"]]
        for i in range(1, N_RADIAL_POINTS + 1):
            first3 = [
                v[f"al{i}_1"] * v[f"l{i}_1_1"],
                v[f"al{i}_1"] * v[f"l{i}_1_2"],
                v[f"X{i}"],
            ]
            for c, row in ((1, row1), (2, row2)):
                rhs = Polynomial.zero(v.nvars)
                for entry, coord in zip(row, first3):
                    rhs = rhs + entry * coord
                rhs = rhs + den * tj[c - 1]
                eqs.append(den * v[f"al{i}_{j}"] * v[f"l{i}_{j}_{c}"] - rhs)
    return unknowns, parameters, eqs, []


def cay2x3(c):
    x, y, z = c
    d = 1 + x * x + y * y + z * z
    return (
        np.array(
            [
                [1 + x * x - y * y - z * z, 2 * (x * y - z), 2 * (x * z + y)],
                [2 * (x * y + z), 1 + y * y - x * x - z * z, 2 * (y * z - x)],
            ]
        )
        / d
    )


def radial_seed(rng):
    cays = {j: rng.standard_normal(3) * 0.5 for j in (2, 3, 4)}
    trans = {2: np.array([0.0, 1.0])}
    for j in (3, 4):
        trans[j] = rng.standard_normal(2)
    world = rng.standard_normal((N_RADIAL_POINTS, 3)) + np.array([0, 0, 4.0])
    alphas = np.zeros((N_RADIAL_POINTS, 4))
    lines = np.zeros((N_RADIAL_POINTS, 4, 2))
    for i in range(N_RADIAL_POINTS):
        for j in range(1, 5):
            if j == 1:
                w2 = world[i][:2]
            else:
                w2 = cay2x3(cays[j]) @ world[i] + trans[j]
            alpha = 1.0 + rng.random()
            alphas[i, j - 1] = alpha
            lines[i, j - 1] = w2 / alpha
    xs = []
    for j in (2, 3, 4):
        xs.extend(cays[j])
    xs += list(trans[3]) + list(trans[4])
    for i in range(N_RADIAL_POINTS):
        xs.extend(alphas[i])
    xs.extend(world[:, 2])
    ps = []
    for i in range(N_RADIAL_POINTS):
        for j in range(4):
            ps.extend(lines[i, j])
    return np.array(xs, dtype=complex), np.array(ps, dtype=complex)


def radial_formulas() -> str:
    """The four deck generators; each file describes one generator."""
    ident = {}
    for j in (2, 3, 4):
        for n in (f"x{j}", f"y{j}", f"z{j}"):
            ident[n] = n
    for n in ("t31", "t32", "t41", "t42"):
        ident[n] = n
    for i in range(1, N_RADIAL_POINTS + 1):
        for j in range(1, 5):
            ident[f"al{i}_{j}"] = f"al{i}_{j}"
        ident[f"X{i}"] = f"X{i}"

    def render(overrides):
        rows = dict(ident)
        rows.update(overrides)
        return "\n".join(f"{k} = {rows[k]}" for k in rows) + "\n"

    # In this formulation (Cayley denominators cleared, t_j the actual
    # translation coordinates) the depth coordinates are not rescaled by the
    # Cayley flips: the denominator factor d_j -> d_j / z_j^2 cancels against
    # the numerator flip CayNum -> -CayNum / z_j^2.
    psis = {}
    over1 = {}
    for j in (2, 3, 4):
        over1[f"x{j}"] = f"-x{j}"
        over1[f"y{j}"] = f"-y{j}"
    for i in range(1, N_RADIAL_POINTS + 1):
        over1[f"X{i}"] = f"-X{i}"
    psis["radial_psi1.deck"] = render(over1)
    for per, j in (("psi2", 2), ("psi3", 3), ("psi4", 4)):
        over = {
            f"x{j}": f"y{j}/z{j}",
            f"y{j}": f"-x{j}/z{j}",
            f"z{j}": f"-1/z{j}",
        }
        if j == 2:
            over.update({"t31": "-t31", "t32": "-t32", "t41": "-t41", "t42": "-t42"})
            for i in range(1, N_RADIAL_POINTS + 1):
                over[f"al{i}_1"] = f"-al{i}_1"
                over[f"al{i}_3"] = f"-al{i}_3"
                over[f"al{i}_4"] = f"-al{i}_4"
                over[f"X{i}"] = f"-X{i}"
        elif j == 3:
            over.update({"t31": "-t31", "t32": "-t32"})
            for i in range(1, N_RADIAL_POINTS + 1):
                over[f"al{i}_3"] = f"-al{i}_3"
        else:
            over.update({"t41": "-t41", "t42": "-t42"})
            for i in range(1, N_RADIAL_POINTS + 1):
                over[f"al{i}_4"] = f"-al{i}_4"
        psis[f"radial_{per}.deck"] = render(over)
    return psis


# ---------------------------------------------------------------------------
# Nine-point four-bar path synthesis (stretch fixture)
# ---------------------------------------------------------------------------

N_ALT_POSITIONS = 8


def build_alt():
    v = Vars()
    unknowns = ["x", "xb", "y", "yb", "a", "ab", "b", "bb"]
    parameters = []
    for j in range(1, N_ALT_POSITIONS + 1):
        parameters += [f"p{j}", f"pb{j}"]
    v.declare(*unknowns, *parameters)
    v.finish()

    x, xb = v["x"], v["xb"]
    y, yb = v["y"], v["yb"]
    a, ab = v["a"], v["ab"]
    b, bb = v["b"], v["bb"]
    eqs = []
    for j in range(1, N_ALT_POSITIONS + 1):
        p, pb = v[f"p{j}"], v[f"pb{j}"]
        # unit-circle conditions for the crank/rocker angles, linear in
        # (T, Tb) once T*Tb = 1 is substituted
        alpha1 = x * (pb - ab)
        beta1 = xb * (p - a)
        gamma1 = x * xb + (p - a) * (pb - ab) - (x - a) * (xb - ab)
        alpha2 = y * (pb - bb)
        beta2 = yb * (p - b)
        gamma2 = y * yb + (p - b) * (pb - bb) - (y - b) * (yb - bb)
        det = alpha1 * beta2 - alpha2 * beta1
        num_t = beta1 * gamma2 - beta2 * gamma1
        num_tb = alpha2 * gamma1 - alpha1 * gamma2
        eqs.append(num_t * num_tb - det * det)
    return unknowns, parameters, eqs, []


ALT_SWAP_DECK = """\
# Label swap of the four-bar: exchange the crank and rocker sides.
x = y
xb = yb
y = x
yb = xb
a = b
ab = bb
b = a
bb = ab
"""

ALT_ROBERTS_DECK = """\
# Roberts cognate map of the four-bar (order-3 deck generator): the cognate
# whose coupler rotation is the original crank rotation.  Its crank side has
# joint vector (x-a)y/(x-y) about the third pivot (bx-ay)/(x-y); its rocker
# side has joint vector a-x about the original crank pivot.
x = (x - a)*y/(x - y)
xb = (xb - ab)*yb/(xb - yb)
y = a - x
yb = ab - xb
a = (b*x - a*y)/(x - y)
ab = (bb*xb - ab*yb)/(xb - yb)
b = a
bb = ab
"""


def alt_seed(rng):
    mech = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    x, xb, y, yb, a, ab, b, bb = mech
    ps = []
    for _ in range(N_ALT_POSITIONS):
        t = np.exp(2j * np.pi * rng.random())
        tb = 1 / t
        # Eliminate p between the two loop equations, solve the quadratic for
        # the rocker angle S, then back out Q and the coupler position p.
        delta = y - b
        gamma = t * (x - y) + b - a
        rho = tb * (xb - yb) + bb - ab
        c2 = -rho * delta
        c1 = (xb - ab) * (x - a) - delta * (yb - bb) - rho * gamma
        c0 = -gamma * (yb - bb)
        roots = np.roots([c2, c1, c0])
        s = roots[0]
        q = (s * (y - b) + t * (x - y) + b - a) / (x - a)
        p = q * (x - a) - t * x + a
        pb = (1 / q) * (xb - ab) - tb * xb + ab
        ps += [p, pb]
    return np.array(mech, dtype=complex), np.array(ps, dtype=complex)


# ---------------------------------------------------------------------------


def textbook_seeds():
    out = {}
    out["ex4_1"] = (np.array([2.0 + 0j]), np.array([-2.5 + 0j]))
    out["ex4_2"] = (np.array([1.0 + 0j, 1.0 + 0j]), np.array([-2.0 + 0j]))
    rng = np.random.default_rng(100)
    sx = 0.5 + rng.random()
    coeffs = rng.standard_normal(4)
    a, b, c, d = coeffs
    val = a * (sx**6 + 1) + b * (sx**5 + sx) + c * (sx**4 + sx**2) + d * sx**3
    # shift d so the palindromic sextic vanishes at sx
    d = d - val / sx**3
    out["sextic"] = (np.array([sx + 0j]), np.array([a, b, c, d], dtype=complex))
    # triangular system: random unknowns, solve the linear parameter system
    rng = np.random.default_rng(101)
    from ..monodromy import seed_from_linear_params

    system = parse_system(TRIANGULAR)
    out["triangular"] = seed_from_linear_params(system, "random", rng)
    # ex5_7: three chosen cubic roots on the component x1 = -i/sqrt(2)
    r = np.array([0.7, -1.3, 2.1])
    p = np.array(
        [-(r.sum()), r[0] * r[1] + r[0] * r[2] + r[1] * r[2], -r.prod()], dtype=complex
    )
    x1 = -1j / np.sqrt(2)
    out["ex5_7"] = (
        np.array([x1, r[0], (r[1] + r[2]) / (2 * x1), (r[1] - r[2]) / (2 * x1)]),
        p,
    )
    return out


def main() -> None:
    HERE.mkdir(exist_ok=True)
    for name, text in [
        ("ex4_1", EX4_1),
        ("ex4_2", EX4_2),
        ("sextic", SEXTIC),
        ("triangular", TRIANGULAR),
        ("ex5_7", EX5_7),
    ]:
        (HERE / f"{name}.sys").write_text(text)
    for name, (x, p) in textbook_seeds().items():
        (HERE / f"{name}.seed").write_text(format_seed_pair(x, p))
        check_seed(HERE / f"{name}.sys", x, p)

    for name, homog, seed in [
        ("fivepoint_inhom", False, 201),
        ("fivepoint_quasihom", True, 202),
    ]:
        unknowns, parameters, eqs, patches = build_fivepoint(homog)
        write_system(
            HERE / f"{name}.sys",
            "# Five-point relative pose: depths/translation on one projective patch.",
            unknowns,
            parameters,
            eqs,
            patches,
        )
        x, p = fivepoint_seed(homog, np.random.default_rng(seed))
        (HERE / f"{name}.seed").write_text(format_seed_pair(x, p))
        check_seed(HERE / f"{name}.sys", x, p)
    (HERE / "fivepoint_quasihom.deck").write_text(twisted_pair_formulas())

    for name, homog, seed in [("p3p_inhom", False, 203), ("p3p_quasihom", True, 204)]:
        unknowns, parameters, eqs, patches = build_p3p(homog)
        write_system(
            HERE / f"{name}.sys",
            "# Perspective-3-point with the plane normal as an extra unknown.",
            unknowns,
            parameters,
            eqs,
            patches,
        )
        x, p = p3p_seed(homog, np.random.default_rng(seed))
        (HERE / f"{name}.seed").write_text(format_seed_pair(x, p))
        check_seed(HERE / f"{name}.sys", x, p)
    (HERE / "p3p_quasihom.deck").write_text(p3p_formulas())

    unknowns, parameters, eqs, patches = build_radial()
    write_system(
        HERE / "radial.sys",
        "# Radial-camera relative pose, 4 cameras x 13 points (stretch fixture).",
        unknowns,
        parameters,
        eqs,
        patches,
    )
    x, p = radial_seed(np.random.default_rng(205))
    (HERE / "radial.seed").write_text(format_seed_pair(x, p))
    check_seed(HERE / "radial.sys", x, p)
    for fname, text in radial_formulas().items():
        (HERE / fname).write_text(text)

    unknowns, parameters, eqs, patches = build_alt()
    write_system(
        HERE / "alt.sys",
        "# Nine-point four-bar path synthesis, eliminated form (stretch fixture).",
        unknowns,
        parameters,
        eqs,
        patches,
    )
    x, p = alt_seed(np.random.default_rng(206))
    (HERE / "alt.seed").write_text(format_seed_pair(x, p))
    check_seed(HERE / "alt.sys", x, p)
    (HERE / "alt_swap.deck").write_text(ALT_SWAP_DECK)
    (HERE / "alt_roberts.deck").write_text(ALT_ROBERTS_DECK)

    print("fixtures regenerated in", HERE)


if __name__ == "__main__":
    main()
