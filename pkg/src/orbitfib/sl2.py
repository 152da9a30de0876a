"""The sl(2, C) example: H = H0 = diag(1, -1).

The orbit is the surface x^2 + yz = 1 (matrix (x, y; z, -x)), the height is
f = 2x, the critical values are +-2 and the thimbles are discs swept by the
circles (lambda/2, e^{it} s, e^{-it} s) with s = sqrt(1 - lambda^2/4).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import omega
from .errors import InputError
from .symplectic import LagrangianVerdict

SURFACE_TOL = 1e-10


@dataclass(frozen=True)
class SurfacePoint:
    x: complex
    y: complex
    z: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.x, self.y], [self.z, -self.x]], dtype=complex)

    @property
    def residual(self) -> float:
        return abs(self.x * self.x + self.y * self.z - 1.0)

    @property
    def f(self) -> complex:
        return 2 * self.x

    def on_surface(self, tol: float = SURFACE_TOL) -> bool:
        return self.residual < tol

    @classmethod
    def from_matrix(cls, X) -> "SurfacePoint":
        X = np.asarray(X, dtype=complex)
        return cls(complex(X[0, 0]), complex(X[0, 1]), complex(X[1, 0]))


def _check_which(which: int) -> int:
    if which not in (2, -2):
        raise InputError("critical value must be +2 or -2")
    return which


def fibre_points(lam: complex, b_samples) -> list[SurfacePoint]:
    """Points (lambda/2, b, (1 - lambda^2/4)/b) of the regular level f = lambda."""
    lam = complex(lam)
    if abs(lam - 2) < SURFACE_TOL or abs(lam + 2) < SURFACE_TOL:
        raise InputError("lambda = +-2 is a critical value; use singular_fibre_membership")
    rhs = 1 - lam * lam / 4
    out = []
    for b in b_samples:
        b = complex(b)
        if b == 0:
            raise InputError("b = 0 does not parametrize a point of a regular level")
        out.append(SurfacePoint(lam / 2, b, rhs / b))
    return out


def singular_fibre_membership(p: SurfacePoint, which: int, tol: float = SURFACE_TOL):
    """Membership in the singular level f = which, with the branch it lies on.

    The level through diag(s, -s), s = which/2, is the union of the two affine
    lines s + n+ and s + n-.  Returns ``(member, branch)`` with branch one of
    ``"n+"``, ``"n-"``, ``"critical"`` (both lines) or ``None``.  For s = 1
    the n+ line is the y-axis, for s = -1 it is the z-axis.
    """
    s = _check_which(which) // 2
    if abs(p.x - s) >= tol or abs(p.y * p.z) >= tol:
        return False, None
    y_zero, z_zero = abs(p.y) < tol, abs(p.z) < tol
    if y_zero and z_zero:
        return True, "critical"
    on_y_axis = z_zero
    if s == 1:
        return True, "n+" if on_y_axis else "n-"
    return True, "n-" if on_y_axis else "n+"


def thimble_point(lam: float, t: float) -> SurfacePoint:
    if abs(lam) > 2:
        raise InputError("thimble parameter must satisfy |lambda| <= 2")
    r = math.sqrt(max(0.0, 1 - lam * lam / 4))
    return SurfacePoint(complex(lam / 2), cmath.exp(1j * t) * r, cmath.exp(-1j * t) * r)


@dataclass(frozen=True)
class Thimble:
    critical_value: int
    path: tuple
    circles: tuple = field(repr=False)


def thimble(which: int, n_lambda: int = 21, n_t: int = 32, base: float = 0.0) -> Thimble:
    """Vanishing circles over the straight path from ``base`` to the critical value."""
    _check_which(which)
    lams = tuple(float(v) for v in np.linspace(base, which, n_lambda))
    ts = np.linspace(0, 2 * math.pi, n_t, endpoint=False)
    circles = tuple(tuple(thimble_point(lam, t) for t in ts) for lam in lams)
    return Thimble(which, lams, circles)


def thimble_lagrangian_check(which: int, grid=(20, 20), step: float = 1e-5,
                             tol: float = 1e-8) -> LagrangianVerdict:
    """Omega on finite-difference tangents (d/dlambda, d/dt) of the thimble disc.

    The lambda-grid stops short of the critical value, where the disc is not
    smooth in these coordinates.
    """
    _check_which(which)
    n_lam, n_t = grid
    worst = 0.0
    for a in range(n_lam):
        lam = which * a / n_lam
        for b in range(n_t):
            t = 2 * math.pi * b / n_t
            d_lam = (thimble_point(lam + step, t).matrix - thimble_point(lam - step, t).matrix) / (2 * step)
            d_t = (thimble_point(lam, t + step).matrix - thimble_point(lam, t - step).matrix) / (2 * step)
            worst = max(worst, abs(omega(d_lam, d_t)), abs(omega(d_t, d_t)))
    return LagrangianVerdict(f"thimble over [0, {which}]", n_lam * n_t, worst, 2, 4, True, tol)


# --- Morse perturbation of the vanishing cycle --------------------------------

@dataclass(frozen=True)
class MorseGenerator:
    theta: float
    morse_index: int
    degree: int


def morse_perturbation_generators(morse_critical_count: int = 2, eps: float = 0.1,
                                  resolution: int = 4096) -> list[MorseGenerator]:
    """Intersections of the zero section of T*S^1 with the graph of eps*df.

    f(theta) = cos(m theta / 2) has m critical points; the graph of eps*df
    meets the zero section where df = 0.  Roots are located by sign changes on
    a grid and refined by bisection; degree = 1 - Morse index.
    """
    m = morse_critical_count
    if m < 2 or m % 2:
        raise InputError("a Morse function on the circle has an even number (>= 2) of critical points")
    k = m / 2

    def df(th):
        return -eps * k * math.sin(k * th)

    def d2f(th):
        return -eps * k * k * math.cos(k * th)

    # offset grid so no node sits exactly on a root
    h = 2 * math.pi / resolution
    nodes = [(j + 0.5) * h for j in range(resolution)]
    gens = []
    for j in range(resolution):
        a = nodes[j]
        b = nodes[(j + 1) % resolution] + (2 * math.pi if j == resolution - 1 else 0.0)
        fa, fb = df(a), df(b)
        if fa == 0 or fa * fb > 0:
            continue
        for _ in range(60):
            mid = 0.5 * (a + b)
            if df(a) * df(mid) <= 0:
                b = mid
            else:
                a = mid
        root = (0.5 * (a + b)) % (2 * math.pi)
        curvature = d2f(root)
        if curvature == 0:
            raise InputError("degenerate critical point; the intersection is not transverse")
        index = 0 if curvature > 0 else 1
        gens.append(MorseGenerator(root, index, 1 - index))
    return sorted(gens, key=lambda g: g.theta)


def vanishing_cycle_intersections(morse_critical_count: int = 2, eps: float = 0.1) -> int:
    return len(morse_perturbation_generators(morse_critical_count, eps))


# --- Fukaya-Seidel report ----------------------------------------------------------

@dataclass(frozen=True)
class FSCategoryReport:
    objects: tuple
    hom_ranks: dict
    products_nontrivial: tuple
    products_provenance: str
    intersection_count: int

    def __post_init__(self):
        r = len(self.objects)
        for i in range(r):
            if self.hom_ranks.get((i, i)) != 1:
                raise ValueError(f"Hom(L_{i}, L_{i}) must be rank 1")
            for j in range(i):
                if self.hom_ranks.get((i, j)) != 0:
                    raise ValueError(f"directedness violated: Hom(L_{i}, L_{j}) != 0")

    @property
    def degrees(self) -> tuple:
        return tuple(d for _, d in self.objects)


def fs_report(morse_critical_count: int = 2) -> FSCategoryReport:
    """Directed category of the two vanishing cycles over the base value 0."""
    gens = morse_perturbation_generators(morse_critical_count)
    count = len(gens)
    degrees = sorted({g.degree for g in gens})
    objects = tuple((f"L_{k}", d) for k, d in enumerate(degrees))
    hom = {(0, 0): 1, (1, 1): 1, (0, 1): count, (1, 0): 0}
    return FSCategoryReport(
        objects=objects,
        hom_ranks=hom,
        products_nontrivial=("m_2(., id)", "m_2(id, .)"),
        products_provenance="asserted, not computed",
        intersection_count=count,
    )
