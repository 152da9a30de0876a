"""Symplectic and Lagrangian certificates for Omega = Im H_tau.

Omega is nondegenerate on every complex subspace, so it stays symplectic on
regular levels of f_H and on the affine pieces w.H0 + n+(w.H0) of singular
levels.  The KKS form <x, [A, B]> has the commutator [x, H] in its kernel on
every level, which is why it is not used for the fibration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    DEFAULT_FORM,
    CartanElement,
    FormConfig,
    as_element,
    bracket,
    form_gram,
    min_singular_value,
    omega,
    positive_roots,
    random_antihermitian,
    real_rank,
    realified,
    trace_form,
)
from .errors import InputError
from .fibration import (
    fibre_tangent_basis,
    sample_orbit_point,
    tangent_basis,
)

OMEGA_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SymplecticVerdict:
    point: object
    subspace_dim: int
    gram: np.ndarray
    gram_min_sv: float
    antisymmetry_error: float
    nondegenerate: bool


@dataclass(frozen=True)
class LagrangianVerdict:
    description: str
    sample_count: int
    max_abs_omega: float
    submanifold_dim: int
    ambient_dim: int
    dimension_check: bool
    tolerance: float

    @property
    def is_lagrangian_numerically(self) -> bool:
        return self.max_abs_omega < self.tolerance and self.dimension_check


def omega_verdict(point, vectors, cfg: FormConfig = DEFAULT_FORM,
                  tol: float = OMEGA_TOL) -> SymplecticVerdict:
    """Omega-Gram over the realification of a complex span."""
    basis = realified(vectors)
    G = form_gram(lambda a, b: omega(a, b, cfg), basis)
    smin = min_singular_value(G)
    asym = float(np.max(np.abs(G + G.T))) if G.size else 0.0
    ok = len(basis) % 2 == 0 and smin > tol
    return SymplecticVerdict(point, len(basis), G, smin, asym, ok)


def omega_fibre_verdict(x, H: CartanElement, cfg: FormConfig = DEFAULT_FORM,
                        tol: float = OMEGA_TOL) -> SymplecticVerdict:
    fb = fibre_tangent_basis(x, H, cfg)
    return omega_verdict(x, fb.vectors, cfg, tol)


def nplus_basis(w: CartanElement) -> list[np.ndarray]:
    return [r.vector(w.n) for r in positive_roots(w)]


def omega_affine_piece_verdict(wH0: CartanElement, H: CartanElement | None = None,
                               cfg: FormConfig = DEFAULT_FORM,
                               tol: float = OMEGA_TOL) -> SymplecticVerdict:
    """Omega on n+(wH0), the direction space of the affine piece wH0 + n+(wH0).

    ``H`` is accepted for symmetry with the other verdicts; the piece does not
    depend on it.
    """
    return omega_verdict(wH0, nplus_basis(wH0), cfg, tol)


def kks_form(x, A, B, cfg: FormConfig = DEFAULT_FORM) -> complex:
    """omega_x([x, A], [x, B]) = <x, [A, B]>."""
    return trace_form(x, bracket(A, B), cfg)


def ad_preimage(x, V) -> np.ndarray:
    """Some A with [x, A] = V (least squares on ad(x))."""
    X = as_element(x)
    n = X.shape[0]
    eye = np.eye(n)
    # vec([x, A]) = (x (x) I - I (x) x^T) vec(A) for row-major vec
    L = np.kron(X, eye) - np.kron(eye, X.T)
    a, *_ = np.linalg.lstsq(L, as_element(V).ravel(), rcond=None)
    return a.reshape(n, n)


def kks_degeneracy_witness(x, H: CartanElement, cfg: FormConfig = DEFAULT_FORM) -> float:
    """max |<x, [H, A_i]>| over a fibre-tangent basis {[x, A_i]}.

    This is |omega_x([x, H], v)| for v tangent to the level, so a value at
    rounding level shows [x, H] (nonzero at regular points) is KKS-null there.
    """
    fb = fibre_tangent_basis(x, H, cfg)
    vals = [abs(kks_form(x, H.matrix, ad_preimage(x, v), cfg)) for v in fb.vectors]
    return max(vals, default=0.0)


def _compact_basis(n: int) -> list[np.ndarray]:
    """Real basis of su(n)."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j], E[j, i] = 1.0, -1.0
            out.append(E)
            F = np.zeros((n, n), dtype=complex)
            F[i, j], F[j, i] = 1j, 1j
            out.append(F)
    for k in range(n - 1):
        D = np.zeros((n, n), dtype=complex)
        D[k, k], D[k + 1, k + 1] = 1j, -1j
        out.append(D)
    return out


def _lagrangian_check(points, description, ambient_complex_dim, cfg, tol):
    """Max |Omega| over tangent pairs [S, B1], [S, B2] with B in su(n), plus dimension check."""
    worst = 0.0
    dims = set()
    for S in points:
        n = S.shape[0]
        tangents = [bracket(S, B) for B in _compact_basis(n)]
        G = form_gram(lambda a, b: omega(a, b, cfg), tangents)
        worst = max(worst, float(np.max(np.abs(G))) if G.size else 0.0)
        dims.add(real_rank(tangents))
    dim = dims.pop() if len(dims) == 1 else -1
    # Lagrangian: real dimension is half the orbit's real dimension
    return LagrangianVerdict(description, len(points), worst, dim,
                             2 * ambient_complex_dim, dim == ambient_complex_dim, tol)


def lagrangian_verdict_flag(H0: CartanElement, samples: int = 50, seed: int = 0,
                            cfg: FormConfig = DEFAULT_FORM,
                            tol: float = OMEGA_TOL) -> LagrangianVerdict:
    """The flag O(H0) cap i.su(n), sampled as Ad(U) H0 with U unitary."""
    if not H0.is_real:
        raise InputError("the flag check needs a real H0")
    rng = np.random.default_rng(seed)
    pts = [H0.matrix] + [
        sample_orbit_point(H0, random_antihermitian(H0.n, rng, 1.0)).x
        for _ in range(samples - 1)
    ]
    orbit_dim = tangent_basis(H0.matrix).complex_dim
    return _lagrangian_check(pts[:samples], f"flag of {H0!r}", orbit_dim, cfg, tol)


def sphere_point(r: float, p: float, q: float) -> np.ndarray:
    """Hermitian traceless matrix with entries r, -p + iq; on the orbit iff r^2+p^2+q^2 = 1."""
    return np.array([[r, -p + 1j * q], [-p - 1j * q, -r]], dtype=complex)


def lagrangian_verdict_thimble_sphere(samples: int = 50, cfg: FormConfig = DEFAULT_FORM,
                                      seed: int = 0, tol: float = OMEGA_TOL) -> LagrangianVerdict:
    """The sphere of Hermitian matrices inside the sl(2) orbit of diag(1, -1)."""
    rng = np.random.default_rng(seed)
    pts = [sphere_point(1.0, 0.0, 0.0)]
    while len(pts) < samples:
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        pts.append(sphere_point(*v))
    return _lagrangian_check(pts, "sphere r^2+p^2+q^2 = 1 in sl(2)", 2, cfg, tol)
