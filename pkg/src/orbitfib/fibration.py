"""The height function f_H(x) = <H, x> on the adjoint orbit O(H0).

Points of the orbit carry a membership certificate: the drift of their
characteristic polynomial coefficients away from those of H0.  Tangent spaces
are numerical column spaces of ad(x).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import (
    DEFAULT_FORM,
    RANK_TOL,
    STRUCT_TOL,
    CartanElement,
    FormConfig,
    as_element,
    bracket,
    charpoly_coefficients,
    is_regular,
    min_singular_value,
    random_element,
    realified,
    scale_of,
    sl_basis,
    trace_form,
)
from .errors import DimensionError, InputError, NotTangentError, SingularPointError
from .weyl import GeneralPositionReport, WeylOrbitRecord, critical_values, weyl_orbit

MAX_EXP_NORM = 20.0
HESSIAN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class OrbitPoint:
    x: np.ndarray
    H0: CartanElement
    charpoly_drift: float

    @classmethod
    def of(cls, x, H0: CartanElement) -> "OrbitPoint":
        X = as_element(x, H0.n)
        return cls(X, H0, charpoly_drift(X, H0))

    @property
    def n(self) -> int:
        return self.H0.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.x, dtype=dtype)


def charpoly_drift(x, H0: CartanElement) -> float:
    return float(np.max(np.abs(charpoly_coefficients(x) - charpoly_coefficients(H0.matrix))))


def sample_orbit_point(H0: CartanElement, A) -> OrbitPoint:
    """exp(A) H0 exp(-A)."""
    A = as_element(A)
    if A.shape[0] != H0.n:
        raise DimensionError("A and H0 have different sizes")
    if np.linalg.norm(A) > MAX_EXP_NORM:
        raise InputError(f"|A| > {MAX_EXP_NORM}: exponential would overflow the drift budget")
    g = scipy.linalg.expm(A)
    g_inv = scipy.linalg.expm(-A)
    return OrbitPoint.of(g @ H0.matrix @ g_inv, H0)


def random_orbit_point(H0: CartanElement, rng: np.random.Generator,
                       min_norm: float = 0.3, max_norm: float = 1.2) -> OrbitPoint:
    A = random_element(H0.n, rng)
    A *= rng.uniform(min_norm, max_norm) / np.linalg.norm(A)
    return sample_orbit_point(H0, A)


def height(x, H: CartanElement, cfg: FormConfig = DEFAULT_FORM) -> complex:
    X = as_element(x, H.n)
    return complex(cfg.c * np.dot(H.array, np.diag(X)))


@dataclass(frozen=True, eq=False)
class TangentBasis:
    """Orthonormal (for the trace Hermitian product) complex basis of a tangent space."""

    base_point: object
    vectors: tuple
    complex_dim: int

    def realified(self) -> list:
        return realified(self.vectors)

    def coefficients(self, V) -> np.ndarray:
        V = as_element(V)
        return np.array([np.sum(np.conj(v) * V) for v in self.vectors], dtype=complex)

    def residual(self, V) -> float:
        """Frobenius distance from V to the span."""
        V = as_element(V)
        proj = sum((c * v for c, v in zip(self.coefficients(V), self.vectors)),
                   np.zeros_like(V))
        return float(np.linalg.norm(V - proj))

    def contains(self, V, tol: float = STRUCT_TOL) -> bool:
        return self.residual(V) <= tol * scale_of(V)


def tangent_basis(x) -> TangentBasis:
    """Basis of Im ad(x), by singular-value thresholding of ad(x) applied to sl(n)."""
    X = as_element(x)
    n = X.shape[0]
    M = np.column_stack([(X @ B - B @ X).ravel() for B in sl_basis(n)])
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = 0 if s[0] == 0.0 else int(np.sum(s > RANK_TOL * s[0]))
    vectors = tuple(U[:, k].reshape(n, n) for k in range(rank))
    return TangentBasis(x, vectors, rank)


def differential(x, V, H: CartanElement, cfg: FormConfig = DEFAULT_FORM,
                 check: bool = True, tol: float = STRUCT_TOL) -> complex:
    """(df_H)_x(V) = <H, V> for V tangent to the orbit at x."""
    V = as_element(V, H.n)
    if check:
        tb = tangent_basis(x)
        if not tb.contains(V, tol):
            raise NotTangentError(
                f"V is not tangent at x (residual {tb.residual(V):.3e})"
            )
    return trace_form(H.matrix, V, cfg)


def commutator_norm(x, H: CartanElement) -> float:
    return float(np.linalg.norm(bracket(x, H.matrix)))


def is_singular_point(x, H: CartanElement, tol: float = STRUCT_TOL) -> bool:
    return commutator_norm(x, H) <= tol * scale_of(as_element(x))


def critical_points(H0: CartanElement, H: CartanElement) -> list[CartanElement]:
    """Singularities of f_H on O(H0): the Weyl orbit of H0 (needs H regular)."""
    if H0.n != H.n:
        raise DimensionError("H and H0 live in different sl(n)")
    if not is_regular(H):
        raise InputError(f"H = {H!r} is not regular: some root vanishes on it")
    return list(weyl_orbit(H0).points)


def fibre_tangent_basis(x, H: CartanElement, cfg: FormConfig = DEFAULT_FORM,
                        tol: float = STRUCT_TOL) -> TangentBasis:
    """Basis of ker(df_H) inside Im ad(x), i.e. the tangent space to the level through x."""
    if is_singular_point(x, H, tol):
        raise SingularPointError("x is a singular point of f_H; the level is not smooth there")
    tb = tangent_basis(x)
    row = np.array([[trace_form(H.matrix, v, cfg) for v in tb.vectors]])
    N = scipy.linalg.null_space(row)
    vectors = tuple(
        sum((N[k, m] * tb.vectors[k] for k in range(tb.complex_dim)),
            np.zeros_like(tb.vectors[0]))
        for m in range(N.shape[1])
    )
    return TangentBasis(x, vectors, len(vectors))


@dataclass(frozen=True, eq=False)
class HessianCertificate:
    singularity: CartanElement
    gram: np.ndarray
    min_singular_value: float
    max_singular_value: float
    threshold: float
    nondegenerate: bool


def hessian_form(x0, H: CartanElement, A, B, cfg: FormConfig = DEFAULT_FORM) -> complex:
    """Second derivative of f_H at a singularity: <[x0, [H, B]], A>."""
    return trace_form(bracket(x0, bracket(H.matrix, B)), A, cfg)


def hessian_certificate(x0, H: CartanElement, cfg: FormConfig = DEFAULT_FORM,
                        rel_tol: float = HESSIAN_TOL) -> HessianCertificate:
    """Realified Hessian of f_H at the singularity x0, with its smallest singular value.

    The complex-bilinear Hessian is restricted to Im ad(x0); its real part on
    the realified basis {v, iv} is the Hessian of Re f_H, which is
    nondegenerate exactly when the complex form is.
    """
    X0 = as_element(x0, H.n)
    if not is_singular_point(X0, H):
        raise SingularPointError("x0 is not a critical point: [x0, H] != 0")
    basis = tangent_basis(X0).realified()
    k = len(basis)
    G = np.zeros((k, k))
    for a in range(k):
        for b in range(k):
            G[a, b] = hessian_form(X0, H, basis[a], basis[b], cfg).real
    if k:
        s = np.linalg.svd(G, compute_uv=False)
        smin, smax = float(s[-1]), float(s[0])
    else:
        smin, smax = min_singular_value(G), 0.0
    threshold = rel_tol * max(1.0, smax)
    singularity = x0 if isinstance(x0, CartanElement) else CartanElement.from_matrix(X0)
    return HessianCertificate(singularity, G, smin, smax, threshold, smin > threshold)


def betti_predictions(k: int) -> tuple[int, int]:
    """Middle Betti numbers of regular and singular levels, k = number of singularities."""
    return max(k - 1, 0), max(k - 2, 0)


@dataclass(eq=False)
class FibrationAnalysis:
    H: CartanElement
    H0: CartanElement
    cfg: FormConfig
    orbit: WeylOrbitRecord
    gp: GeneralPositionReport
    hessians: list
    betti_regular: int
    betti_singular: int
    failures: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.orbit.orbit_size

    @property
    def passed(self) -> bool:
        return not self.failures


def analyze_fibration(H0: CartanElement, H: CartanElement,
                      cfg: FormConfig = DEFAULT_FORM) -> FibrationAnalysis:
    critical_points(H0, H)  # validates regularity of H
    orbit = weyl_orbit(H0)
    points = list(orbit.points)
    gp = critical_values(H, orbit, cfg)
    hessians = [hessian_certificate(p, H, cfg) for p in points]
    failures = [
        f"degenerate Hessian at {h.singularity!r} (min sv {h.min_singular_value:.3e})"
        for h in hessians if not h.nondegenerate
    ]
    b_reg, b_sing = betti_predictions(orbit.orbit_size)
    return FibrationAnalysis(H, H0, cfg, orbit, gp, hessians, b_reg, b_sing, failures)
