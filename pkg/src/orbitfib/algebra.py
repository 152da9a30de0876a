"""Matrix model of sl(n, C): bracket, invariant forms, roots and the compact conjugation.

Algebra elements are plain complex ``numpy`` arrays of shape ``(n, n)``;
diagonal (Cartan) elements get a small hashable wrapper because they are used
as dictionary keys all over the place (Weyl orbits, critical values).

The invariant form is ``<X, Y> = c * tr(XY)``.  The constant ``c`` lives in
:class:`FormConfig`; ``c = 1`` is the plain trace form and ``c = 2n`` is the
true Cartan-Killing form of sl(n, C).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InputError

STRUCT_TOL = 1e-9
RANK_TOL = 1e-8


def scale_of(*arrays) -> float:
    """1 + largest entry modulus; absolute tolerances are multiplied by this."""
    m = 0.0
    for a in arrays:
        a = np.asarray(a)
        if a.size:
            m = max(m, float(np.max(np.abs(a))))
    return 1.0 + m


@dataclass(frozen=True)
class FormConfig:
    c: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise InputError(f"form constant must be a positive real, got {self.c!r}")

    @classmethod
    def killing(cls, n: int) -> "FormConfig":
        return cls(2.0 * n)


DEFAULT_FORM = FormConfig()


@dataclass(frozen=True)
class CartanElement:
    """A traceless diagonal matrix stored as its diagonal."""

    diag: tuple = field()

    def __post_init__(self):
        values = tuple(complex(v) for v in self.diag)
        if len(values) < 2:
            raise InputError("sl(n) needs n >= 2")
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in values):
            raise InputError("diagonal entries must be finite")
        s = sum(values)
        if abs(s) > 1e-12 * (1.0 + max(abs(v) for v in values)):
            raise InputError(f"diagonal must sum to zero, got sum {s}")
        object.__setattr__(self, "diag", values)

    @classmethod
    def from_matrix(cls, X, tol: float = STRUCT_TOL) -> "CartanElement":
        X = np.asarray(X, dtype=complex)
        if np.max(np.abs(offdiag_projection(X)), initial=0.0) > tol * scale_of(X):
            raise InputError("matrix is not diagonal")
        return cls(tuple(np.diag(X)))

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.diag, dtype=complex)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.array)

    @property
    def is_real(self) -> bool:
        return all(v.imag == 0.0 for v in self.diag)

    def permuted(self, mapping: Sequence[int]) -> "CartanElement":
        return CartanElement(tuple(self.diag[k] for k in mapping))

    def distance(self, other: "CartanElement") -> float:
        """Entrywise max distance."""
        return float(np.max(np.abs(self.array - other.array)))

    def __repr__(self):
        def fmt(v):
            return f"{v.real:g}" if v.imag == 0 else f"{v:g}"
        return f"CartanElement({', '.join(fmt(v) for v in self.diag)})"


def cartan(*values) -> CartanElement:
    """Shorthand: ``cartan(1, -1)`` or ``cartan([1, -1])``."""
    if len(values) == 1 and not np.isscalar(values[0]):
        values = tuple(values[0])
    return CartanElement(tuple(values))


@dataclass(frozen=True)
class Root:
    """The root alpha_ij: diag(a) -> a_i - a_j (0-based indices)."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise InputError("a root needs i != j")

    def __call__(self, H) -> complex:
        d = H.diag if isinstance(H, CartanElement) else np.diag(np.asarray(H))
        return complex(d[self.i] - d[self.j])

    def vector(self, n: int) -> np.ndarray:
        return elementary(n, self.i, self.j)

    @property
    def label(self) -> str:
        return f"alpha_{self.i + 1}{self.j + 1}"


def elementary(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1.0
    return E


def as_element(X, n: int | None = None) -> np.ndarray:
    """Coerce to a complex square matrix of size >= 2 (and ``n`` if given)."""
    if isinstance(X, CartanElement):
        X = X.matrix
    A = np.asarray(X, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] < 2:
        raise DimensionError("sl(n) needs n >= 2")
    if n is not None and A.shape[0] != n:
        raise DimensionError(f"expected {n}x{n}, got {A.shape[0]}x{A.shape[0]}")
    return A


def _pair(X, Y):
    A = as_element(X)
    B = as_element(Y)
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def is_traceless(X, tol: float = 1e-12) -> bool:
    A = as_element(X)
    return abs(np.trace(A)) <= tol * scale_of(A)


def bracket(X, Y) -> np.ndarray:
    A, B = _pair(X, Y)
    return A @ B - B @ A


def trace_form(X, Y, cfg: FormConfig = DEFAULT_FORM) -> complex:
    A, B = _pair(X, Y)
    # tr(AB) without forming the product
    return complex(cfg.c * np.sum(A * B.T))


def tau(Z) -> np.ndarray:
    """Conjugation fixing su(n): Z -> -conj(Z)^T."""
    return -np.conj(as_element(Z)).T


def hermitian_form(X, Y, cfg: FormConfig = DEFAULT_FORM) -> complex:
    """H_tau(X, Y) = -<X, tau Y> = c * tr(X conj(Y)^T)."""
    A, B = _pair(X, Y)
    return complex(cfg.c * np.sum(A * np.conj(B)))


def hnorm(X, cfg: FormConfig = DEFAULT_FORM) -> float:
    A = as_element(X)
    return math.sqrt(cfg.c) * float(np.linalg.norm(A))


def omega(X, Y, cfg: FormConfig = DEFAULT_FORM) -> float:
    """The symplectic form Im H_tau.

    Written out in real and imaginary parts so that omega(X, X) is exactly 0.
    """
    A, B = _pair(X, Y)
    return cfg.c * float(np.sum(A.imag * B.real - A.real * B.imag))


def sl_basis(n: int) -> list[np.ndarray]:
    """Off-diagonal E_ij in row-major order, then E_kk - E_{k+1,k+1}."""
    if n < 2:
        raise InputError("sl(n) needs n >= 2")
    basis = [elementary(n, i, j) for i in range(n) for j in range(n) if i != j]
    for k in range(n - 1):
        h = np.zeros((n, n), dtype=complex)
        h[k, k] = 1.0
        h[k + 1, k + 1] = -1.0
        basis.append(h)
    return basis


def sl_coordinates(X) -> np.ndarray:
    """Coordinates of a traceless X in :func:`sl_basis`."""
    A = as_element(X)
    n = A.shape[0]
    off = [A[i, j] for i in range(n) for j in range(n) if i != j]
    d = np.diag(A)
    # d_1 = h_1, d_k = h_k - h_{k-1}  =>  h_k = d_1 + ... + d_k
    h = np.cumsum(d)[: n - 1]
    return np.concatenate([np.array(off, dtype=complex), h])


def ad_matrix(X) -> np.ndarray:
    """ad(X) as a (n^2-1) x (n^2-1) complex matrix over :func:`sl_basis`."""
    A = as_element(X)
    basis = sl_basis(A.shape[0])
    return np.column_stack([sl_coordinates(A @ B - B @ A) for B in basis])


def killing_via_ad(X, Y) -> complex:
    """tr(ad X ad Y), computed from explicit ad matrices."""
    A, B = _pair(X, Y)
    return complex(np.trace(ad_matrix(A) @ ad_matrix(B)))


def is_regular(H, tol: float = STRUCT_TOL) -> bool:
    d = H.array if isinstance(H, CartanElement) else np.diag(as_element(H))
    n = len(d)
    return all(abs(d[i] - d[j]) > tol for i in range(n) for j in range(i + 1, n))


def roots(n: int) -> list[Root]:
    if n < 2:
        raise InputError("sl(n) needs n >= 2")
    return [Root(i, j) for i in range(n) for j in range(n) if i != j]


def is_positive(value: complex, tol: float = STRUCT_TOL) -> bool:
    """Lexicographic positivity on C (real part first, then imaginary part)."""
    if value.real > tol:
        return True
    return abs(value.real) <= tol and value.imag > tol


def positive_roots(w: CartanElement, tol: float = STRUCT_TOL) -> list[Root]:
    """Roots alpha with alpha(w) > 0; spans n+(w).

    For real w this is the plain sign test.  Complex diagonals use the
    lexicographic order, which still picks exactly one of +-alpha whenever
    alpha(w) != 0.
    """
    return [r for r in roots(w.n) if is_positive(r(w), tol)]


def offdiag_projection(X) -> np.ndarray:
    A = np.array(as_element(X), copy=True)
    np.fill_diagonal(A, 0.0)
    return A


def charpoly_coefficients(X) -> np.ndarray:
    """Elementary symmetric functions e_1..e_n of the eigenvalues of X.

    Computed from power traces with Newton's identities, no eigensolver.
    The characteristic polynomial is t^n - e_1 t^{n-1} + e_2 t^{n-2} - ...
    """
    A = as_element(X)
    n = A.shape[0]
    p = []
    P = np.eye(n, dtype=complex)
    for _ in range(n):
        P = P @ A
        p.append(np.trace(P))
    e = [1.0 + 0j]
    for k in range(1, n + 1):
        s = sum((-1) ** (i - 1) * e[k - i] * p[i - 1] for i in range(1, k + 1))
        e.append(s / k)
    return np.array(e[1:], dtype=complex)


def random_element(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Gaussian traceless complex matrix."""
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    X -= np.trace(X) / n * np.eye(n)
    return scale * X


def random_antihermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Gaussian element of su(n)."""
    X = random_element(n, rng)
    X = 0.5 * (X - np.conj(X).T)
    X -= np.trace(X) / n * np.eye(n)
    return scale * X


# --- realification -------------------------------------------------------

def to_real(X) -> np.ndarray:
    A = np.asarray(X, dtype=complex).ravel()
    return np.concatenate([A.real, A.imag])


def from_real(v: np.ndarray, n: int) -> np.ndarray:
    m = n * n
    return (v[:m] + 1j * v[m:]).reshape(n, n)


def complex_structure(n: int) -> np.ndarray:
    """J on the realification of gl(n, C): multiplication by i."""
    m = n * n
    J = np.zeros((2 * m, 2 * m))
    J[m:, :m] = np.eye(m)
    J[:m, m:] = -np.eye(m)
    return J


def realified(vectors: Iterable[np.ndarray]) -> list[np.ndarray]:
    """Real spanning set [v1, i v1, v2, i v2, ...] of a complex span."""
    out = []
    for v in vectors:
        out.append(v)
        out.append(1j * v)
    return out


def real_rank(vectors: Sequence[np.ndarray], rel_tol: float = RANK_TOL) -> int:
    if len(vectors) == 0:
        return 0
    M = np.column_stack([to_real(v) for v in vectors])
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def is_complex_subspace(vectors: Sequence[np.ndarray], rel_tol: float = RANK_TOL) -> bool:
    """True iff the real span of ``vectors`` is closed under J."""
    if len(vectors) == 0:
        return True
    n = np.asarray(vectors[0]).shape[0]
    J = complex_structure(n)
    base = [to_real(v) for v in vectors]
    rotated = [J @ v for v in base]
    r = real_rank(vectors, rel_tol)
    both = [from_real(v, n) for v in base + rotated]
    return real_rank(both, rel_tol) == r


def form_gram(form, vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Real Gram matrix [form(v_a, v_b)] of a real-valued bilinear form."""
    k = len(vectors)
    G = np.zeros((k, k))
    for a in range(k):
        for b in range(k):
            G[a, b] = form(vectors[a], vectors[b])
    return G


def min_singular_value(M: np.ndarray) -> float:
    if M.size == 0:
        return math.inf
    return float(np.linalg.svd(M, compute_uv=False)[-1])
