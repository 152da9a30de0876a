"""Fibre transport along the transversal field Z.

The raw field is ``[x, [tau x, H]] / |[x, H]|^2``.  Evaluating df_H on it gives
-1, not +1 (see ``z_field_raw``), so the flow uses the normalized field
``u / df_H(u)``, whose differential is exactly 1.  Then
f_H(phi_t(x)) = f_H(x) + t e^{i theta} holds along every trajectory.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .algebra import (
    DEFAULT_FORM,
    STRUCT_TOL,
    CartanElement,
    FormConfig,
    as_element,
    bracket,
    elementary,
    hnorm,
    random_element,
    scale_of,
    sl_basis,
    tau,
    to_real,
    from_real,
    trace_form,
)
from .errors import FlowAborted, InputError, SegmentTooCloseError, SingularPointError
from .fibration import OrbitPoint, charpoly_drift, height, random_orbit_point
from .weyl import critical_values, weyl_orbit

EPSILON_FLOOR = 1e-2
EPSILON_FRACTION = 0.25


@dataclass(frozen=True)
class FlowConfig:
    step: float = 1e-3
    epsilon: float | None = None
    max_f_drift: float = 1e-6
    max_charpoly_drift: float = 1e-6

    def __post_init__(self):
        if not self.step > 0:
            raise InputError("flow step must be positive")
        if self.epsilon is not None and not self.epsilon > 0:
            raise InputError("epsilon must be positive")

    def resolved(self, H0: CartanElement) -> "FlowConfig":
        if self.epsilon is not None:
            return self
        return replace(self, epsilon=default_epsilon(H0))


def default_epsilon(H0: CartanElement) -> float:
    """A fraction of the smallest distance between distinct singularities, floored."""
    pts = [p.matrix for p in weyl_orbit(H0).points]
    dists = [np.linalg.norm(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]]
    if not dists:
        return EPSILON_FLOOR
    return max(EPSILON_FRACTION * min(dists), EPSILON_FLOOR)


def _z_numerator(x, H: CartanElement):
    X = as_element(x, H.n)
    xH = bracket(X, H.matrix)
    if np.linalg.norm(xH) <= STRUCT_TOL * scale_of(X):
        raise SingularPointError("Z is undefined where [x, H] = 0")
    return X, xH, bracket(X, bracket(tau(X), H.matrix))


def z_field_raw(x, H: CartanElement, cfg: FormConfig = DEFAULT_FORM) -> np.ndarray:
    """[x, [tau x, H]] / |[x, H]|^2 with the norm of the Hermitian form.

    With the definitions used here df_H of this vector is -1 (e.g. at
    x = antidiag(1, 1), H = diag(1, -1) it equals diag(-1/2, 1/2)).
    """
    _, xH, u = _z_numerator(x, H)
    return u / hnorm(xH, cfg) ** 2


def z_field(x, H: CartanElement, cfg: FormConfig = DEFAULT_FORM) -> np.ndarray:
    """Transport field normalized so that df_H(Z) = 1."""
    _, _, u = _z_numerator(x, H)
    d = trace_form(H.matrix, u, cfg)
    if abs(d) < 1e-14:
        raise SingularPointError("df_H vanishes on the transport direction")
    return u / d


@dataclass(frozen=True, eq=False)
class FlowState:
    point: OrbitPoint
    t: float
    theta: float
    f_value: complex
    f_drift: float
    charpoly_drift: float
    singular_distance: float


def _singular_distance(X, singular):
    return min(float(np.linalg.norm(X - s)) for s in singular)


def flow(x0: OrbitPoint, theta: float, T: float, cfg: FlowConfig = FlowConfig(),
         forms: FormConfig = DEFAULT_FORM, H: CartanElement | None = None) -> list[FlowState]:
    """RK4 integration of x' = e^{i theta} Z(x) for time T.

    Raises FlowAborted (with the partial trajectory) if the path enters the
    epsilon-ball of a singularity or a drift budget is exceeded.
    """
    if H is None:
        raise InputError("flow needs the height element H")
    if T < 0:
        raise InputError("flow time must be non-negative")
    cfg = cfg.resolved(x0.H0)
    H0 = x0.H0
    singular = [p.matrix for p in weyl_orbit(H0).points]
    direction = cmath.exp(1j * theta)
    f_start = height(x0.x, H, forms)

    def rhs(X):
        return direction * z_field(X, H, forms)

    def state(X, t):
        f = height(X, H, forms)
        drift = charpoly_drift(X, H0)
        return FlowState(
            point=OrbitPoint(X, H0, drift),
            t=t, theta=theta, f_value=f,
            f_drift=abs(f - (f_start + t * direction)),
            charpoly_drift=drift,
            singular_distance=_singular_distance(X, singular),
        )

    X = np.array(x0.x, dtype=complex)
    trajectory = [state(X, 0.0)]
    if trajectory[0].singular_distance <= cfg.epsilon:
        raise FlowAborted("start point lies within epsilon of a singularity", "epsilon", trajectory)
    if T == 0:
        return trajectory

    steps = max(1, math.ceil(T / cfg.step - 1e-9))
    h = T / steps
    for k in range(1, steps + 1):
        try:
            k1 = rhs(X)
            k2 = rhs(X + 0.5 * h * k1)
            k3 = rhs(X + 0.5 * h * k2)
            k4 = rhs(X + h * k3)
        except SingularPointError as exc:
            raise FlowAborted(str(exc), "singular", trajectory) from exc
        X = X + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        s = state(X, k * h)
        trajectory.append(s)
        if s.singular_distance <= cfg.epsilon:
            raise FlowAborted(
                f"trajectory entered the {cfg.epsilon:g}-ball of a singularity at t = {s.t:g}",
                "epsilon", trajectory)
        if s.f_drift > cfg.max_f_drift:
            raise FlowAborted(f"f drift {s.f_drift:.3e} over budget at t = {s.t:g}",
                              "f_drift", trajectory)
        if s.charpoly_drift > cfg.max_charpoly_drift:
            raise FlowAborted(
                f"characteristic polynomial drift {s.charpoly_drift:.3e} over budget at t = {s.t:g}",
                "charpoly_drift", trajectory)
    return trajectory


def segment_distance(p: complex, a: complex, b: complex) -> float:
    """Distance in C from p to the segment [a, b]."""
    d = b - a
    if d == 0:
        return abs(p - a)
    s = ((p - a) * d.conjugate()).real / abs(d) ** 2
    s = min(1.0, max(0.0, s))
    return abs(p - (a + s * d))


def check_segment(c: complex, d: complex, H0: CartanElement, H: CartanElement,
                  forms: FormConfig, margin: float) -> None:
    values = critical_values(H, weyl_orbit(H0), forms).critical_values.values()
    for v in values:
        if segment_distance(v, c, d) <= margin:
            raise SegmentTooCloseError(
                f"segment [{c}, {d}] passes within {margin:g} of critical value {v}", v)


def transport_trajectories(samples, c: complex, d: complex, cfg: FlowConfig = FlowConfig(),
                           forms: FormConfig = DEFAULT_FORM, H: CartanElement | None = None):
    """Flow every sample from the level c to the level d; returns one trajectory per sample."""
    samples = list(samples)
    if not samples:
        return []
    H0 = samples[0].H0
    cfg = cfg.resolved(H0)
    if H is None:
        raise InputError("transport needs the height element H")
    check_segment(c, d, H0, H, forms, cfg.epsilon)
    delta = complex(d) - complex(c)
    theta, T = cmath.phase(delta), abs(delta)
    return [flow(p, theta, T, cfg, forms, H) for p in samples]


def transport_fibre(samples, c: complex, d: complex, cfg: FlowConfig = FlowConfig(),
                    forms: FormConfig = DEFAULT_FORM, H: CartanElement | None = None) -> list[OrbitPoint]:
    """Carry points of f^{-1}(c) to f^{-1}(d) along the straight segment [c, d]."""
    trajectories = transport_trajectories(samples, c, d, cfg, forms, H)
    out = []
    for traj in trajectories:
        end = traj[-1]
        if abs(end.f_value - d) >= cfg.max_f_drift:
            raise FlowAborted(f"landed at f = {end.f_value}, not {d}", "f_drift", traj)
        out.append(end.point)
    return out


def fibre_samples(H0: CartanElement, H: CartanElement, value: complex, count: int,
                  seed: int = 0, forms: FormConfig = DEFAULT_FORM,
                  cfg: FlowConfig = FlowConfig()) -> list[OrbitPoint]:
    """Points of the level f_H = value.

    In sl(2) the level is solved in closed form; otherwise random orbit points
    are transported to the requested level.
    """
    rng = np.random.default_rng(seed)
    if H0.n == 2:
        mu, h = H0.diag[0], H.diag[0]
        a = value / (2 * forms.c * h)
        prod = mu * mu - a * a
        out = []
        for _ in range(count):
            b = cmath.exp(complex(rng.uniform(-0.5, 0.5), rng.uniform(0, 2 * math.pi)))
            X = np.array([[a, b], [prod / b, -a]], dtype=complex)
            out.append(OrbitPoint.of(X, H0))
        return out
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count:
            raise FlowAborted("could not reach the requested level from random samples", "epsilon", [])
        p = random_orbit_point(H0, rng)
        try:
            out.extend(transport_fibre([p], height(p.x, H, forms), value, cfg, forms, H))
        except (FlowAborted, SegmentTooCloseError, SingularPointError):
            continue
    return out


# --- Lipschitz diagnostic ------------------------------------------------

@dataclass(frozen=True)
class BracketBoundEstimate:
    M: float
    bound_at: tuple = ()

    def bound(self, x, H: CartanElement) -> float:
        """2M(|ad H| + M|H|) |x| / |[x, H]|^2, Frobenius norms."""
        X = as_element(x, H.n)
        d = H.array
        ad_norm = max(abs(a - b) for a in d for b in d)
        xH = np.linalg.norm(bracket(X, H.matrix))
        return 2 * self.M * (ad_norm + self.M * np.linalg.norm(d)) * np.linalg.norm(X) / xH ** 2


def estimate_bracket_constant(n: int, trials: int = 200, seed: int = 0,
                              points=(), H: CartanElement | None = None) -> BracketBoundEstimate:
    """Sampled sup of |[X, Y]| / (|X| |Y|), plus the dZ bound at requested points.

    Besides random pairs, every (E_ij, E_ji) is tried; those attain sqrt(2),
    the exact supremum for the Frobenius norm.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    pairs = [(elementary(n, i, j), elementary(n, j, i)) for i in range(n) for j in range(n) if i != j]
    pairs += [(random_element(n, rng), random_element(n, rng)) for _ in range(trials)]
    M = 0.0
    for X, Y in pairs:
        M = max(M, np.linalg.norm(bracket(X, Y)) / (np.linalg.norm(X) * np.linalg.norm(Y)))
    est = BracketBoundEstimate(float(M))
    if points:
        if H is None:
            raise InputError("bound evaluation needs H")
        est = BracketBoundEstimate(est.M, tuple(est.bound(p, H) for p in points))
    return est


def z_jacobian_norm(x, H: CartanElement, step: float = 1e-6) -> float:
    """Operator norm of dZ_x (raw field, c = 1) on the realification of sl(n), by central differences."""
    X = as_element(x, H.n)
    n = X.shape[0]
    directions = []
    for B in sl_basis(n):
        B = B / np.linalg.norm(B)
        directions += [B, 1j * B]
    # orthonormalize the real directions so the singular values are operator norms
    Q, _ = np.linalg.qr(np.column_stack([to_real(v) for v in directions]))
    cols = []
    for k in range(Q.shape[1]):
        v = from_real(Q[:, k], n)
        plus = z_field_raw(X + step * v, H)
        minus = z_field_raw(X - step * v, H)
        cols.append(to_real((plus - minus) / (2 * step)))
    J = np.column_stack(cols)
    return float(np.linalg.svd(J, compute_uv=False)[0])


# --- JSON lines ------------------------------------------------------------

def state_record(s: FlowState) -> dict:
    return {
        "t": s.t,
        "theta": s.theta,
        "point": [[float(v.real), float(v.imag)] for v in np.asarray(s.point.x).ravel()],
        "f_value": {"re": s.f_value.real, "im": s.f_value.imag},
        "f_drift": s.f_drift,
        "charpoly_drift": s.charpoly_drift,
    }


def write_jsonl(trajectory, fh, sample: int | None = None) -> None:
    for s in trajectory:
        rec = state_record(s)
        if sample is not None:
            rec = {"sample": sample, **rec}
        fh.write(json.dumps(rec) + "\n")


def read_jsonl(fh) -> list[dict]:
    return [json.loads(line) for line in fh if line.strip()]
