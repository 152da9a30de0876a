"""Invariant suites behind ``orbitfib verify``.

Each suite yields ``(name, value, op, threshold)`` tuples; ``op`` is ``"<"``
for residuals, ``">"`` for certificates that must stay away from zero and
``"=="`` for exact counts.  A tolerance override replaces the threshold of
the residual checks only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import (
    CartanElement,
    bracket,
    cartan,
    hermitian_form,
    killing_via_ad,
    omega,
    random_element,
    tau,
    trace_form,
)
from .errors import InputError
from .fibration import (
    differential,
    hessian_certificate,
    is_singular_point,
    random_orbit_point,
)
from .symplectic import (
    kks_degeneracy_witness,
    lagrangian_verdict_flag,
    lagrangian_verdict_thimble_sphere,
    omega_affine_piece_verdict,
    omega_fibre_verdict,
)
from .transport import fibre_samples, transport_fibre, z_field, z_field_raw
from .weyl import all_permutations, suggest_general_position, weyl_orbit
from . import sl2


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    value: float
    op: str
    threshold: float

    @property
    def passed(self) -> bool:
        if self.op == "<":
            return self.value < self.threshold
        if self.op == ">":
            return self.value > self.threshold
        return self.value == self.threshold

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}/{self.name}: {self.value:.3e} {self.op} {self.threshold:.3e}"


def _regular_points(H0, H, count, rng):
    out = []
    while len(out) < count:
        p = random_orbit_point(H0, rng)
        if not is_singular_point(p.x, H):
            out.append(p.x)
    return out


def _random_pair(n, rng):
    d = rng.standard_normal(n)
    H0 = CartanElement(tuple(d - d.mean()))
    H = suggest_general_position(H0, seed=int(rng.integers(2**31)))
    return H0, H


def suite_forms(rng):
    worst_killing = worst_invariance = worst_herm = worst_omega = 0.0
    for n in (2, 3, 4):
        for _ in range(5):
            X, Y, Z = (random_element(n, rng) for _ in range(3))
            worst_killing = max(worst_killing, abs(killing_via_ad(X, Y) - 2 * n * trace_form(X, Y)))
            worst_invariance = max(worst_invariance,
                                   abs(trace_form(bracket(X, Y), Z) - trace_form(X, bracket(Y, Z))))
            worst_herm = max(worst_herm, abs(hermitian_form(X, Y) - np.conj(hermitian_form(Y, X))),
                             abs(hermitian_form(X, Y) + trace_form(X, tau(Y))))
            worst_omega = max(worst_omega, abs(omega(X, Y) + omega(Y, X)))
    yield "killing = 2n trace", worst_killing, "<", 1e-10
    yield "ad-invariance", worst_invariance, "<", 1e-10
    yield "hermitian symmetry", worst_herm, "<", 1e-12
    yield "omega antisymmetry", worst_omega, "<", 1e-12


def suite_weyl(rng):
    for diag, label in (((1, -1), "sl2 regular"), ((1, 0, -1), "sl3 regular"), ((1, 1, -2), "sl3 (1,1,-2)")):
        H0 = cartan(*diag)
        rec = weyl_orbit(H0)
        brute = len({w(H0).diag for w in all_permutations(H0.n)})
        yield f"orbit size {label}", rec.orbit_size, "==", brute
        yield f"|W| / |W_H0| {label}", math.factorial(H0.n) // rec.stabilizer_size, "==", rec.orbit_size


def suite_hessian(rng):
    worst = math.inf
    for k in range(20):
        H0, H = _random_pair(2 + k % 2, rng)
        for p in weyl_orbit(H0).points:
            worst = min(worst, hessian_certificate(p, H).min_singular_value)
    yield "min singular value, random pairs", worst, ">", 1e-8
    H0 = cartan(1, -1)
    yield "sl2 canonical min sv - 4", abs(hessian_certificate(H0, H0).min_singular_value - 4), "<", 1e-9


def suite_transversality(rng):
    worst = 0.0
    for n in (2, 3):
        H0, H = _random_pair(n, rng)
        for x in _regular_points(H0, H, 20, rng):
            worst = max(worst, abs(differential(x, z_field(x, H), H) - 1))
    yield "|df(Z) - 1|", worst, "<", 1e-10
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    H = cartan(1, -1)
    yield "raw field df = -1", abs(differential(x, z_field_raw(x, H), H) + 1), "<", 1e-12


def suite_transport(rng):
    H0 = H = cartan(1, -1)
    samples = fibre_samples(H0, H, 0, 3, seed=int(rng.integers(2**31)))
    ends = transport_fibre(samples, 0, 1, H=H)
    yield "|f - 1| after 0 -> 1", max(abs(trace_form(H.matrix, p.x) - 1) for p in ends), "<", 1e-6
    yield "charpoly drift", max(p.charpoly_drift for p in ends), "<", 1e-6


def suite_symplectic(rng):
    worst_fibre = worst_piece = math.inf
    for n in (2, 3):
        H0, H = _random_pair(n, rng)
        for x in _regular_points(H0, H, 10, rng):
            worst_fibre = min(worst_fibre, omega_fibre_verdict(x, H).gram_min_sv)
        for w in weyl_orbit(H0).points:
            worst_piece = min(worst_piece, omega_affine_piece_verdict(w, H).gram_min_sv)
    yield "Omega on fibre tangents", worst_fibre, ">", 1e-10
    yield "Omega on n+ pieces", worst_piece, ">", 1e-10


def suite_kks(rng):
    worst = 0.0
    for n in (2, 3):
        H0, H = _random_pair(n, rng)
        for x in _regular_points(H0, H, 10, rng):
            worst = max(worst, kks_degeneracy_witness(x, H))
    yield "KKS witness", worst, "<", 1e-9


def suite_lagrangian(rng):
    seed = int(rng.integers(2**31))
    for diag in ((1, -1), (1, 0, -1)):
        v = lagrangian_verdict_flag(cartan(*diag), samples=20, seed=seed)
        yield f"flag {diag} max |Omega|", v.max_abs_omega, "<", 1e-10
        yield f"flag {diag} dim - half orbit dim", v.submanifold_dim - v.ambient_dim // 2, "==", 0
    v = lagrangian_verdict_thimble_sphere(samples=20, seed=seed)
    yield "sl2 sphere max |Omega|", v.max_abs_omega, "<", 1e-10


def suite_sl2(rng):
    bs = np.exp(rng.standard_normal(10) + 1j * rng.uniform(0, 2 * math.pi, 10))
    pts = sl2.fibre_points(0.3 - 0.2j, bs)
    pts += [sl2.thimble_point(lam, t) for lam in np.linspace(-2, 2, 9) for t in np.linspace(0, 6, 7)]
    yield "surface residual", max(p.residual for p in pts), "<", 1e-10
    end = sl2.thimble_point(2.0, 1.3)
    yield "thimble endpoint at lambda = 2", abs(end.x - 1) + abs(end.y) + abs(end.z), "<", 1e-15
    membership = [
        sl2.singular_fibre_membership(sl2.SurfacePoint(1, 5, 0), 2) == (True, "n+"),
        sl2.singular_fibre_membership(sl2.SurfacePoint(1, 0, 5), 2) == (True, "n-"),
        sl2.singular_fibre_membership(sl2.SurfacePoint(1, 1, 1), 2)[0] is False,
    ]
    yield "singular membership cases", sum(membership), "==", len(membership)
    for which in (2, -2):
        yield f"thimble {which} max |Omega|", sl2.thimble_lagrangian_check(which).max_abs_omega, "<", 1e-8
    fs = sl2.fs_report()
    yield "Hom(L_0, L_1) - intersections", fs.hom_ranks[(0, 1)] - sl2.vanishing_cycle_intersections(2), "==", 0


SUITES = {
    "forms": suite_forms,
    "weyl": suite_weyl,
    "hessian": suite_hessian,
    "transversality": suite_transversality,
    "transport": suite_transport,
    "symplectic": suite_symplectic,
    "kks": suite_kks,
    "lagrangian": suite_lagrangian,
    "sl2": suite_sl2,
}


def run_suites(names=None, seed: int = 0, tol: float | None = None) -> list[CheckResult]:
    names = list(SUITES) if not names else list(names)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise InputError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    if tol is not None and not tol > 0:
        raise InputError("tolerance must be positive")
    out = []
    for name in names:
        rng = np.random.default_rng([seed, list(SUITES).index(name)])
        for check, value, op, threshold in SUITES[name](rng):
            if op == "<" and tol is not None:
                threshold = tol
            out.append(CheckResult(name, check, float(value), op, float(threshold)))
    return out
