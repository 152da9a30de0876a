"""Weyl group of sl(n, C) acting on diagonals by permutation."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_FORM, CartanElement, FormConfig, InputError, is_regular
from .errors import DimensionError, GeneralPositionError

MAX_N = 8
DEDUP_TOL = 1e-10
GAP_TOL = 1e-3


@dataclass(frozen=True)
class Permutation:
    """w acts on a diagonal by ``(w.d)[k] = d[mapping[k]]``."""

    mapping: tuple

    def __post_init__(self):
        m = tuple(int(k) for k in self.mapping)
        if sorted(m) != list(range(len(m))):
            raise InputError(f"{m} is not a permutation of 0..{len(m) - 1}")
        object.__setattr__(self, "mapping", m)

    def __call__(self, H: CartanElement) -> CartanElement:
        if H.n != len(self.mapping):
            raise DimensionError("permutation and diagonal sizes differ")
        return H.permuted(self.mapping)

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other."""
        return Permutation(tuple(other.mapping[k] for k in self.mapping))


def all_permutations(n: int):
    for p in itertools.permutations(range(n)):
        yield Permutation(p)


@dataclass(frozen=True)
class WeylOrbitRecord:
    base: CartanElement
    points: tuple
    orbit_size: int
    stabilizer_size: int

    @property
    def n(self) -> int:
        return self.base.n


def weyl_orbit(H0: CartanElement, dedup_tol: float = DEDUP_TOL) -> WeylOrbitRecord:
    """All distinct permutations of ``H0``'s diagonal, in lexicographic permutation order."""
    n = H0.n
    if n > MAX_N:
        raise InputError(f"n = {n} exceeds the exhaustive enumeration cap of {MAX_N}")
    points: list[CartanElement] = []
    stabilizer = 0
    for w in all_permutations(n):
        p = w(H0)
        if p.distance(H0) < dedup_tol:
            stabilizer += 1
        if all(p.distance(q) >= dedup_tol for q in points):
            points.append(p)
    return WeylOrbitRecord(H0, tuple(points), len(points), stabilizer)


def pairing(H: CartanElement, x: CartanElement, cfg: FormConfig = DEFAULT_FORM) -> complex:
    """<H, x> = c * sum_i H_i x_i for diagonal elements."""
    return complex(cfg.c * np.dot(H.array, x.array))


@dataclass(frozen=True)
class GeneralPositionReport:
    critical_values: dict
    is_general_position: bool
    min_pairwise_gap: float
    tolerance: float
    closest_pair: tuple | None = None


def critical_values(
    H: CartanElement,
    orbit: WeylOrbitRecord,
    cfg: FormConfig = DEFAULT_FORM,
    tol: float = GAP_TOL,
) -> GeneralPositionReport:
    if H.n != orbit.n:
        raise DimensionError("H and H0 live in different sl(n)")
    values = {p: pairing(H, p, cfg) for p in orbit.points}
    gap = math.inf
    closest = None
    pts = list(values)
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            d = abs(values[pts[a]] - values[pts[b]])
            if d < gap:
                gap, closest = d, (pts[a], pts[b])
    return GeneralPositionReport(values, gap > tol, gap, tol, closest)


def suggest_general_position(
    H0: CartanElement,
    seed: int = 0,
    min_gap: float = GAP_TOL,
    max_attempts: int = 1000,
) -> CartanElement:
    """Random real regular H whose critical values over W.H0 are min_gap-separated."""
    rng = np.random.default_rng(seed)
    orbit = weyl_orbit(H0)
    for _ in range(max_attempts):
        d = rng.standard_normal(H0.n)
        d -= d.mean()
        H = CartanElement(tuple(d))
        if not is_regular(H, min_gap):
            continue
        if critical_values(H, orbit, tol=min_gap).is_general_position:
            return H
    raise GeneralPositionError(
        f"no general-position H found for H0 = {H0!r} after {max_attempts} attempts"
    )
