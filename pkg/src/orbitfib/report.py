"""End-to-end analysis of one (H0, H) pair and its JSON report.

Complex numbers are written as ``{"re": ..., "im": ...}`` and matrices as
row-major lists of those.  Infinite values become ``null``.  The report is
plain JSON data, so ``json.loads(dumps_report(r)) == r``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import (
    STRUCT_TOL,
    CartanElement,
    FormConfig,
    is_regular,
    positive_roots,
)
from .errors import DimensionError, InputError
from .fibration import (
    FibrationAnalysis,
    analyze_fibration,
    height,
    is_singular_point,
    random_orbit_point,
)
from .symplectic import (
    OMEGA_TOL,
    kks_degeneracy_witness,
    nplus_basis,
    omega_affine_piece_verdict,
    omega_fibre_verdict,
)
from .transport import FlowConfig
from .weyl import MAX_N, pairing, weyl_orbit
from . import sl2

CHECK_NAMES = ("hessian", "symplectic", "kks", "singular_fibres", "sl2")
KKS_TOL = 1e-9
AFFINE_TOL = 1e-9
REGULAR_SAMPLES = 5
AFFINE_SAMPLES = 20


@dataclass(frozen=True)
class AnalysisRequest:
    n: int
    H0_diag: tuple
    H_diag: tuple
    form_constant: float = 1.0
    seed: int = 0
    flow: FlowConfig = field(default_factory=FlowConfig)
    checks: tuple = CHECK_NAMES

    def __post_init__(self):
        if not isinstance(self.n, int) or not 2 <= self.n <= MAX_N:
            raise InputError(f"n must be an integer in 2..{MAX_N}, got {self.n!r}")
        h0 = tuple(complex(v) for v in self.H0_diag)
        if len(h0) != self.n:
            raise DimensionError(f"H0 has {len(h0)} entries, expected n = {self.n}")
        h = tuple(complex(v) for v in self.H_diag)
        if len(h) != self.n:
            raise DimensionError(f"H has {len(h)} entries, expected n = {self.n}")
        if any(v.imag != 0 for v in h):
            raise InputError("H must have real entries")
        dup = [(i, j) for i in range(self.n) for j in range(i + 1, self.n)
               if abs(h[i] - h[j]) <= STRUCT_TOL]
        if dup:
            i, j = dup[0]
            raise InputError(
                f"H is not regular: entries {i + 1} and {j + 1} coincide "
                f"(the root alpha_{i + 1}{j + 1} vanishes on H)")
        object.__setattr__(self, "H0_diag", h0)
        object.__setattr__(self, "H_diag", tuple(v.real for v in h))
        self.H0, self.H  # trace-zero and finiteness checks
        unknown = set(self.checks) - set(CHECK_NAMES)
        if unknown:
            raise InputError(f"unknown checks: {', '.join(sorted(unknown))}")
        object.__setattr__(self, "checks", tuple(self.checks))
        self.cfg  # validates the form constant

    @property
    def H0(self) -> CartanElement:
        return CartanElement(self.H0_diag)

    @property
    def H(self) -> CartanElement:
        return CartanElement(self.H_diag)

    @property
    def cfg(self) -> FormConfig:
        return FormConfig(float(self.form_constant))


def analyze(req: AnalysisRequest) -> FibrationAnalysis:
    return analyze_fibration(req.H0, req.H, req.cfg)


@dataclass(frozen=True, eq=False)
class SingularFibreReport:
    w_point: CartanElement
    critical_value: complex
    nplus_basis: tuple
    affine_piece_dim: int
    bundle_piece_note: str
    f_constancy_error: float
    conjugation_residual: float

    @property
    def passed(self) -> bool:
        return self.f_constancy_error < AFFINE_TOL and self.conjugation_residual < AFFINE_TOL


def singular_fibre_report(w: CartanElement, req: AnalysisRequest) -> SingularFibreReport:
    """The affine piece w + n+(w) of the singular level through w.

    Checks that f_H is constant on it and that conjugating w by exp(N),
    N in n+(w), stays inside it.
    """
    orbit = weyl_orbit(req.H0)
    if w.n != req.n or all(w.distance(p) >= STRUCT_TOL for p in orbit.points):
        raise InputError(f"{w!r} is not in the Weyl orbit of H0")
    H, cfg = req.H, req.cfg
    roots = tuple(positive_roots(w))
    basis = nplus_basis(w)
    value = pairing(H, w, cfg)
    rng = np.random.default_rng(req.seed)

    def random_nplus():
        coeffs = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        return sum((c * E for c, E in zip(coeffs, basis)), np.zeros((w.n, w.n), dtype=complex))

    mask = sum((np.abs(E) for E in basis), np.zeros((w.n, w.n))) > 0
    f_err = 0.0
    conj_res = 0.0
    for _ in range(AFFINE_SAMPLES):
        X = random_nplus()
        f_err = max(f_err, abs(height(w.matrix + X, H, cfg) - value))
        N = random_nplus()
        D = scipy.linalg.expm(N) @ w.matrix @ scipy.linalg.expm(-N) - w.matrix
        conj_res = max(conj_res, float(np.max(np.abs(D[~mask]), initial=0.0)))
    orbit_dim = req.n * (req.n - 1) - 2 * sum(
        1 for i in range(req.n) for j in range(i + 1, req.n)
        if abs(w.diag[i] - w.diag[j]) <= STRUCT_TOL)
    note = (
        f"singular level of complex dimension {orbit_dim - 1}; away from the "
        f"{orbit.orbit_size} pieces w + n+(w) it is an affine subbundle of real codimension 2 "
        f"over the flag minus its Weyl points (reported structurally, not constructed)"
    )
    return SingularFibreReport(w, value, roots, len(roots), note, f_err, conj_res)


# --- serialization -------------------------------------------------------

def cjson(z) -> dict:
    z = complex(z)
    return {"re": float(z.real), "im": float(z.imag)}


def fjson(v):
    v = float(v)
    return v if math.isfinite(v) else None


def diag_json(H: CartanElement) -> list:
    return [cjson(v) for v in H.diag]


def _request_json(req: AnalysisRequest) -> dict:
    return {
        "n": req.n,
        "H0": [cjson(v) for v in req.H0_diag],
        "H": list(req.H_diag),
        "form_constant": float(req.form_constant),
        "seed": req.seed,
        "flow": {
            "step": req.flow.step,
            "epsilon": req.flow.epsilon,
            "max_f_drift": req.flow.max_f_drift,
            "max_charpoly_drift": req.flow.max_charpoly_drift,
        },
        "checks": list(req.checks),
    }


def _regular_samples(req: AnalysisRequest, count: int) -> list:
    rng = np.random.default_rng(req.seed)
    out = []
    while len(out) < count:
        p = random_orbit_point(req.H0, rng)
        if not is_singular_point(p.x, req.H):
            out.append(p.x)
    return out


def _sl2_section(failures: list) -> dict:
    fibre = sl2.fibre_points(0, [1, 2, 1j, -0.5 + 0.5j])
    ends = [sl2.thimble_point(v, 0.7) for v in (2.0, -2.0)]
    surface_err = max(p.residual for p in fibre + ends)
    thimbles = {str(v): sl2.thimble_lagrangian_check(v) for v in (2, -2)}
    fs = sl2.fs_report()
    for key, verdict in thimbles.items():
        if not verdict.is_lagrangian_numerically:
            failures.append(f"thimble over [0, {key}] not Lagrangian (max |Omega| {verdict.max_abs_omega:.3e})")
    if fs.hom_ranks[(0, 1)] != fs.intersection_count:
        failures.append("Hom(L_0, L_1) rank disagrees with the intersection count")
    return {
        "surface_residual": surface_err,
        "thimble_endpoints": [[cjson(p.x), cjson(p.y), cjson(p.z)] for p in ends],
        "thimble_max_abs_omega": {k: v.max_abs_omega for k, v in thimbles.items()},
        "fs_category": {
            "objects": [[name, deg] for name, deg in fs.objects],
            "hom_ranks": {f"{i},{j}": r for (i, j), r in sorted(fs.hom_ranks.items())},
            "products_nontrivial": list(fs.products_nontrivial),
            "products_provenance": fs.products_provenance,
            "intersection_count": fs.intersection_count,
        },
    }


def _is_sl2_canonical(req: AnalysisRequest) -> bool:
    canon = (1.0, -1.0)
    return req.n == 2 and req.H0_diag == canon and req.H_diag == canon and req.form_constant == 1


def build_report(req: AnalysisRequest) -> dict:
    analysis = analyze(req)
    failures = list(analysis.failures) if "hessian" in req.checks else []
    cfg = req.cfg
    gp = analysis.gp
    k = analysis.k

    report = {
        "request": _request_json(req),
        "orbit": {
            "size": k,
            "stabilizer_size": analysis.orbit.stabilizer_size,
            "points": [diag_json(p) for p in analysis.orbit.points],
        },
        "critical_values": [
            {"point": diag_json(p), "value": cjson(v)} for p, v in gp.critical_values.items()
        ],
        "general_position": {
            "is_general_position": gp.is_general_position,
            "min_pairwise_gap": fjson(gp.min_pairwise_gap),
            "tolerance": gp.tolerance,
            "closest_pair": [diag_json(p) for p in gp.closest_pair] if gp.closest_pair else None,
        },
        "hessians": [
            {
                "singularity": diag_json(h.singularity),
                "min_singular_value": h.min_singular_value,
                "max_singular_value": h.max_singular_value,
                "threshold": h.threshold,
                "nondegenerate": h.nondegenerate,
            }
            for h in analysis.hessians
        ],
    }

    symplectic = {}
    if "symplectic" in req.checks:
        fibre = [omega_fibre_verdict(x, req.H, cfg) for x in _regular_samples(req, REGULAR_SAMPLES)]
        pieces = [omega_affine_piece_verdict(w, req.H, cfg) for w in analysis.orbit.points]
        symplectic = {
            "tolerance": OMEGA_TOL,
            "fibre_min_singular_values": [v.gram_min_sv for v in fibre],
            "affine_piece_min_singular_values": [fjson(v.gram_min_sv) for v in pieces],
        }
        failures += [f"Omega degenerate on a fibre tangent space (min sv {v.gram_min_sv:.3e})"
                     for v in fibre if not v.nondegenerate]
        failures += [f"Omega degenerate on n+ at {v.point!r}"
                     for v in pieces if v.subspace_dim and not v.nondegenerate]
    if "singular_fibres" in req.checks:
        sf = [singular_fibre_report(w, req) for w in analysis.orbit.points]
        symplectic["singular_fibres"] = [
            {
                "w_point": diag_json(r.w_point),
                "critical_value": cjson(r.critical_value),
                "nplus_basis": [root.label for root in r.nplus_basis],
                "affine_piece_dim": r.affine_piece_dim,
                "f_constancy_error": r.f_constancy_error,
                "conjugation_residual": r.conjugation_residual,
                "bundle_piece_note": r.bundle_piece_note,
            }
            for r in sf
        ]
        failures += [f"affine piece check failed at {r.w_point!r}" for r in sf if not r.passed]
    report["symplectic"] = symplectic

    kks = None
    if "kks" in req.checks:
        values = [kks_degeneracy_witness(x, req.H, cfg) for x in _regular_samples(req, REGULAR_SAMPLES)]
        kks = {"max": max(values), "tolerance": KKS_TOL, "points": len(values)}
        if kks["max"] >= KKS_TOL:
            failures.append(f"KKS witness {kks['max']:.3e} is not at rounding level")
    report["kks_witness"] = kks

    verified = req.n == 2 and is_regular(req.H0)
    report["betti"] = {
        "predicted_middle_betti": {"regular": analysis.betti_regular, "singular": analysis.betti_singular},
        "k": k,
        "status": "verified" if verified else "predicted, unverified",
        "note": (
            "regular level is C minus a point (b_1 = 1); singular level is two lines meeting "
            "in a point (contractible)" if verified else "k - 1 and k - 2 with k the number of singularities"
        ),
    }
    if _is_sl2_canonical(req) and "sl2" in req.checks:
        report["sl2"] = _sl2_section(failures)
    report["failures"] = failures
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def loads_report(text: str) -> dict:
    return json.loads(text)
