"""Aggregate analysis of one (A, c, z) instance into a serializable record.

The pipeline runs polytope -> admissibility -> critical points ->
basis (thimbles, or 1d sector cycles when 0 is not interior) ->
periods -> asymptotics, short-circuiting to a partial report whenever a
hypothesis fails; sub-module errors become structured entries, never
crashes. Every numeric entry carries its error estimate, and the exact
layer (facet table, beta orders) is integer/rational and reproduced
bit-exactly on re-runs with the same seed.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__ as _pkg_version
from . import kernels
from .admissibility import admissibility, as_parameter
from .asymptotics import dominance_order, leading_term, stokes_lines
from .critical import count_certificate, solve_critical
from .errors import AhyperError, ResonantBranch, SolveIncomplete
from .lattice import LatticePolytope, PointConfiguration, build_delta, normalized_volume, origin_interior, pyramid_identity
from .laurent import from_config
from .quadrature import period_vector
from .thimbles import cycle_basis_1d, sectors_1d, thimble_basis

SCHEMA_VERSION = 1


def _cx(v):
    v = complex(v)
    return [v.real, v.imag]


def _frac(q: Fraction):
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def beta_orders(P: LatticePolytope, c):
    """Exact divisor orders beta_i = <kappa_i, c - 1> per facet."""
    cpar = as_parameter(c)
    out = []
    for f in P.facets:
        if cpar.is_exact:
            re = sum(Fraction(k) * (e[0] - 1) for k, e in zip(f.kappa, cpar.exact))
            im = sum(Fraction(k) * e[1] for k, e in zip(f.kappa, cpar.exact))
            out.append({"kappa": list(f.kappa), "beta": [_frac(re), _frac(im)],
                        "exact": True})
        else:
            val = sum(k * (cc - 1) for k, cc in zip(f.kappa, cpar.components))
            out.append({"kappa": list(f.kappa), "beta": [val.real, val.imag],
                        "exact": False})
    return out


@dataclass
class AnalysisOptions:
    seed: int = 20240
    tol_quad: float = 1e-9
    tol_morse: float = 1e-10
    lambda_ladder: tuple = ()
    sector_delta: float = 0.3
    sphere_count: int = 64
    threads: int = 1
    force: bool = False

    @classmethod
    def from_dict(cls, d):
        d = dict(d or {})
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        if "lambda_ladder" in known:
            known["lambda_ladder"] = tuple(float(x) for x in known["lambda_ladder"])
        return cls(**known)


@dataclass
class AnalysisReport:
    data: dict = field(default_factory=dict)

    @property
    def status(self):
        return self.data.get("status", "error")

    def to_json(self, indent=2):
        return json.dumps(self.data, indent=indent)


def _polytope_summary(P, c):
    betas = beta_orders(P, c)
    ok, table = pyramid_identity(P)
    facets = []
    for f, b in zip(P.facets, betas):
        facets.append({
            "kappa": list(f.kappa),
            "offset": f.offset,
            "pole_order_m": f.pole_order,
            "face_volume_v": f.face_volume,
            "supporting_face": list(f.supporting_face),
            "contains_origin": f.contains_origin,
            "beta": b["beta"],
        })
    return {
        "vertices": [list(v) for v in P.vertices],
        "normalized_volume": normalized_volume(P),
        "origin_interior": origin_interior(P),
        "pyramid_identity": {"holds": ok, "sum": table["sum"]},
        "facets": facets,
    }


def _critical_summary(points, cert):
    rows = []
    for p in points:
        rows.append({
            "location": [_cx(x) for x in p.coords],
            "log_branch": [_cx(l) for l in p.location.log_branch],
            "value": _cx(p.value),
            "hessian_det": _cx(p.hessian_det),
            "morse": p.morse,
            "residual": p.residual,
        })
    return {
        "points": rows,
        "certificate": {"found": cert.found, "expected": cert.expected,
                        "status": cert.status},
    }


def analyze(config, c, z, options: AnalysisOptions = None) -> AnalysisReport:
    """Run the full pipeline with structured partial failure."""
    opts = options or AnalysisOptions()
    if not isinstance(config, PointConfiguration):
        config = PointConfiguration(len(config[0]), tuple(tuple(p) for p in config))
    cpar = as_parameter(c)
    z = [complex(v) for v in z]
    avail, active = kernels.backends()
    data = {
        "schema_version": SCHEMA_VERSION,
        "configuration": {
            "n": config.n,
            "A": [list(p) for p in config.points],
            "c": [[_frac(e[0]), _frac(e[1])] if e is not None else _cx(comp)
                  for e, comp in zip(cpar.exact, cpar.components)],
            "z": [_cx(v) for v in z],
        },
        "provenance": {
            "package": f"ahyper {_pkg_version}",
            "kernel_backend": active,
            "backends_available": avail,
            "seed": opts.seed,
            "tolerances": {"quad": opts.tol_quad, "morse": opts.tol_morse,
                           "sector_delta": opts.sector_delta},
            "sphere_count": opts.sphere_count,
        },
        "stages": {},
    }
    report = AnalysisReport(data)
    stages = data["stages"]

    P = build_delta(config)
    data["polytope"] = _polytope_summary(P, cpar)
    stages["polytope"] = "ok"

    verdict = admissibility(config, cpar, z, P)
    data["admissibility"] = {
        "nonresonant": verdict.nonresonant,
        "nondegenerate": verdict.nondegenerate.ok,
        "in_omega_zero": verdict.in_omega_zero,
        "confidence": verdict.confidence,
        "face_evidence": [{"kind": e.kind, "ok": e.ok, "confidence": e.confidence,
                           "detail": e.detail}
                          for e in verdict.nondegenerate.evidence],
    }
    stages["admissibility"] = "ok"
    if not verdict.nonresonant:
        # the basis routes carry their own hypotheses (the two-sided 1d case
        # refuses integer c itself; thimbles presuppose an interior origin,
        # which already forces nonresonance); a resonant parameter therefore
        # only demotes the report, with the caveat that the integral
        # representation need not span the full solution space
        stages["nonresonance"] = "resonant parameter: spanning not certified"

    h = from_config(config, z)
    try:
        points = solve_critical(h, seed=opts.seed)
        cert = count_certificate(points, P)
    except SolveIncomplete as exc:
        points = exc.points
        cert = exc.certificate
        stages["critical"] = f"incomplete: {exc}"
    else:
        stages["critical"] = "ok"
    data["critical_points"] = _critical_summary(points, cert)

    route = None
    basis = None
    if origin_interior(P) and cert.complete and config.n <= 2:
        try:
            basis = thimble_basis(h, cpar, points, sphere_count=opts.sphere_count)
            route = "thimble"
            data["basis"] = {
                "route": route,
                "count": len(basis),
                "flow_phases": [t.flow_phase for t in basis],
            }
            stages["basis"] = "ok"
        except AhyperError as exc:
            stages["basis"] = f"failed: {exc}"
    elif config.n == 1:
        try:
            basis = cycle_basis_1d(h, cpar)
            route = "cycle-1d"
            sec = {}
            for divisor in ("at-zero", "at-infinity"):
                try:
                    sec[divisor] = [[s.theta_lo, s.theta_hi]
                                    for s in sectors_1d(h, divisor)]
                except AhyperError:
                    sec[divisor] = []
            data["basis"] = {
                "route": route,
                "count": len(basis),
                "labels": [cyc.label for cyc in basis],
                "sectors": sec,
            }
            stages["basis"] = "ok"
        except ResonantBranch as exc:
            stages["basis"] = f"skipped: {exc}"
        except AhyperError as exc:
            stages["basis"] = f"failed: {exc}"
    else:
        stages["basis"] = "skipped: hypothesis (origin not interior, n > 1)"

    if basis is not None:
        vals = period_vector(h, cpar, basis, reltol=opts.tol_quad)
        data["periods"] = [{"value": _cx(v.value), "error_estimate": v.error_estimate,
                            "evaluations": v.evaluations} for v in vals]
        stages["periods"] = "ok"
    else:
        stages["periods"] = "skipped"

    lines, skipped = stokes_lines(points)
    data["stokes"] = {
        "lines": [{"pair": list(l.pair), "angles": list(l.angles),
                   "value_gap": _cx(l.value_gap)} for l in lines],
        "skipped_pairs": [list(p) for p in skipped],
    }
    stages["stokes"] = "ok"

    if route == "thimble":
        terms = []
        for i, p in enumerate(points):
            t = leading_term(h, cpar, p, index=i)
            terms.append({
                "saddle": i,
                "prefactor": _cx(t.prefactor),
                "rate": _cx(t.rate),
                "power": t.power,
                "sqrt_branch": t.sqrt_branch,
            })
        data["asymptotics"] = {"terms": terms}
        stages["asymptotics"] = "ok"
        if opts.lambda_ladder:
            from .asymptotics import asymptotic_ratio

            ladders = []
            for i, p in enumerate(points):
                t = leading_term(h, cpar, p, index=i)
                pairs = asymptotic_ratio(h, cpar, p, t, opts.lambda_ladder,
                                         force=opts.force,
                                         sector_delta=opts.sector_delta)
                ladders.append([{"lambda": _cx(l), "ratio": _cx(r)}
                                for l, r in pairs])
            data["asymptotics"]["ratio_ladders"] = ladders
    else:
        stages["asymptotics"] = "skipped: no thimble route"

    full = all(v == "ok" for v in stages.values())
    data["status"] = "full" if full else "partial"
    return report
