"""Command line front end: ``pvmodels check|decompose|geometry SPEC``.

Exit codes: 0 pass, 1 the property fails, 2 the two commutativity criteria
disagree, 64 malformed spec, 65 expression domain error inside the chart box.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from importlib import metadata

import numpy as np
import yaml

from . import expr as ex
from . import geometry as geo
from .errors import DomainError, NotDecomposable, PVModelsError
from .linalg import admissible_signatures, make_space
from .model import Model0, tensor_from_components
from .pv import (
    CROSS_TOL,
    PV_TOL,
    SAMPLED_TOL,
    Einstein,
    PseudoEinstein,
    check_commuting_on_grassmannian,
    classify_block,
    decompose_pv,
    is_puffini_videv,
)

EXIT_OK, EXIT_FAIL, EXIT_DISAGREE, EXIT_PARSE, EXIT_DOMAIN = 0, 1, 2, 64, 65


class SpecError(Exception):
    pass


def tool_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _load(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        data = yaml.safe_load(raw.decode("utf-8"))
    except (yaml.YAMLError, UnicodeDecodeError) as exc:
        raise SpecError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise SpecError("spec file must contain a mapping at top level")
    return data, digest


def _matrix(value, m, what):
    a = np.array(value, dtype=float)
    if a.shape == (m * m,):
        a = a.reshape(m, m)
    if a.shape != (m, m):
        raise SpecError(f"{what} must be {m}x{m}, got shape {a.shape}")
    return a


def load_model_spec(data):
    """Build a model from a parsed model spec mapping; indices in the file are 1-based."""
    try:
        m = int(data["dimension"])
        p, q = (int(v) for v in data["signature"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"model spec needs 'dimension' and 'signature: [p, q]': {exc}") from exc
    if p + q != m:
        raise SpecError(f"signature [{p}, {q}] does not match dimension {m}")
    gram = data.get("gram")
    try:
        if gram is not None:
            gram = _matrix(gram, m, "gram")
        space = make_space(p, q, gram)
        gens = []
        for entry in data.get("curvature") or []:
            idx = [int(i) - 1 for i in entry["indices"]]
            if len(idx) != 4:
                raise SpecError(f"curvature indices must have 4 entries: {entry}")
            gens.append((*idx, float(entry["value"])))
        tensor = tensor_from_components(m, gens)
    except SpecError:
        raise
    except (PVModelsError, KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"invalid model spec: {exc}") from exc
    tolerances = data.get("tolerances") or {}
    return Model0(space, tensor), {k: float(v) for k, v in tolerances.items()}


def _bound(v):
    if isinstance(v, str):
        v = v.strip().lower()
        if v in ("inf", "+inf", "infinity", ".inf"):
            return math.inf
        if v in ("-inf", "-infinity", "-.inf"):
            return -math.inf
    return float(v)


def load_chart_spec(data):
    """Build ``(chart, family, parameters)`` from a parsed chart spec mapping."""
    family = data.get("family")
    params = data.get("parameters") or {}
    try:
        if family == "thm14":
            alpha = ex.parse(str(params["alpha"]), 2)
            chart = geo.chart_thm14(alpha, float(params.get("t_min", 0.0)))
            params = {**params, "alpha": alpha}
        elif family == "thm15":
            chart = geo.chart_thm15(float(params["beta"]))
        elif family == "custom":
            comps = data["components"]
            n = len(comps)
            domain = data.get("domain") or [[-math.inf, math.inf]] * n
            chart = geo.chart_from_strings(comps, [(_bound(lo), _bound(hi)) for lo, hi in domain], data.get("label", "custom"))
        else:
            raise SpecError(f"unknown chart family {family!r}; expected thm14, thm15 or custom")
    except SpecError:
        raise
    except (PVModelsError, KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"invalid chart spec: {exc}") from exc
    if family != "custom" and data.get("domain"):
        raise SpecError("domain is fixed for thm14/thm15 charts")
    return chart, family, params


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return {"re": float(v.real), "im": float(v.imag)} if v.imag else float(v.real)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    return v


def _classification(cls):
    if isinstance(cls, Einstein):
        return {"type": "Einstein", "value": _num(cls.value)}
    if isinstance(cls, PseudoEinstein):
        return {"type": "PseudoEinstein", "value": _num(cls.value), "eigenvalues": [_num(e) for e in cls.eigenvalues]}
    return {"type": "Neither", "witness": [_num(e) for e in cls.witness]}


def _report_base(command, path, digest, tolerances):
    return {
        "command": command,
        "input": str(path),
        "input_digest": digest,
        "tool_version": tool_version(),
        "tolerances": tolerances,
    }


def run_check(model, tolerances, samples, seed):
    tol_det = tolerances.get("pv", PV_TOL)
    tol_smp = tolerances.get("sampled", SAMPLED_TOL)
    det = is_puffini_videv(model, tol_det)
    report = {
        "deterministic": {
            "criterion": 3,
            "verdict": det.verdict,
            "max_commutator_norm": det.max_commutator_norm,
            "tolerance": tol_det,
            "witness_pair": [i + 1 for i in det.witness] if det.witness else None,
        },
        "sampled": [],
    }
    verdicts = [det.verdict]
    for sig in admissible_signatures(model.space):
        r = check_commuting_on_grassmannian(model, sig, samples, seed, tol_smp)
        verdicts.append(r.verdict)
        report["sampled"].append(
            {
                "criterion": 1,
                "signature": list(sig),
                "verdict": r.verdict,
                "max_commutator_norm": r.max_commutator_norm,
                "tolerance": tol_smp,
                "n_samples": r.n_samples,
                "witness_plane": r.witness.tolist() if r.witness is not None else None,
                "note": r.note,
            }
        )
    if all(verdicts):
        code = EXIT_OK
    elif not any(verdicts):
        code = EXIT_FAIL
    else:
        code = EXIT_DISAGREE
    report["puffini_videv"] = {EXIT_OK: True, EXIT_FAIL: False}.get(code)
    return report, code


def _decomposition_dict(dec):
    return {
        "blocks": [
            {
                "dimension": b.dim,
                "signature": list(b.subspace.signature),
                "eigenvalue": _num(b.eigenvalue),
                "classification": _classification(b.classification),
                "basis": b.subspace.basis.tolist(),
            }
            for b in dec.blocks
        ],
        "cross_term_max": dec.cross_term_max,
        "cross_term_tolerance": dec.tolerance,
        "orthogonality_max": dec.orthogonality_max,
    }


def run_decompose(model, tolerances):
    tol = tolerances.get("cross", CROSS_TOL)
    try:
        dec = decompose_pv(model, tol)
    except NotDecomposable as err:
        report = {
            "decomposable": False,
            "message": str(err),
            "witness_indices": [i + 1 for i in err.witness],
            "witness_value": err.value,
            "cross_term_max": err.cross_term_max,
            "cross_term_tolerance": err.decomposition.tolerance,
            "puffini_videv": err.pv_verdict,
            "split": _decomposition_dict(err.decomposition),
        }
        return report, EXIT_FAIL
    report = {"decomposable": True, **_decomposition_dict(dec)}
    return report, EXIT_OK


def sample_points(chart, n, rng):
    """Points drawn inside the chart box; infinite sides are clipped to a window."""
    pts = np.empty((n, chart.dim))
    for k, (lo, hi) in enumerate(chart.domain):
        if math.isfinite(lo) and math.isfinite(hi):
            w = hi - lo
            pts[:, k] = rng.uniform(lo + 0.05 * w, hi - 0.05 * w, n)
        elif math.isfinite(lo):
            pts[:, k] = lo + rng.uniform(0.2, 3.0, n)
        elif math.isfinite(hi):
            pts[:, k] = hi - rng.uniform(0.2, 3.0, n)
        else:
            pts[:, k] = rng.uniform(-2.0, 2.0, n)
    return pts


def _item(name, passed, **values):
    return {"name": name, "pass": bool(passed), **{k: _num(v) for k, v in values.items()}}


def _pointwise_items(chart, pts, pv_tol):
    worst_pv, einstein_fail = 0.0, True
    for x in pts:
        m = geo.riemann_model_at(chart, x)
        worst_pv = max(worst_pv, is_puffini_videv(m, pv_tol).max_commutator_norm)
        cls = classify_block(m)
        if isinstance(cls, (Einstein, PseudoEinstein)):
            einstein_fail = False
    return [
        _item("puffini_videv_at_points", worst_pv < pv_tol, max_commutator_norm=worst_pv, tolerance=pv_tol, points=len(pts)),
        _item("not_einstein_at_points", einstein_fail, points=len(pts)),
    ]


def battery_thm14(chart, alpha, n_points, seed, step, t_end, pv_tol=1e-7):
    rng = np.random.default_rng(seed)
    pts = sample_points(chart, n_points, rng)
    items = []
    max_r = max(np.abs(geo.riemann_model_at(chart, x).A).max() for x in pts)
    taus_n = [geo.fiber_scalar_curvature(alpha, x[1:]) for x in pts]
    flat = max_r < 1e-6
    items.append(_item("max_abs_curvature", True, value=max_r, flat=flat))
    items.extend(_pointwise_items(chart, pts, pv_tol)[:1])
    if flat:
        items.append(
            _item(
                "degenerate_family",
                True,
                note="curvature vanishes: fiber scalar curvature equals 2 (cone over the unit sphere)",
                fiber_scalar_curvature=float(np.mean(taus_n)),
            )
        )
        return items, None
    items.extend(_pointwise_items(chart, pts, pv_tol)[1:])
    # t^2 tau constant along t at a fixed surface point
    p0 = pts[0, 1:]
    ts = [0.1, 0.5, 1.0, 2.0]
    scaled = [t * t * geo.scalar_curvature_at(chart, np.r_[t, p0]) for t in ts]
    spread = (max(scaled) - min(scaled)) / max(abs(np.mean(scaled)), 1e-300)
    items.append(_item("t2_tau_constant", spread < 1e-5, relative_spread=spread))
    # one global sign s with tau_M = s t^-2 (tau_N - 2)
    taus_m = np.array([geo.scalar_curvature_at(chart, x) for x in pts])
    pred = np.array([(tn - 2.0) / x[0] ** 2 for tn, x in zip(taus_n, pts)])
    errs = {s: float(np.max(np.abs(taus_m - s * pred) * pts[:, 0] ** 2)) for s in (1, -1)}
    sign = min(errs, key=errs.get)
    items.append(_item("scalar_relation", errs[sign] < 1e-6, sign=sign, max_error_times_t2=errs[sign]))
    trace = geo.geodesic(chart, np.r_[1.0, p0], np.r_[-1.0, 0.0, 0.0], t_end, step)
    fit = geo.blowup_exponent(trace, coordinate=0)
    drift = float(np.max(np.abs(trace.energies - trace.energies[0])))
    items.append(_item("blowup_exponent", abs(fit.exponent + 2.0) < 0.05, exponent=fit.exponent, residual=fit.residual, expected=-2.0))
    items.append(_item("geodesic_energy_drift", drift < 1e-6 * max(trace.times[-1], 1.0), drift=drift))
    items.append(_item("fiber_coordinates_fixed", np.max(np.abs(trace.points[:, 1:] - p0)) < 1e-8, drift=float(np.max(np.abs(trace.points[:, 1:] - p0)))))
    return items, trace


def battery_thm15(chart, beta, n_points, seed, step, t_end, pv_tol=1e-7):
    rng = np.random.default_rng(seed)
    pts = sample_points(chart, n_points, rng)
    items = []
    tau0 = geo.scalar_curvature_at(chart, np.array([1.0, 1.0, 0.0, 0.0]))
    expected = 1.0 / (1.0 + beta)
    items.append(_item("tau_at_1100", abs(abs(tau0) - expected) < 1e-6, computed=tau0, expected_abs=expected))
    worst = 0.0
    for x in pts:
        a = geo.riemann_model_at(chart, x).A
        mask = np.ones(a.shape, dtype=bool)
        for idx in [(2, 3, 3, 2), (3, 2, 2, 3), (2, 3, 2, 3), (3, 2, 3, 2)]:
            mask[idx] = False
        worst = max(worst, float(np.abs(a[mask]).max() / np.abs(a).max()))
    items.append(_item("only_R3443_nonzero", worst < 1e-8, worst_relative_other=worst))
    items.extend(_pointwise_items(chart, pts, pv_tol))
    ks = [geo.beta_invariant(beta, x) for x in pts]
    spread = (max(ks) - min(ks)) / abs(np.mean(ks))
    items.append(_item("beta_invariant_constant", spread < 1e-6, value=float(np.mean(ks)), relative_spread=spread))
    trace = geo.geodesic(chart, np.array([1.0, 1.0, 0.0, 0.0]), np.array([-1.0, 0.0, 0.0, 0.0]), t_end, step)
    fit = geo.blowup_exponent(trace, coordinate=0)
    items.append(_item("blowup_exponent", abs(fit.exponent + 1.0) < 0.05, exponent=fit.exponent, residual=fit.residual, expected=-1.0))
    drift = float(np.max(np.abs(trace.energies - trace.energies[0])))
    items.append(_item("geodesic_energy_drift", drift < 1e-6 * max(trace.times[-1], 1.0), drift=drift))
    return items, trace


def battery_custom(chart, n_points, seed, pv_tol=1e-7):
    rng = np.random.default_rng(seed)
    pts = sample_points(chart, n_points, rng)
    taus = [geo.scalar_curvature_at(chart, x) for x in pts]
    worst_pv = 0.0
    for x in pts:
        worst_pv = max(worst_pv, is_puffini_videv(geo.riemann_model_at(chart, x), pv_tol).max_commutator_norm)
    return [
        _item("scalar_curvature_range", True, min=min(taus), max=max(taus)),
        _item("puffini_videv_at_points", worst_pv < pv_tol, max_commutator_norm=worst_pv, tolerance=pv_tol),
    ]


def run_geometry(chart, family, params, points, seed, step, t_end):
    trace = None
    if family == "thm14":
        items, trace = battery_thm14(chart, params["alpha"], points, seed, step, t_end)
    elif family == "thm15":
        items, trace = battery_thm15(chart, float(params["beta"]), points, seed, step, t_end)
    else:
        items = battery_custom(chart, points, seed)
    report = {"family": family, "chart": chart.label, "items": items, "all_pass": all(i["pass"] for i in items)}
    return report, (EXIT_OK if report["all_pass"] else EXIT_FAIL), trace


def _write(report, out):
    text = json.dumps(report, indent=2, sort_keys=True, default=_num) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="pvmodels", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("spec", help="model or chart spec (YAML or JSON)")
        p.add_argument("--tol", type=float, default=None, help="override the governing tolerance")
        p.add_argument("--samples", type=int, default=50, help="samples per admissible signature / sample points")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="report path (default: stdout)")

    common(sub.add_parser("check", help="decide the Puffini-Videv property"))
    common(sub.add_parser("decompose", help="split into Ricci eigenspace blocks"))
    g = sub.add_parser("geometry", help="run the example-manifold verification battery")
    common(g)
    g.add_argument("--step", type=float, default=1e-3, help="geodesic step")
    g.add_argument("--t-end", type=float, default=0.99, help="geodesic parameter length")
    g.add_argument("--trace", default=None, help="write the geodesic trace table here")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    report = None
    try:
        data, digest = _load(args.spec)
        if args.command in ("check", "decompose"):
            model, tolerances = load_model_spec(data)
            if args.tol is not None:
                tolerances[{"check": "pv", "decompose": "cross"}[args.command]] = args.tol
            report = _report_base(args.command, args.spec, digest, tolerances)
            if args.command == "check":
                body, code = run_check(model, tolerances, args.samples, args.seed)
                body["flags"] = {"samples": args.samples, "seed": args.seed}
            else:
                body, code = run_decompose(model, tolerances)
            report.update(body)
        else:
            chart, family, params = load_chart_spec(data)
            report = _report_base("geometry", args.spec, digest, {"pv": 1e-7})
            points = args.samples if args.samples != 50 else 20
            body, code, trace = run_geometry(chart, family, params, points, args.seed, args.step, args.t_end)
            body["flags"] = {"points": points, "seed": args.seed, "step": args.step, "t_end": args.t_end}
            report.update(body)
            if args.trace and trace is not None:
                with open(args.trace, "w", encoding="utf-8") as fh:
                    fh.write(trace.to_table())
    except (SpecError, OSError) as exc:
        print(f"pvmodels: {exc}", file=sys.stderr)
        if args.out:
            _write({"command": args.command, "input": args.spec, "error": str(exc), "exit_code": EXIT_PARSE, "tool_version": tool_version()}, args.out)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"pvmodels: domain error: {exc}", file=sys.stderr)
        if args.out:
            _write({"command": args.command, "input": args.spec, "error": str(exc), "exit_code": EXIT_DOMAIN, "tool_version": tool_version()}, args.out)
        return EXIT_DOMAIN
    report["exit_code"] = code
    _write(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
