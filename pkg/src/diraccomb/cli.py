"""Command-line interface: ``diraccomb {bc,bands,spectral-fn,isospec}``.

Every command writes one document (JSON by default, CSV with ``--format csv``).
Exit codes: 0 success, 1 invariance violated, 2 usage error, 3 precondition failure.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .bands import RootFindOptions, compute_bands, gaps, spectrum_intervals
from .boundary import (
    ANGLE_FAMILIES,
    FAMILY_ARITY,
    BoundaryCondition,
    NamedFamily,
    cayley,
    confinement_class,
    identify_families,
    jump_average_matrix,
    kurasov_forward,
    kurasov_inverse,
    make_boundary,
    named,
    transfer_matrix,
    unitary_matrix,
)
from .exceptions import NoCayleyFormError, NonBijectiveShiftError, SingularRepresentationError
from .isospectral import (
    HEARABILITY_CAVEAT,
    DisplacementProfile,
    check_spectral_invariance,
    hearability,
    hearability_explanation,
    mirror_transform,
    oblique_orbit,
    oblique_transform,
)
from .spectral import g_function, spectral_reduced

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --- argument parsing ----------------------------------------------------------


def _add_spec(p: argparse.ArgumentParser, prefix: str = "") -> None:
    dash = f"--{prefix}" if prefix else "--"
    label = "second " if prefix else ""
    g = p.add_argument_group(f"{label}boundary condition")
    g.add_argument(f"{dash}eta", type=float, help="phase eta (with --m)")
    g.add_argument(f"{dash}m", type=float, nargs=4, metavar=("M0", "M1", "M2", "M3"))
    g.add_argument(f"{dash}g", type=float, nargs=4, metavar=("G1", "G2", "G3", "G4"), help="Kurasov couplings")
    g.add_argument(f"{dash}named", choices=sorted(FAMILY_ARITY), help="named family")
    g.add_argument(f"{dash}param", type=float, help="first family parameter")
    g.add_argument(f"{dash}param2", type=float, help="second family parameter (robin)")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--reproducible", action="store_true", help="omit the timestamp")
    p.add_argument("--out", help="write to this path instead of stdout")
    p.add_argument("--deg", action="store_true", help="angles are given in degrees")


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nk", type=int, default=201, help="number of quasimomenta")
    p.add_argument("--qmax", type=float, default=6 * math.pi, help="upper wavenumber")
    p.add_argument("--frakqmax", type=float, default=12.0, help="lower (imaginary) wavenumber")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diraccomb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bc", help="all representations of a boundary condition")
    _add_spec(p)
    _add_output(p)

    p = sub.add_parser("bands", help="band structure, spectrum intervals and gaps")
    _add_spec(p)
    _add_grid(p)
    p.add_argument("--tol", type=float, default=1e-12, help="relative root tolerance in eps")
    p.add_argument("--scan-step", type=float, default=math.pi / 400)
    _add_output(p)

    p = sub.add_parser("spectral-fn", help="sample the reduced spectral function F(eps) at fixed k")
    _add_spec(p)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--eps-min", type=float, required=True)
    p.add_argument("--eps-max", type=float, required=True)
    p.add_argument("--samples", type=int, default=1001)
    _add_output(p)

    iso = sub.add_parser("isospec", help="isospectral transformations")
    isosub = iso.add_subparsers(dest="mode", required=True)

    p = isosub.add_parser(
        "verify",
        help="compare F(bc2, k) with F(bc, k + shift)",
        description=(
            "The second condition is given with --other-* flags, or as the image of the "
            "first under --oblique DELTA or --mirror. With --oblique and no explicit shift, "
            "the matching shift -DELTA is used."
        ),
    )
    _add_spec(p)
    _add_spec(p, "other-")
    t = p.add_mutually_exclusive_group()
    t.add_argument("--oblique", type=float, metavar="DELTA")
    t.add_argument("--mirror", action="store_true")
    s = p.add_mutually_exclusive_group()
    s.add_argument("--shift", type=float, help="constant displacement")
    s.add_argument("--shift-samples", type=float, nargs="+", help="displacement on a uniform k-grid")
    _add_grid(p)
    p.add_argument("--epssamples", type=int, default=201)
    p.add_argument("--tol", type=float, default=1e-12, help="deviation tolerance")
    _add_output(p)

    p = isosub.add_parser("orbit", help="oblique orbit with per-member deviation")
    _add_spec(p)
    p.add_argument("--count", type=int, default=8)
    _add_grid(p)
    p.add_argument("--epssamples", type=int, default=201)
    p.add_argument("--tol", type=float, default=1e-12)
    _add_output(p)

    p = isosub.add_parser("classify", help="spectral uniqueness verdict", epilog=HEARABILITY_CAVEAT)
    _add_spec(p)
    _add_output(p)
    return parser


def _angle(x: float | None, deg: bool) -> float | None:
    return None if x is None else (math.radians(x) if deg else x)


def parse_spec(ns: argparse.Namespace, prefix: str = "", required: bool = True) -> BoundaryCondition | None:
    key = prefix.replace("-", "_")
    get = lambda name: getattr(ns, key + name, None)  # noqa: E731
    eta, m, g, fam = get("eta"), get("m"), get("g"), get("named")
    given = [x is not None for x in ((eta if eta is not None else m), g, fam)]
    if sum(given) == 0:
        if required:
            raise UsageError("give exactly one of --eta/--m, --g or --named")
        return None
    if sum(given) > 1:
        raise UsageError("boundary condition given in more than one form")
    try:
        if fam is not None:
            params = [p for p in (get("param"), get("param2")) if p is not None]
            if fam in ANGLE_FAMILIES:
                params = [_angle(p, ns.deg) for p in params]
            return named(NamedFamily(fam, tuple(params)))
        if g is not None:
            return kurasov_inverse(g)
        if eta is None or m is None:
            raise UsageError("--eta and --m must be given together")
        return make_boundary(_angle(eta, ns.deg), m)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# --- serialization -------------------------------------------------------------


def _num(x: float) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _cmatrix(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _bc_json(bc: BoundaryCondition) -> dict:
    return {"eta": bc.eta, "m": list(bc.m)}


def _document(command: str, argv: Sequence[str], bc: BoundaryCondition, payload: dict, reproducible: bool) -> dict:
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "command": {"name": command, "argv": list(argv)},
        "bc": _bc_json(bc),
        "payload": payload,
    }
    if not reproducible:
        doc["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return doc


def _fmt(x: Any) -> str:
    if isinstance(x, bool) or not isinstance(x, (float, np.floating)):
        return str(x)
    return "%.17g" % x


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _flatten(prefix: str, value: Any):
    if isinstance(value, dict):
        for k, v in value.items():
            yield from _flatten(f"{prefix}.{k}" if prefix else k, v)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            yield from _flatten(f"{prefix}[{i}]", v)
    else:
        yield prefix, value


# --- commands ----------------------------------------------------------------


def cmd_bc(bc: BoundaryCondition) -> tuple[dict, str]:
    g = kurasov_forward(bc)
    payload: dict[str, Any] = {
        "eta": bc.eta,
        "m": list(bc.m),
        "U": _cmatrix(unitary_matrix(bc)),
        "couplings": "at infinity" if g.at_infinity else list(g.g),
    }
    if not g.at_infinity:
        payload["jump_average_matrix"] = _cmatrix(jump_average_matrix(g))
        try:
            payload["transfer_matrix"] = _cmatrix(transfer_matrix(g))
        except SingularRepresentationError:
            payload["transfer_matrix"] = "undefined"
    else:
        payload["transfer_matrix"] = "undefined"
    try:
        payload["cayley"] = _cmatrix(cayley(bc))
    except NoCayleyFormError:
        payload["cayley"] = "undefined"
    payload["confinement"] = confinement_class(bc).value
    payload["named_equivalents"] = [{"family": f.tag, "params": list(f.params)} for f in identify_families(bc)]
    csv_text = _csv(("key", "value"), _flatten("", payload))
    return payload, csv_text


def cmd_bands(bc: BoundaryCondition, opts: RootFindOptions) -> tuple[dict, str]:
    bs = compute_bands(bc, opts)
    payload = {
        "k": bs.k_grid.tolist(),
        "bands": [[_num(x) for x in row] for row in bs.bands],
        "intervals": [[lo, hi] for lo, hi in spectrum_intervals(bs)],
        "gaps": [[gp.lo, gp.hi] for gp in gaps(bs)],
        "gap_widths": [gp.width for gp in gaps(bs)],
        "options": {
            "n_k": opts.n_k,
            "q_max": opts.q_max,
            "frakq_max": opts.frakq_max,
            "scan_step": opts.scan_step,
            "tol_eps": opts.tol_eps,
        },
        "metadata": bs.metadata,
    }
    rows = (
        (j, bs.k_grid[j], n, bs.bands[n, j])
        for j in range(bs.k_grid.size)
        for n in range(bs.n_bands)
        if math.isfinite(bs.bands[n, j])
    )
    return payload, _csv(("k_index", "k", "band", "eps"), rows)


def cmd_spectral_fn(bc: BoundaryCondition, k: float, lo: float, hi: float, samples: int) -> tuple[dict, str]:
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise UsageError("need finite --eps-min < --eps-max")
    if samples < 2:
        raise UsageError("--samples must be at least 2")
    eps = np.linspace(lo, hi, samples)
    F = np.asarray(spectral_reduced(bc, k, eps))
    flips = np.nonzero(np.sign(F[:-1]) * np.sign(F[1:]) < 0)[0]
    payload = {
        "k": k,
        "eps": eps.tolist(),
        "F": [_num(x) for x in F],
        "sign_changes": [[float(eps[j]), float(eps[j + 1])] for j in flips],
        "zeros_on_grid": [float(e) for e in eps[F == 0]],
        "G0": float(g_function(bc.eta, bc.m0, 0.0)),
    }
    return payload, _csv(("eps", "F"), zip(eps, F))


def _report_payload(report, tol: float) -> dict:
    out = report.to_dict()
    out["tolerance"] = tol
    out["holds"] = report.holds(tol)
    return out


def cmd_verify(bc, bc2, shift, k_samples, eps_samples, q_max, frakq_max, tol) -> tuple[dict, str, int]:
    report = check_spectral_invariance(bc, bc2, shift, k_samples, eps_samples, q_max, frakq_max)
    payload = {"other_bc": _bc_json(bc2), "report": _report_payload(report, tol)}
    code = EXIT_OK if report.holds(tol) else EXIT_NEGATIVE
    return payload, _csv(("key", "value"), _flatten("", payload)), code


def cmd_orbit(bc, count, k_samples, eps_samples, q_max, frakq_max, tol) -> tuple[dict, str, int]:
    if count < 1:
        raise UsageError("--count must be at least 1")
    members, rows = [], []
    worst = 0.0
    for j, member in enumerate(oblique_orbit(bc, count)):
        delta = 2 * math.pi * j / count
        rep = check_spectral_invariance(
            bc, member, DisplacementProfile.constant(-delta), k_samples, eps_samples, q_max, frakq_max
        )
        worst = max(worst, rep.max_abs_deviation)
        members.append({"delta": delta, "bc": _bc_json(member), "deviation": rep.max_abs_deviation})
        rows.append((j, delta, member.eta, *member.m, rep.max_abs_deviation))
    payload = {"count": count, "members": members, "max_deviation": worst, "tolerance": tol}
    text = _csv(("j", "delta", "eta", "m0", "m1", "m2", "m3", "deviation"), rows)
    return payload, text, EXIT_OK if worst <= tol else EXIT_NEGATIVE


def cmd_classify(bc: BoundaryCondition) -> tuple[dict, str]:
    verdict = hearability(bc)
    payload = {
        "verdict": verdict.value,
        "confinement": confinement_class(bc).value,
        "explanation": hearability_explanation(verdict),
        "caveat": HEARABILITY_CAVEAT,
    }
    return payload, _csv(("key", "value"), payload.items())


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    code = EXIT_OK
    bc = parse_spec(ns)
    name = ns.command
    if name == "bc":
        payload, text = cmd_bc(bc)
    elif name == "bands":
        try:
            opts = RootFindOptions(ns.nk, ns.qmax, ns.frakqmax, ns.scan_step, ns.tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        payload, text = cmd_bands(bc, opts)
    elif name == "spectral-fn":
        payload, text = cmd_spectral_fn(bc, _angle(ns.k, ns.deg), ns.eps_min, ns.eps_max, ns.samples)
    else:
        name = f"isospec {ns.mode}"
        if ns.mode == "classify":
            payload, text = cmd_classify(bc)
        else:
            if ns.nk < 1 or ns.epssamples < 1:
                raise UsageError("grid sizes must be positive")
            if ns.mode == "orbit":
                payload, text, code = cmd_orbit(bc, ns.count, ns.nk, ns.epssamples, ns.qmax, ns.frakqmax, ns.tol)
            else:
                other = parse_spec(ns, "other-", required=False)
                if sum(x is not None and x is not False for x in (other, ns.oblique, ns.mirror or None)) != 1:
                    raise UsageError("give exactly one of --other-*, --oblique or --mirror")
                oblique = _angle(ns.oblique, ns.deg)
                if oblique is not None:
                    other = oblique_transform(bc, oblique)
                elif ns.mirror:
                    other = mirror_transform(bc)
                if ns.shift_samples is not None:
                    shift = DisplacementProfile.sampled([_angle(x, ns.deg) for x in ns.shift_samples])
                elif ns.shift is not None:
                    shift = DisplacementProfile.constant(_angle(ns.shift, ns.deg))
                else:
                    shift = DisplacementProfile.constant(-oblique if oblique is not None else 0.0)
                payload, text, code = cmd_verify(
                    bc, other, shift, ns.nk, ns.epssamples, ns.qmax, ns.frakqmax, ns.tol
                )
    if ns.format == "json":
        doc = _document(name, argv, bc, payload, ns.reproducible)
        text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    _emit(text, ns.out)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return run(argv)
    except SystemExit as exc:  # argparse: --help is 0, bad usage is 2
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"diraccomb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonBijectiveShiftError as exc:
        print(f"diraccomb: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
