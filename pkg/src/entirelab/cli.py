"""Command-line front end.

Every subcommand resolves its parameters from three layers (flags win
over --config FILE, which wins over built-in defaults), runs one
library call, and writes artifacts whose bytes depend only on the
resolved parameters.  Artifacts written to --out get a JSON sidecar at
out + ".json" recording the merged configuration; without --out the
artifact body goes to stdout.

Exit codes: 0 success, 2 usage error (unknown map, missing or malformed
parameters), 1 computational error, reported as one JSON line on
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import acceptance, branches, catalog, dynamics, instability, metrics, render
from .errors import EntireLabError

# flags whose values may begin with a minus sign; argparse would read
# "-3,9,-13,13" as an option, so flag and value are joined with "="
_SIGNED_VALUE_FLAGS = ("--viewport", "--s", "--basepoint", "--im-range")


def _join_signed_values(argv):
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _SIGNED_VALUE_FLAGS and i + 1 < len(argv):
            out.append(tok + "=" + argv[i + 1])
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


# ---- value coercion -------------------------------------------------


def _c_str(v):
    return str(v)


def _c_int(v):
    return int(str(v), 10) if isinstance(v, str) else int(v)


def _c_float(v):
    return float(v)


def _c_complex(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    parts = str(v).split(",")
    if len(parts) != 2:
        raise ValueError(f"expected RE,IM, got {v!r}")
    return complex(float(parts[0]), float(parts[1]))


def _c_floats(v):
    if isinstance(v, (list, tuple)):
        vals = tuple(float(x) for x in v)
    else:
        vals = tuple(float(p) for p in str(v).split(","))
    if not vals:
        raise ValueError("expected at least one number")
    return vals


def _c_viewport(v):
    vals = _c_floats(v)
    if len(vals) != 4:
        raise ValueError(f"viewport needs X0,X1,Y0,Y1, got {v!r}")
    x0, x1, y0, y1 = vals
    return complex(x0, y0), complex(x1, y1)


def _c_size(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return int(v[0]), int(v[1])
    parts = str(v).lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"size needs WIDTHxHEIGHT, got {v!r}")
    return int(parts[0], 10), int(parts[1], 10)


def _c_map(v):
    return catalog.parse_map_id(str(v))


_CLASSIFIERS = {
    "escape-right": render.Classifier.ESCAPE_RIGHT,
    "fixed-point-basins": render.Classifier.FIXED_POINT_BASINS,
    "drift-compensated-basins": render.Classifier.DRIFT_COMPENSATED_BASINS,
}


def _c_classifier(v):
    key = str(v)
    if key not in _CLASSIFIERS:
        raise ValueError(f"unknown classifier {key!r}; choose from "
                         + ", ".join(sorted(_CLASSIFIERS)))
    return _CLASSIFIERS[key]


def _c_region(v):
    name, _, arg = str(v).partition(":")
    if name == "unit-disc":
        return metrics.unit_disc()
    if name == "right-half-plane":
        return metrics.right_half_plane(float(arg) if arg else 0.0)
    if name == "exterior":
        if not arg:
            raise ValueError("exterior region needs a radius: exterior:R")
        return metrics.exterior_of_radius(float(arg))
    raise ValueError(f"unknown region {v!r}; choose unit-disc, "
                     "right-half-plane[:OFFSET] or exterior:R")


# ---- parameter resolution -------------------------------------------


class _Field:
    __slots__ = ("name", "coerce", "default", "help")

    def __init__(self, name, coerce, default, help):
        self.name = name
        self.coerce = coerce
        self.default = default  # None means the flag is required
        self.help = help


_FIELDS = {
    "render": (
        _Field("map", _c_map, None, "map identifier, e.g. f2 or lambda-exp:0.25,0"),
        _Field("classifier", _c_classifier, "", "pixel classifier (default follows the map)"),
        _Field("viewport", _c_viewport, "-3,9,-13,13", "window X0,X1,Y0,Y1"),
        _Field("size", _c_size, "800x800", "raster size WIDTHxHEIGHT"),
        _Field("budget", _c_int, "500", "iteration budget per pixel"),
        _Field("threads", _c_int, "1", "worker cap; never changes output bytes"),
        _Field("format", _c_str, "", "pgm or png (default from --out suffix)"),
        _Field("out", _c_str, None, "output image path"),
    ),
    "eta-scan": (
        _Field("map", _c_map, None, "map identifier"),
        _Field("thresholds", _c_floats, "1e2,1e4,1e8", "image-modulus thresholds R"),
        _Field("out", _c_str, "", "CSV path (stdout when omitted)"),
    ),
    "spherical-scan": (
        _Field("map", _c_map, None, "map identifier"),
        _Field("threshold", _c_float, "1e6", "image-modulus threshold R"),
        _Field("out", _c_str, "", "CSV path (stdout when omitted)"),
    ),
    "poly-scan": (
        _Field("map", _c_map, None, "map identifier"),
        _Field("s", _c_complex, "0,0", "asymptotic value RE,IM"),
        _Field("u-radius", _c_float, "0.1", "radius of the disc around s"),
        _Field("tau", _c_float, "4", "polynomial weight exponent"),
        _Field("out", _c_str, "", "CSV path (stdout when omitted)"),
    ),
    "eta-omega": (
        _Field("map", _c_map, None, "map identifier"),
        _Field("omega", _c_region, None,
               "domain: unit-disc, right-half-plane[:OFFSET] or exterior:R"),
        _Field("thresholds", _c_floats, "1e2,1e4,1e8", "image-modulus thresholds R"),
        _Field("out", _c_str, "", "CSV path (stdout when omitted)"),
    ),
    "certify": (
        _Field("map", _c_map, None, "map identifier"),
        _Field("radii", _c_floats, "0.5,1,2", "candidate absorbing-disc radii"),
        _Field("out", _c_str, "", "JSON path (stdout when omitted)"),
    ),
    "trace-branch": (
        _Field("map", _c_map, None, "map identifier"),
        _Field("basepoint", _c_complex, "0,0", "branch basepoint RE,IM"),
        _Field("max-radius", _c_float, "10", "stop growing the disc here"),
        _Field("out", _c_str, "", "JSON path (stdout when omitted)"),
        _Field("curve-out", _c_str, "", "also trace the asymptotic curve to this CSV"),
        _Field("target-modulus", _c_float, "1e6", "|z| at which the curve trace stops"),
    ),
    "tracts": (
        _Field("map", _c_map, None, "map identifier"),
        _Field("s", _c_complex, "0,0", "singular value the disc is tangent to"),
        _Field("u-radius", _c_float, "0.1", "radius of the disc around s"),
        _Field("count", _c_int, "8", "number of tracts"),
        _Field("x", _c_floats, "1e2,1e3", "radii at which to measure angles"),
        _Field("out", _c_str, "", "CSV path (stdout when omitted)"),
    ),
    "instability": (
        _Field("p", _c_int, "1", "catalog index of the scaled family"),
        _Field("n", _c_int, None, "critical point index to push through the cycle"),
        _Field("delta", _c_float, "0.01", "search disc radius around 1"),
        _Field("min-steps", _c_int, "256", "minimum contour subdivisions"),
        _Field("out", _c_str, "", "JSON path (stdout when omitted)"),
    ),
    "zeros-f1": (
        _Field("im-range", _c_floats, None, "imaginary range LO,HI to search"),
        _Field("per-strip", _c_int, "8", "Newton seeds per horizontal strip"),
        _Field("out", _c_str, "", "CSV path (stdout when omitted)"),
    ),
    "report": (
        _Field("outdir", _c_str, ".", "directory for the summary CSV"),
    ),
}


def _resolve(command, args):
    """Merge flags over --config over defaults, coercing each field."""
    overrides = {}
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
        if not isinstance(overrides, dict):
            raise ValueError("--config must hold a JSON object")
    values = {}
    for field in _FIELDS[command]:
        raw = getattr(args, field.name.replace("-", "_"))
        if raw is None:
            raw = overrides.get(field.name, field.default)
        if raw is None:
            raise ValueError(f"--{field.name} is required")
        values[field.name] = field.coerce(raw) if raw != "" else None
    return values


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, catalog.EntireMap):
        return v.map_id()
    if isinstance(v, render.Classifier):
        return v.value
    if isinstance(v, metrics.Region):
        return v.kind.value
    if isinstance(v, tuple):
        out = []
        for x in v:
            j = _jsonable(x)
            out.extend(j) if isinstance(j, list) else out.append(j)
        return out
    return v


def _emit(text, values, command):
    """Write the artifact plus its sidecar, or stream it to stdout."""
    out = values.get("out")
    if not out:
        sys.stdout.write(text)
        return
    with open(out, "w") as fh:
        fh.write(text)
    doc = {"subcommand": command}
    doc.update({k: _jsonable(v) for k, v in values.items() if v is not None})
    with open(out + ".json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(out)


# ---- subcommand handlers --------------------------------------------


def _default_classifier(m):
    if m.kind is catalog.MapKind.F3_HERMAN:
        return render.Classifier.DRIFT_COMPENSATED_BASINS
    if m.kind in (catalog.MapKind.F1_FATOU, catalog.MapKind.F2_NEWTON,
                  catalog.MapKind.SCALED_F):
        return render.Classifier.FIXED_POINT_BASINS
    return render.Classifier.ESCAPE_RIGHT


def _cmd_render(v):
    m = v["map"]
    classifier = v["classifier"] or _default_classifier(m)
    width, height = v["size"]
    cfg = render.RasterConfig(map=m, classifier=classifier,
                              viewport=v["viewport"],
                              width=width, height=height, budget=v["budget"])
    img = render.render_raster(cfg, workers=max(1, v["threads"]))
    fmt = v["format"] or ("png" if v["out"].lower().endswith(".png") else "pgm")
    render.write_image(img, v["out"], fmt)
    print(v["out"])
    return 0


def _cmd_eta_scan(v):
    rep = metrics.eta_scan(v["map"], v["thresholds"])
    _emit(rep.to_csv(), v, "eta-scan")
    return 0


def _cmd_spherical_scan(v):
    rep = metrics.spherical_expansion_scan(v["map"], v["threshold"])
    _emit(rep.to_csv(), v, "spherical-scan")
    return 0


def _cmd_poly_scan(v):
    rep = metrics.poly_decay_scan(v["map"], v["s"], v["u-radius"], v["tau"])
    _emit(rep.to_csv(), v, "poly-scan")
    return 0


def _cmd_eta_omega(v):
    rep = metrics.eta_omega_scan(v["map"], v["omega"], v["thresholds"])
    _emit(rep.to_csv(), v, "eta-omega")
    return 0


def _cmd_certify(v):
    cert = dynamics.certify_hyperbolic(v["map"], v["radii"])
    _emit(cert.to_json() + "\n", v, "certify")
    return 0


def _cmd_trace_branch(v):
    state = branches.continue_branch(v["map"], v["basepoint"],
                                     max_radius=v["max-radius"])
    obs = state.obstruction
    doc = {
        "map": state.map.map_id(),
        "basepoint": _jsonable(state.basepoint),
        "center": _jsonable(state.center),
        "radius": state.radius,
        "obstruction": None if obs is None else {
            "kind": obs.kind.value,
            "s": _jsonable(obs.s),
            "limit": None if obs.limit is None else _jsonable(obs.limit),
        },
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", v, "trace-branch")
    if v["curve-out"]:
        if obs is None or obs.kind is not branches.ObstructionKind.ASYMPTOTIC:
            raise ValueError("no asymptotic obstruction; nothing to trace")
        curve = branches.trace_asymptotic_curve(state, v["target-modulus"])
        curve_values = dict(v, out=v["curve-out"])
        _emit(curve.to_csv(), curve_values, "trace-branch")
    return 0


def _cmd_tracts(v):
    found = branches.discs_of_univalence(v["map"], v["s"], v["u-radius"],
                                         v["count"])
    sep = branches.boundary_separation(found) if len(found) > 1 else 0.0
    lines = ["tract,x,theta"]
    for i, tract in enumerate(found):
        for x in v["x"]:
            theta = branches.tract_angular_measure(tract, x)
            lines.append(f"{i},{x!r},{theta!r}")
    text = "\n".join(lines) + "\n"
    if v.get("out"):
        v = dict(v, separation=sep)
    _emit(text, v, "tracts")
    if v.get("out"):
        print(f"boundary separation {sep!r}")
    return 0


def _cmd_instability(v):
    res = instability.find_instability_parameter(
        v["p"], v["n"], v["delta"], min_steps=v["min-steps"])
    _emit(res.to_json() + "\n", v, "instability")
    return 0


def _cmd_zeros_f1(v):
    lo_hi = v["im-range"]
    if len(lo_hi) != 2:
        raise ValueError(f"--im-range needs LO,HI, got {lo_hi!r}")
    roots = instability.zeros_of_f1((lo_hi[0], lo_hi[1]),
                                    per_strip=v["per-strip"])
    lines = ["re,im"] + [f"{z.real!r},{z.imag!r}" for z in roots]
    _emit("\n".join(lines) + "\n", v, "zeros-f1")
    return 0


def _cmd_report(v):
    records = acceptance.reproduce_all(v["outdir"])
    for r in records:
        print(f"criterion {r.index:2d}: {'PASS' if r.passed else 'FAIL'}  "
              f"{r.title}")
    passed = sum(r.passed for r in records)
    print(f"{passed}/{len(records)} criteria passed; summary at "
          f"{os.path.join(v['outdir'], acceptance.SUMMARY_NAME)}")
    return 0 if passed == len(records) else 1


_HANDLERS = {
    "render": _cmd_render,
    "eta-scan": _cmd_eta_scan,
    "spherical-scan": _cmd_spherical_scan,
    "poly-scan": _cmd_poly_scan,
    "eta-omega": _cmd_eta_omega,
    "certify": _cmd_certify,
    "trace-branch": _cmd_trace_branch,
    "tracts": _cmd_tracts,
    "instability": _cmd_instability,
    "zeros-f1": _cmd_zeros_f1,
    "report": _cmd_report,
}

_SUMMARIES = {
    "render": "rasterize basin or escape classes to PGM/PNG",
    "eta-scan": "infimum of |z f'(z)/f(z)| over |f(z)| > R",
    "spherical-scan": "infimum of the spherical expansion factor over |f(z)| > R",
    "poly-scan": "decay of (1+|z|^tau)|f'(z)| along an asymptotic curve",
    "eta-omega": "eta scan restricted to a hyperbolic domain",
    "certify": "certify an absorbing disc for the singular orbits",
    "trace-branch": "grow a maximal disc of univalence and classify the obstruction",
    "tracts": "tract geometry over a disc tangent to a singular value",
    "instability": "locate a parameter where a critical orbit lands on a repeller",
    "zeros-f1": "zeros of the first catalog map in a horizontal band",
    "report": "run the self-check suite and write its summary CSV",
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="entirelab",
        description="numerical laboratory for a catalog of entire maps")
    subs = parser.add_subparsers(dest="command", required=True,
                                 metavar="SUBCOMMAND")
    for command, fields in _FIELDS.items():
        sub = subs.add_parser(command, help=_SUMMARIES[command],
                              description=_SUMMARIES[command])
        sub.add_argument("--config", default=None, metavar="FILE",
                         help="JSON object with defaults; flags win")
        for field in fields:
            default = ("required"
                       if field.default is None else repr(field.default))
            sub.add_argument(f"--{field.name}", default=None,
                             help=f"{field.help} [{default}]")
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = _build_parser()
    args = parser.parse_args(_join_signed_values(argv))
    try:
        values = _resolve(args.command, args)
        return _HANDLERS[args.command](values)
    except ValueError as exc:
        print(json.dumps({"error": "Usage", "message": str(exc)}),
              file=sys.stderr)
        return 2
    except EntireLabError as exc:
        print(json.dumps(exc.payload()), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "IOError", "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
