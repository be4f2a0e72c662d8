"""Command line interface.

Reads a JSON operator description, runs the requested pipeline, prints a
short summary, and optionally writes CSV / SVG / certificate artifacts.

Exit codes: 0 success (including informational gaps), 2 validation or
parse failure, 3 a convergence or scan budget ran out, 4 internally
inconsistent results.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .blockop import (
    BUILTIN_TAILS,
    BlockOperatorSpec,
    BuiltinTail,
    PeriodicTail,
    VanishingTail,
)
from .convex2d import PointCloud
from .errors import (
    BlockRangeError,
    DegenerateGeometry,
    HorizonTooSmall,
    InconsistentResult,
    NoConvergence,
    NonConvergence,
    ParseError,
    ScanExhausted,
    ValidationError,
)
from .essrange import (
    EssentialRangeResult,
    diagonal_essential_range,
    essential_numerical_range,
    translate_spec,
)
from .linalg import ComplexMatrix
from .numrange import numerical_range
from .oracle import inner_approximate
from .regroup import (
    choose_translation,
    identity_decomposition,
    regroup,
    verify_conv_free,
)
from .svgplot import Scene

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_INCONSISTENT = 4


# -- spec (de)serialisation --------------------------------------------


def _complex_from_pair(obj, where: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj)
    ):
        raise ValidationError(f"{where}: expected a [re, im] pair, got {obj!r}")
    return complex(obj[0], obj[1])


def _matrix_from_json(obj, where: str) -> ComplexMatrix:
    if not isinstance(obj, list) or not obj:
        raise ValidationError(f"{where}: expected a non-empty list of rows")
    n = len(obj)
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(
                f"{where}[{i}]: expected a row of {n} entries, got {row!r}"
            )
        rows.append([_complex_from_pair(e, f"{where}[{i}][{k}]") for k, e in enumerate(row)])
    try:
        return ComplexMatrix(np.array(rows, dtype=np.complex128))
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _matrix_to_json(m: ComplexMatrix) -> list:
    return [
        [[float(e.real), float(e.imag)] for e in row]
        for row in np.asarray(m.entries)
    ]


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise ValidationError(f"{where}: unknown keys {sorted(extra)}")
    missing = required - set(obj)
    if missing:
        raise ValidationError(f"{where}: missing keys {sorted(missing)}")


def parse_spec_dict(doc) -> BlockOperatorSpec:
    if not isinstance(doc, dict):
        raise ValidationError("operator document must be a JSON object")
    _require_keys(doc, {"prefix", "tail", "shift"}, {"tail"}, "document")
    prefix = tuple(
        _matrix_from_json(m, f"prefix[{i}]") for i, m in enumerate(doc.get("prefix", []))
    )
    tail_doc = doc["tail"]
    if not isinstance(tail_doc, dict) or "kind" not in tail_doc:
        raise ValidationError("tail: expected an object with a 'kind' key")
    kind = tail_doc["kind"]
    if kind == "periodic":
        _require_keys(tail_doc, {"kind", "cycle"}, {"cycle"}, "tail")
        cycle = tail_doc["cycle"]
        if not isinstance(cycle, list) or not cycle:
            raise ValidationError("tail.cycle: expected a non-empty list of matrices")
        tail = PeriodicTail(
            tuple(_matrix_from_json(m, f"tail.cycle[{i}]") for i, m in enumerate(cycle))
        )
    elif kind == "vanishing":
        _require_keys(tail_doc, {"kind", "limits", "decay", "seed"}, {"limits"}, "tail")
        limits = tail_doc["limits"]
        if not isinstance(limits, list) or not limits:
            raise ValidationError("tail.limits: expected a non-empty list of matrices")
        lims = tuple(
            _matrix_from_json(m, f"tail.limits[{i}]") for i, m in enumerate(limits)
        )
        c, p = 0.0, 1.0
        decay = tail_doc.get("decay")
        if decay is not None:
            _require_keys(decay, {"type", "c", "p"}, {"type", "c", "p"}, "tail.decay")
            if decay["type"] != "power":
                raise ValidationError(
                    f"tail.decay.type: only 'power' is supported, got {decay['type']!r}"
                )
            c, p = float(decay["c"]), float(decay["p"])
        seed = tail_doc.get("seed", 0)
        if not isinstance(seed, int):
            raise ValidationError("tail.seed: expected an integer")
        try:
            tail = VanishingTail(lims, c, p, seed)
        except ValidationError:
            raise
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"tail: {exc}") from exc
    elif kind == "builtin":
        _require_keys(tail_doc, {"kind", "name"}, {"name"}, "tail")
        tail = BuiltinTail(str(tail_doc["name"]))
    else:
        raise ValidationError(
            f"tail.kind: expected periodic, vanishing or builtin, got {kind!r}"
        )
    shift = 0j
    if "shift" in doc:
        shift = _complex_from_pair(doc["shift"], "shift")
    return BlockOperatorSpec(prefix, tail, shift)


def parse_spec(text: str) -> BlockOperatorSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return parse_spec_dict(doc)


def spec_to_dict(spec: BlockOperatorSpec) -> dict:
    doc: dict = {}
    if spec.prefix:
        doc["prefix"] = [_matrix_to_json(m) for m in spec.prefix]
    t = spec.tail
    if isinstance(t, PeriodicTail):
        doc["tail"] = {"kind": "periodic", "cycle": [_matrix_to_json(m) for m in t.cycle]}
    elif isinstance(t, VanishingTail):
        tail_doc = {
            "kind": "vanishing",
            "limits": [_matrix_to_json(m) for m in t.limits],
        }
        if t.decay_scale:
            tail_doc["decay"] = {"type": "power", "c": t.decay_scale, "p": t.decay_power}
        if t.seed:
            tail_doc["seed"] = t.seed
        doc["tail"] = tail_doc
    else:
        doc["tail"] = {"kind": "builtin", "name": t.name}
    if spec.shift != 0:
        doc["shift"] = [spec.shift.real, spec.shift.imag]
    return doc


# -- artifact writers ---------------------------------------------------


def _write_text(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


def _write_csv(path: str | None, header, rows) -> None:
    if not path:
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])


def _write_cert(path: str | None, payload: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")


def _essential_svg(ess: EssentialRangeResult, extra_cloud: PointCloud | None = None) -> str:
    scene = Scene()
    scene.add_polygon(ess.region.vertices, "fill")
    scene.add_points(ess.limsup.points, "cloud")
    if extra_cloud is not None:
        scene.add_points(extra_cloud.points, "muted")
    return scene.render()


# -- command implementations -------------------------------------------


def _load_spec(args) -> BlockOperatorSpec:
    path = Path(args.specfile)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    return parse_spec(text)


def _compute_essential(spec: BlockOperatorSpec, args) -> EssentialRangeResult:
    kwargs = dict(
        grid=args.angles,
        eps=args.eps,
        k_cap=args.k_cap,
        horizon=args.horizon,
    )
    if getattr(args, "diagonal", False):
        return diagonal_essential_range(spec, **kwargs)
    return essential_numerical_range(spec, **kwargs)


def _cmd_range(args) -> int:
    spec = _load_spec(args)
    blk = spec.block(args.block)
    res = numerical_range(blk, args.angles)
    print(f"block {args.block}: dim {blk.dim}, angle grid {args.angles}")
    print(f"support min {res.outer.support.min():.6g} max {res.outer.support.max():.6g}")
    print(f"sandwich gap {res.gap:.3e}")
    from .convex2d import grid_angles

    th = grid_angles(args.angles)
    _write_csv(
        args.csv,
        ["theta", "support", "boundary_re", "boundary_im"],
        [
            (float(t), float(h), float(b.real), float(b.imag))
            for t, h, b in zip(th, res.outer.support, res.attained)
        ],
    )
    if args.svg:
        scene = Scene()
        scene.add_polygon(res.outer.vertices, "region")
        scene.add_polygon(res.inner.vertices, "fill")
        scene.add_points(res.attained, "cloud")
        _write_text(args.svg, scene.render())
    return EXIT_OK


def _essential_payload(ess: EssentialRangeResult) -> dict:
    return {
        "converged_at": ess.converged_at,
        "crosscheck_gap": ess.crosscheck_gap,
        "tolerance": ess.tolerance,
        "certificate": [[k, d] for k, d in ess.certificate],
        "vertices": [[v.real, v.imag] for v in ess.region.vertices],
    }


def _cmd_essential(args) -> int:
    spec = _load_spec(args)
    ess = _compute_essential(spec, args)
    print(f"essential range: {ess.region.vertices.size} vertices, "
          f"converged at window start {ess.converged_at}")
    print(f"crosscheck gap {ess.crosscheck_gap:.3e} (tolerance {ess.tolerance:.3e})")
    rows = [("vertex", float(v.real), float(v.imag)) for v in ess.region.vertices]
    rows += [("limsup", float(p.real), float(p.imag)) for p in ess.limsup.points]
    _write_csv(args.csv, ["kind", "re", "im"], rows)
    _write_cert(args.cert, _essential_payload(ess))
    if args.svg:
        _write_text(args.svg, _essential_svg(ess))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    spec = _load_spec(args)
    cloud = inner_approximate(
        spec, start=args.tail_start, samples=args.samples, seed=args.seed
    )
    pts = cloud.points
    print(f"{pts.size} essential samples "
          f"(re {pts.real.min():.4g}..{pts.real.max():.4g}, "
          f"im {pts.imag.min():.4g}..{pts.imag.max():.4g})")
    _write_csv(
        args.csv,
        ["re", "im"],
        [(float(p.real), float(p.imag)) for p in pts],
    )
    if args.svg:
        scene = Scene()
        scene.add_points(pts, "cloud")
        _write_text(args.svg, scene.render())
    return EXIT_OK


def _translated_result(ess: EssentialRangeResult, z: complex) -> EssentialRangeResult:
    """Essential range of the translated operator: exact pointwise shift."""
    return EssentialRangeResult(
        ess.region.translate(-z),
        PointCloud(ess.limsup.points - z, ess.limsup.resolution),
        ess.crosscheck_gap,
        ess.certificate,
        ess.tolerance,
        ess.converged_at,
    )


def _run_decomposition(spec: BlockOperatorSpec, args):
    ess = _compute_essential(spec, args)
    choice = choose_translation(ess.region)
    tspec = translate_spec(spec, choice.z)
    tess = _translated_result(ess, choice.z)
    decomp = regroup(
        tspec,
        tess,
        eps=args.eps,
        depth=args.groups,
        scan_cap=args.scan_cap,
        grid=args.angles,
    )
    return ess, choice, tspec, tess, decomp


def _cmd_decompose(args) -> int:
    spec = _load_spec(args)
    ess, choice, tspec, tess, decomp = _run_decomposition(spec, args)
    gap = verify_conv_free(tspec, decomp, tess, grid=args.angles)
    print(f"translation z = {choice.z.real:.6g}{choice.z.imag:+.6g}i "
          f"({choice.reason}, angle margin {choice.angular_margin:.3e})")
    print(f"{decomp.group_count} groups, last boundary {decomp.boundaries[-1]}")
    print(f"conv-free gap {gap:.3e}")
    rows = []
    for m, picks in enumerate(decomp.selections, start=1):
        worst = max(p.distance for p in picks)
        rows.append((m, decomp.boundaries[m - 1], float(worst)))
    _write_csv(args.csv, ["level", "boundary", "worst_distance"], rows)
    _write_cert(
        args.cert,
        {
            "translation": [choice.z.real, choice.z.imag],
            "translation_reason": choice.reason,
            "angular_margin": choice.angular_margin,
            "eps": decomp.eps,
            "boundaries": list(decomp.boundaries),
            "conv_free_gap": gap,
            "essential": _essential_payload(ess),
        },
    )
    if args.svg:
        scene = Scene()
        scene.add_polygon(tess.region.vertices, "fill")
        for m in range(max(1, decomp.group_count // 2), decomp.group_count + 1):
            from .regroup import group_region

            scene.add_polygon(group_region(tspec, decomp, m, args.angles).vertices, "accent")
        _write_text(args.svg, scene.render())
    return EXIT_OK


def _cmd_verify(args) -> int:
    spec = _load_spec(args)
    if args.identity:
        ess = _compute_essential(spec, args)
        choice = choose_translation(ess.region)
        tspec = translate_spec(spec, choice.z)
        tess = _translated_result(ess, choice.z)
        decomp = identity_decomposition(args.groups)
        mode = "identity"
    else:
        ess, choice, tspec, tess, decomp = _run_decomposition(spec, args)
        mode = "regrouped"
    gap = verify_conv_free(tspec, decomp, tess, grid=args.angles)
    print(f"mode {mode}: conv-free gap {gap:.3e}, "
          f"crosscheck gap {ess.crosscheck_gap:.3e}")
    _write_cert(
        args.cert,
        {
            "mode": mode,
            "conv_free_gap": gap,
            "crosscheck_gap": ess.crosscheck_gap,
            "tolerance": ess.tolerance,
            "boundaries": list(decomp.boundaries),
        },
    )
    return EXIT_OK


# -- argument parsing ---------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockrange",
        description="Numerical ranges and essential numerical ranges of "
        "block diagonal operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("specfile", help="JSON operator description")
    common.add_argument("--angles", type=int, default=360,
                        help="angle grid size (default 360)")
    common.add_argument("--eps", type=float, default=1e-3,
                        help="stabilisation / scan threshold (default 1e-3)")
    common.add_argument("--horizon", type=int, default=None,
                        help="tail window length override")
    common.add_argument("--k-cap", type=int, default=2**20, dest="k_cap",
                        help="window start cap for tail doubling (default 2^20)")
    common.add_argument("--seed", type=int, default=0, help="sampling seed")
    common.add_argument("--csv", default=None, help="write CSV artifact here")
    common.add_argument("--svg", default=None, help="write SVG artifact here")
    common.add_argument("--cert", default=None, help="write certificate JSON here")

    p_range = sub.add_parser("range", parents=[common],
                             help="numerical range of one block")
    p_range.add_argument("--block", type=int, default=1,
                         help="1-based block index (default 1)")
    p_range.set_defaults(func=_cmd_range)

    p_ess = sub.add_parser("essential", parents=[common],
                           help="essential numerical range of the operator")
    p_ess.add_argument("--diagonal", action="store_true",
                       help="use the diagonal-operator route (all blocks 1x1)")
    p_ess.set_defaults(func=_cmd_essential)

    p_dec = sub.add_parser("decompose", parents=[common],
                           help="hull-free regrouping of the blocks")
    p_dec.add_argument("--groups", type=int, default=64,
                       help="number of groups to build (default 64)")
    p_dec.add_argument("--scan-cap", type=int, default=10**6, dest="scan_cap",
                       help="blocks examined per scan before giving up")
    p_dec.add_argument("--diagonal", action="store_true", help=argparse.SUPPRESS)
    p_dec.set_defaults(func=_cmd_decompose)

    p_ver = sub.add_parser("verify", parents=[common],
                           help="conv-free and crosscheck gaps")
    p_ver.add_argument("--groups", type=int, default=64,
                       help="number of groups (default 64)")
    p_ver.add_argument("--scan-cap", type=int, default=10**6, dest="scan_cap",
                       help="blocks examined per scan before giving up")
    p_ver.add_argument("--identity", action="store_true",
                       help="score the one-block-per-group baseline instead "
                            "of regrouping")
    p_ver.add_argument("--diagonal", action="store_true", help=argparse.SUPPRESS)
    p_ver.set_defaults(func=_cmd_verify)

    p_orc = sub.add_parser("oracle", parents=[common],
                           help="independent inner samples of the essential range")
    p_orc.add_argument("--samples", type=int, default=2000,
                       help="number of sampled essential values (default 2000)")
    p_orc.add_argument("--tail-start", type=int, default=None, dest="tail_start",
                       help="first block index to sample from (default: past "
                            "the prefix)")
    p_orc.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, HorizonTooSmall, DegenerateGeometry) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NoConvergence, NonConvergence, ScanExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InconsistentResult as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except BlockRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
