"""Command-line interface: ``neqr-pprm <command> ...``.

Exit codes: 0 success, 1 circuits not equivalent, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .bitplane import GrayImage, extract_planes, random_image, read_pgm
from .circuit import (
    CostModel,
    Form,
    circuit_cost,
    export_qasm,
    parse_qasm,
    synthesize_esop,
    synthesize_pprm,
)
from .fit import Family, fit
from .metrics import (
    compression_ratio,
    optimization_rate,
    read_records,
    records_to_csv,
    records_to_json,
    summarize,
    sweep,
)
from .verify import equivalent

VERIFY_MAX_ORDER = 8


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _add_source(p: argparse.ArgumentParser):
    p.add_argument("image", nargs="?", help="P2/P5 grayscale PGM file")
    p.add_argument(
        "--random", nargs=3, type=int, metavar=("N", "Q", "SEED"),
        help="use a seeded random 2^N x 2^N image of depth Q instead of a file",
    )


def _load_source(args) -> tuple[str, GrayImage]:
    if (args.image is None) == (args.random is None):
        raise UsageError("give exactly one of IMAGE or --random N Q SEED")
    if args.random is not None:
        n, q, seed = args.random
        return f"random:{n}:{q}:{seed}", random_image(n, q, seed)
    return args.image, read_pgm(args.image)


def _models(name: str) -> list[CostModel]:
    return list(CostModel) if name == "both" else [CostModel(name)]


def cmd_cost(args) -> str:
    label, img = _load_source(args)
    planes = extract_planes(img)
    esop = synthesize_esop(planes)
    pprm = synthesize_pprm(planes)
    rows = []
    for model in _models(args.model):
        nonopt = circuit_cost(esop, model, args.polarity_x)
        opt = circuit_cost(pprm, model, args.polarity_x)
        rows.append(
            {
                "source": label,
                "n": img.n,
                "q": img.q,
                "model": model.value,
                "qc_nonopt": nonopt,
                "qc_opt": opt,
                "rate": float(_fmt(optimization_rate(nonopt, opt))) if opt else None,
                "ratio_percent": float(_fmt(compression_ratio(nonopt, opt))) if nonopt else None,
            }
        )
    if args.format == "json":
        return json.dumps(rows, indent=1) + "\n"
    header = list(rows[0])
    return _csv(header, [["" if r[k] is None else r[k] for k in header] for r in rows])


def _flip_pixel_bit(img: GrayImage, plane: int, y: int, x: int) -> GrayImage:
    if not (0 <= plane < img.q and 0 <= y < img.side and 0 <= x < img.side):
        raise UsageError("--flip location outside the image")
    pixels = img.pixels.copy()
    pixels[(y << img.n) | x] ^= 1 << plane
    return GrayImage(img.n, img.q, pixels)


def cmd_verify(args) -> tuple[int, str]:
    if args.qasm:
        c1, c2 = (parse_qasm(Path(p).read_text()) for p in args.qasm)
        if c1.n > VERIFY_MAX_ORDER:
            raise UsageError(f"exhaustive check limited to n <= {VERIFY_MAX_ORDER}, got n={c1.n}")
    else:
        _, img = _load_source(args)
        if img.n > VERIFY_MAX_ORDER:
            raise UsageError(
                f"exhaustive check limited to n <= {VERIFY_MAX_ORDER}, got n={img.n}"
            )
        c1 = synthesize_esop(extract_planes(img))
        if args.flip:
            img = _flip_pixel_bit(img, *args.flip)
        c2 = synthesize_pprm(extract_planes(img))
    result = equivalent(c1, c2)
    if result:
        return 0, "EQUIVALENT\n"
    y, x = result.coordinate >> c1.n, result.coordinate & ((1 << c1.n) - 1)
    return 1, f"NOT EQUIVALENT plane={result.plane} Y={y} X={x}\n"


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(".."))
    except ValueError:
        raise UsageError(f"--n-range must look like A..B, got {text!r}") from None
    if not 1 <= lo <= hi <= 16:
        raise UsageError(f"--n-range needs 1 <= A <= B <= 16, got {text!r}")
    return lo, hi


def cmd_sweep(args) -> str:
    lo, hi = _parse_range(args.n_range)
    if args.seeds < 1:
        raise UsageError("--seeds must be at least 1")
    seeds = range(args.seed_base, args.seed_base + args.seeds)
    records = sweep(lo, hi, args.q, seeds, _models(args.model))
    if args.summary:
        stats = summarize(records)
        if args.format == "json":
            return json.dumps(
                [
                    {
                        "model": s.model.value, "m": s.m, "samples": s.samples,
                        "rate_mean": float(_fmt(s.rate_mean)), "rate_std": float(_fmt(s.rate_std)),
                        "ratio_mean": float(_fmt(s.ratio_mean)), "ratio_std": float(_fmt(s.ratio_std)),
                    }
                    for s in stats
                ],
                indent=1,
            ) + "\n"
        return _csv(
            ["model", "m", "samples", "rate_mean", "rate_std", "ratio_mean", "ratio_std"],
            [
                [s.model.value, s.m, s.samples, _fmt(s.rate_mean), _fmt(s.rate_std),
                 _fmt(s.ratio_mean), _fmt(s.ratio_std)]
                for s in stats
            ],
        )
    return records_to_json(records) if args.format == "json" else records_to_csv(records)


def cmd_fit(args) -> str:
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    records = read_records(text)
    points = [
        (r.m, getattr(r, args.y))
        for r in records
        if (args.model is None or r.model.value == args.model)
        and (args.m_min is None or r.m >= args.m_min)
        and (args.m_max is None or r.m <= args.m_max)
    ]
    result = fit(points, Family(args.family), args.init, float(args.sign))
    if args.format == "json":
        return result.to_json() + "\n"
    return _csv(
        ["family", "sign", "params", "rss", "iterations", "converged"],
        [[
            result.model.family.value,
            int(result.model.sign),
            " ".join(repr(p) for p in result.model.params),
            repr(result.residual_sum_squares),
            result.iterations,
            str(result.converged).lower(),
        ]],
    )


def cmd_export(args) -> str | None:
    _, img = _load_source(args)
    planes = extract_planes(img)
    circ = synthesize_pprm(planes) if args.form == Form.PPRM.value else synthesize_esop(planes)
    text = export_qasm(circ)
    if args.out is None:
        return text
    try:
        Path(args.out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    return None


def cmd_info(args) -> str:
    label, img = _load_source(args)
    planes = extract_planes(img)
    pprm = synthesize_pprm(planes)
    rows = [
        [label, i, p.popcount(), cnt]
        for i, (p, cnt) in enumerate(zip(planes.planes, pprm.gate_counts()))
    ]
    head = f"# n={img.n} q={img.q} m={img.m} side={img.side}\n"
    return head + _csv(["source", "plane", "minterms", "pprm_terms"], rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neqr-pprm",
        description="Reed-Muller (PPRM) gate optimisation of NEQR image circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cost", help="quantum cost before and after PPRM optimisation")
    _add_source(p)
    p.add_argument("--model", choices=["plain", "reset", "both"], default="plain")
    p.add_argument("--polarity-x", action="store_true",
                   help="charge two X gates per negative control")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("verify", help="exhaustively check ESOP and PPRM circuits agree")
    _add_source(p)
    p.add_argument("--qasm", nargs=2, metavar=("A", "B"),
                   help="compare two exported QASM files instead")
    p.add_argument("--flip", nargs=3, type=int, metavar=("PLANE", "Y", "X"),
                   help=argparse.SUPPRESS)

    p = sub.add_parser("sweep", help="random-image cost sweep")
    p.add_argument("--n-range", required=True, metavar="A..B")
    p.add_argument("--q", type=int, default=8)
    p.add_argument("--seeds", type=int, default=20, help="images per size")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--model", choices=["plain", "reset", "both"], default="plain")
    p.add_argument("--summary", action="store_true", help="per-m mean and std only")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("fit", help="fit a regression model to sweep output")
    p.add_argument("input", nargs="?", default="-", help="sweep CSV/JSON file (default stdin)")
    p.add_argument("--family", choices=[f.value for f in Family], default="growth")
    p.add_argument("--y", choices=["rate", "ratio_percent"], default="rate")
    p.add_argument("--model", choices=["plain", "reset"])
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)
    p.add_argument("--m-min", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("--init", type=float, nargs="+")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("export", help="write the circuit as OpenQASM 3")
    _add_source(p)
    p.add_argument("--form", choices=[f.value for f in Form], default="pprm")
    p.add_argument("--out")

    p = sub.add_parser("info", help="per-plane minterm and PPRM term counts")
    _add_source(p)
    return parser


_COMMANDS = {
    "cost": cmd_cost,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "export": cmd_export,
    "info": cmd_info,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            code, out = cmd_verify(args)
        else:
            code, out = 0, _COMMANDS[args.command](args)
    except (UsageError, OSError, ValueError) as exc:
        print(f"neqr-pprm {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if out:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
