"""Command-line frontend: ``rdhei <subcommand> ...``.

Failures exit with status 1 and print ``ERROR <Name>: <message>`` on stderr,
where ``<Name>`` is the exception class (``DimensionError``,
``CapacityError``, ...). Keys are 64 hex characters, given by flag, by key
file, or through ``RDHEI_KEY_E`` / ``RDHEI_KEY_D`` (flag wins).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, pipeline
from .crypto import Key, standard_encrypt
from .errors import KeyFormatError, RdheiError
from .prediction import bytes_to_planes
from .raster_io import iter_corpus, load_pgm, store_pgm

ENV = {"e": "RDHEI_KEY_E", "d": "RDHEI_KEY_D"}


def _add_key(parser: argparse.ArgumentParser, role: str, required: bool = True) -> None:
    parser.add_argument(f"--key-{role}", metavar="HEX",
                        help=f"64-hex-character key (default: ${ENV[role]})")
    parser.add_argument(f"--key-{role}-file", metavar="PATH", help="file holding the key")
    parser.set_defaults(**{f"_need_{role}": required})


def resolve_key(args: argparse.Namespace, role: str) -> Key | None:
    text = getattr(args, f"key_{role}")
    if text is None and getattr(args, f"key_{role}_file"):
        text = Path(getattr(args, f"key_{role}_file")).read_text()
    if text is None:
        text = os.environ.get(ENV[role])
    if text is None:
        if getattr(args, f"_need_{role}"):
            raise KeyFormatError(f"no key given: use --key-{role}, --key-{role}-file or ${ENV[role]}")
        return None
    return Key.from_hex(text)


def cmd_reserve_encrypt(args: argparse.Namespace) -> None:
    ke = resolve_key(args, "e")
    image = load_pgm(args.input)
    result = pipeline.reserve_and_encrypt(image, ke)
    store_pgm(result.encrypted, args.output)
    if args.standard:
        store_pgm(standard_encrypt(image, ke), args.standard)
    print(result.report.summary())


def cmd_embed(args: argparse.Namespace) -> None:
    kd = resolve_key(args, "d")
    payload = Path(args.payload).read_bytes()
    marked = pipeline.embed_image(load_pgm(args.input), payload, kd)
    store_pgm(marked, args.output)
    print(f"embedded {8 * len(payload)} bits")


def cmd_extract(args: argparse.Namespace) -> None:
    kd = resolve_key(args, "d")
    data = pipeline.extract_image(load_pgm(args.input), kd)
    Path(args.output).write_bytes(data)
    print(f"extracted {len(data)} bytes")


def cmd_recover(args: argparse.Namespace) -> None:
    ke = resolve_key(args, "e")
    store_pgm(pipeline.recover_image(load_pgm(args.input), ke), args.output)


def cmd_analyze(args: argparse.Namespace) -> None:
    image = load_pgm(args.input)
    _, ent = analysis.histogram_and_entropy(image)
    print(f"image: {args.input} ({image.shape[0]}x{image.shape[1]})")
    print(f"entropy: {ent:.4f} bits/pixel")
    planes = bytes_to_planes(image)
    other = None
    if args.compare:
        other = load_pgm(args.compare)
        _, ent2 = analysis.histogram_and_entropy(other)
        print(f"compare: {args.compare}, entropy {ent2:.4f} bits/pixel")
        print(f"MSE: {analysis.mse(image, other):g}")
        other = bytes_to_planes(other)
    print("ones per 4x4 block (planes 1-4):")
    print("ones " + " ".join(f"{'p%d' % p:>7}" for p in range(1, 5)))
    hists = [analysis.ones_per_block_histogram(planes[p]) for p in range(4)]
    for k in range(17):
        print(f"{k:>4} " + " ".join(f"{h[k]:>7}" for h in hists))
    if other is not None:
        for p in range(4):
            stat, pval = analysis.chi2_homogeneity(
                hists[p], analysis.ones_per_block_histogram(other[p]))
            verdict = "similar" if pval > 0.01 else "different"
            print(f"plane {p + 1}: chi2 = {stat:.2f}, p = {pval:.4f} ({verdict} at 0.01)")
    if args.pe:
        from .prediction import compute_pe
        print(f"PE entropy: {analysis.pe_entropy(compute_pe(image)):.4f} bits/pixel")


def _bench_one(job: tuple[str, str, str | None]) -> analysis.BenchRow:
    path, ke_hex, kd_hex = job
    image = load_pgm(path)
    name = Path(path).name
    if kd_hex is None:
        res = pipeline.reserve_and_encrypt(image, ke_hex)
        err = analysis.mse(image, pipeline.recover_image(res.encrypted, ke_hex))
        return analysis.BenchRow(name, res.report, err)
    cycle = pipeline.full_cycle_check(image, ke_hex, kd_hex)
    return analysis.BenchRow(name, cycle.report, cycle.mse)


def cmd_bench(args: argparse.Namespace) -> None:
    ke = resolve_key(args, "e")
    kd = resolve_key(args, "d")
    jobs = [(str(p), ke.hex(), kd.hex() if kd else None) for p in iter_corpus(args.dir)]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    out = open(args.out, "w", newline="") if args.out != "-" else sys.stdout
    try:
        analysis.write_csv(rows, out)
    finally:
        if out is not sys.stdout:
            out.close()
    if rows:
        ers = np.array([r.report.er for r in rows])
        print(f"{len(rows)} images, mean ER {ers.mean():.4f} bpp", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdhei", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reserve-encrypt", help="content owner: reserve room and encrypt")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--standard", metavar="PATH",
                   help="also write the plainly XOR-encrypted image for comparison")
    _add_key(p, "e")
    p.set_defaults(func=cmd_reserve_encrypt)

    p = sub.add_parser("embed", help="data hider: embed a payload file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--payload", required=True)
    _add_key(p, "d")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="receiver: extract the payload")
    p.add_argument("input")
    p.add_argument("output")
    _add_key(p, "d")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("recover", help="receiver: recover the original image")
    p.add_argument("input")
    p.add_argument("output")
    _add_key(p, "e")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("analyze", help="entropy, MSE and ones-per-block statistics")
    p.add_argument("input")
    p.add_argument("--compare", metavar="PATH")
    p.add_argument("--pe", action="store_true", help="also report the PE entropy")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="capacity/reversibility report over a directory of PGMs")
    p.add_argument("--dir", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--jobs", type=int, default=1)
    _add_key(p, "e")
    _add_key(p, "d", required=False)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except RdheiError as exc:
        print(f"ERROR {exc.name}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ERROR IoError: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
