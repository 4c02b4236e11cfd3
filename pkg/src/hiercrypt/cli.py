"""Command-line interface: keygen, encrypt, decrypt, analyze, attack.

Exit codes: 0 success, 1 usage, 2 data/format error, 3 crypto-domain error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import analysis, report
from .chaos import KEY_SIZE, REFERENCE_KEY, Key, parse_key, parse_key_text, random_key, serialize_key
from .errors import AccessError, DomainError, HierCryptError, ImageFormatError, KeyFormatError
from .hierarchy import AccessRights, CannyParams, decrypt_partial, encrypt_content
from .imageio import read_image, write_image, write_mask
from .partition import split_planes

log = logging.getLogger("hiercrypt")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CRYPTO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_key(path) -> Key:
    """Read a 96-byte binary key, or the 12-number text form."""
    data = Path(path).read_bytes()
    if len(data) == KEY_SIZE:
        try:
            return parse_key(data)
        except KeyFormatError:
            pass
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        raise KeyFormatError(f"{path}: key must be {KEY_SIZE} bytes or 12 numbers as text") from None
    return parse_key_text(text)


def _check_output(out, *inputs) -> None:
    out = Path(out)
    parent = out.resolve().parent
    if not parent.is_dir():
        raise UsageError(f"output directory {parent} does not exist")
    for src in inputs:
        if src is not None and Path(src).exists() and out.exists() and os.path.samefile(out, src):
            raise UsageError(f"refusing to overwrite input file {src}")


def _check_input(path) -> None:
    if not Path(path).is_file():
        raise UsageError(f"input file {path} not found")


def _canny_params(args) -> CannyParams:
    if not args.sigma > 0:
        raise UsageError("--sigma must be positive")
    if not 0 < args.low < args.high:
        raise UsageError("Canny thresholds must satisfy 0 < --low < --high")
    if args.radius < 0:
        raise UsageError("--radius must be non-negative")
    return CannyParams(args.sigma, args.low, args.high, args.radius)


def cmd_keygen(args) -> int:
    _check_output(args.out)
    if args.values is not None:
        key = Key.from_values(args.values)
    elif args.reference:
        key = REFERENCE_KEY
    else:
        key = random_key()
    Path(args.out).write_bytes(serialize_key(key))
    log.info("wrote key %s", args.out)
    return EXIT_OK


def cmd_encrypt(args) -> int:
    _check_input(args.input)
    _check_input(args.key)
    params = _canny_params(args)
    _check_output(args.output, args.input, args.key)
    if args.mask_out:
        _check_output(args.mask_out, args.input, args.key)
    img = read_image(args.input)
    key = load_key(args.key)
    mask = params.mask(img)
    msb7, _ = split_planes(img)
    write_image(args.output, encrypt_content(msb7, mask, key))
    if args.mask_out:
        write_mask(args.mask_out, mask)
    return EXIT_OK


def cmd_decrypt(args) -> int:
    _check_input(args.input)
    _check_input(args.key)
    try:
        rights = AccessRights.parse(args.rights)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not rights.has_sk3:
        raise AccessError("--rights must include sk3: the mask sub-key is needed to locate the subsets")
    _check_output(args.output, args.input, args.key)
    cryptogram = read_image(args.input)
    key = load_key(args.key)
    write_image(args.output, decrypt_partial(cryptogram, rights.select(key)))
    return EXIT_OK


def cmd_analyze(args) -> int:
    _check_input(args.input)
    _check_input(args.key)
    params = _canny_params(args)
    selections = [s.strip() for s in args.select.split(",") if s.strip()]
    bad = set(selections) - set(report.SELECTIONS)
    if bad:
        raise UsageError(f"unknown --select entries: {', '.join(sorted(bad))}")
    if args.report:
        _check_output(args.report, args.input, args.key)
    if args.csv_dir and not Path(args.csv_dir).is_dir():
        raise UsageError(f"--csv-dir {args.csv_dir} is not a directory")
    img = read_image(args.input)
    key = load_key(args.key)
    rep = report.run_battery(img, key, selections, args.seed, args.flips, args.pairs, params)
    text = report.dumps(rep)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv_dir:
        d = Path(args.csv_dir)
        if "differential" in rep:
            report.write_differential_csv(d / "differential.csv", rep)
        if "sensitivity" in rep:
            report.write_sensitivity_csv(d / "sensitivity.csv", rep)
        if "histogram" in rep or "correlation" in rep:
            cipher = encrypt_content(img >> 1, params.mask(img), key)
            report.write_histogram_csv(d / "histogram.csv", img, cipher)
            report.write_scatter_csv(d / "scatter_plain.csv", img, args.pairs, args.seed)
            report.write_scatter_csv(d / "scatter_cipher.csv", cipher, args.pairs, args.seed)
    return EXIT_OK


def cmd_attack(args) -> int:
    for p in (args.plain, args.cipher, args.target, args.truth):
        if p is not None:
            _check_input(p)
    inputs = (args.plain, args.cipher, args.target, args.truth)
    for out in (args.recovered, args.keystream, args.report):
        if out:
            _check_output(out, *inputs)
    plain = read_image(args.plain)
    cipher = read_image(args.cipher)
    target = read_image(args.target)
    truth = read_image(args.truth) if args.truth else None
    res = analysis.keystream_attack(plain, cipher, target, truth)
    if args.recovered:
        write_image(args.recovered, res.recovered)
    if args.keystream:
        write_image(args.keystream, res.keystream)
    verdict = {None: "unknown", True: "success", False: "failure"}[res.succeeded]
    rep = {
        "schema_version": report.SCHEMA_VERSION,
        "source_recovered": res.source_recovered,
        "npcr": res.npcr,
        "uaci": res.uaci,
        "verdict": verdict,
    }
    text = json.dumps(rep, indent=2, sort_keys=True) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_canny(p):
    g = p.add_argument_group("edge mask")
    g.add_argument("--sigma", type=float, default=CannyParams.sigma, help="Gaussian sigma (default %(default)s)")
    g.add_argument("--low", type=float, default=CannyParams.low, help="hysteresis low threshold (default %(default)s)")
    g.add_argument("--high", type=float, default=CannyParams.high, help="hysteresis high threshold (default %(default)s)")
    g.add_argument("--radius", type=int, default=CannyParams.radius, help="dilation radius (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hiercrypt", description="Hierarchical chaotic image encryption.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keygen", help="write a 96-byte key file")
    p.add_argument("out")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--values", type=float, nargs=12, metavar="V", help="explicit parameters, sk1..sk3 each (x0 mu0 x0_xor mu0_xor)")
    src.add_argument("--reference", action="store_true", help="the built-in reference key")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a grayscale image")
    p.add_argument("input")
    p.add_argument("key")
    p.add_argument("output")
    p.add_argument("--mask-out", help="also write the dilated edge mask (0/255)")
    _add_canny(p)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a cryptogram (fully or per access rights)")
    p.add_argument("input")
    p.add_argument("key")
    p.add_argument("output")
    p.add_argument("--rights", default="sk1,sk2,sk3", help="sub-keys to use, e.g. sk2,sk3 (default all)")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("analyze", help="run the statistical evaluation battery")
    p.add_argument("input", help="plain image")
    p.add_argument("key")
    p.add_argument("--select", default=",".join(report.SELECTIONS), help="comma list of %(default)s")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--flips", type=int, default=5, help="differential flips to average")
    p.add_argument("--pairs", type=int, default=2500, help="adjacent pairs per direction")
    p.add_argument("--report", help="JSON output path (stdout if omitted)")
    p.add_argument("--csv-dir", help="directory for CSV tables")
    _add_canny(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("attack", help="known-plaintext XOR keystream attack")
    p.add_argument("plain")
    p.add_argument("cipher")
    p.add_argument("target")
    p.add_argument("--truth", help="plaintext of the target, for scoring")
    p.add_argument("--recovered", help="write the attacked image here")
    p.add_argument("--keystream", help="write the extracted keystream here")
    p.add_argument("--report", help="JSON output path (stdout if omitted)")
    p.set_defaults(func=cmd_attack)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hiercrypt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, AccessError) as exc:
        print(f"hiercrypt: error: {exc}", file=sys.stderr)
        return EXIT_CRYPTO
    except (KeyFormatError, ImageFormatError, OSError) as exc:
        print(f"hiercrypt: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except HierCryptError as exc:
        print(f"hiercrypt: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
