"""clip-bridge command line: list encoders, export embeddings."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .encoders import EncoderUnavailable, available_encoders, load_encoder
from .export import export_embeddings
from .vocabulary import LEVELS


def _cmd_list(args) -> int:
    for encoder_id in available_encoders():
        if args.probe:
            try:
                load_encoder(encoder_id)
                status = "available"
            except EncoderUnavailable as err:
                status = f"unavailable ({err})"
            print(f"{encoder_id}: {status}")
        else:
            print(encoder_id)
    return 0


def _cmd_export(args) -> int:
    ids = [e.strip() for e in args.encoders.split(",") if e.strip()] if args.encoders else None
    levels = [l.strip() for l in args.levels.split(",") if l.strip()]
    bad = [l for l in levels if l not in LEVELS]
    if bad or not levels:
        print(f"clip-bridge export: levels must be from {LEVELS}, got {levels}",
              file=sys.stderr)
        return 1
    try:
        summary = export_embeddings(ids, out_dir=args.out, levels=levels)
    except KeyError as err:
        print(f"clip-bridge export: {err.args[0]}", file=sys.stderr)
        return 1
    for encoder_id, path in summary["exported"].items():
        print(f"exported {encoder_id} -> {path}")
    for warning in summary["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    if not summary["exported"]:
        print("clip-bridge export: no encoder could be loaded", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="clip-bridge",
        description="export illuminant-vocabulary embeddings from CLIP text encoders",
    )
    parser.add_argument("--version", action="version", version=f"clip-bridge {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("list", help="registered encoder ids")
    p.add_argument("--probe", action="store_true", help="try to load each encoder")
    p.set_defaults(func=_cmd_list)

    p = sub.add_parser("export", help="embed the vocabulary and write manifests")
    p.add_argument("--out", default="exports", help="output directory")
    p.add_argument("--encoders", default=None, help="comma-separated ids (default all)")
    p.add_argument("--levels", default=",".join(LEVELS),
                   help="comma-separated subset of token,sentence")
    p.set_defaults(func=_cmd_export)

    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    return args.func(args)


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
