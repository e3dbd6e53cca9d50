"""Command line: export embeddings for a manifest through a real model.

Exit codes match the engine CLI: 0 ok, 2 configuration, 3 data,
4 numeric; errors print a single ``error: ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import BridgeError
from .export import ExportJob, export_embeddings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clipfit-bridge",
        description="Export real CLIP-family embeddings to the engine's embedding files.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    exp = subs.add_parser("export", help="embed one manifest and write an .ofce file")
    exp.add_argument("--checkpoint", required=True, help="model identifier or local path")
    exp.add_argument("--manifest", required=True, help="JSONL manifest of records")
    exp.add_argument("--modality", required=True, choices=("image", "text"))
    exp.add_argument("--prompt-mode", choices=("fixed", "template"), default="fixed")
    exp.add_argument("--out", required=True, help="output embedding file path")
    exp.add_argument("--batch-size", type=int, default=32)
    exp.add_argument("--invert-grayscale", action="store_true",
                     help="map grayscale pixels p to 255-p before encoding")
    exp.add_argument("--device", default="cpu")
    exp.set_defaults(func=_cmd_export)
    return parser


def _cmd_export(args) -> int:
    job = ExportJob(
        checkpoint=args.checkpoint,
        manifest=Path(args.manifest),
        out=Path(args.out),
        modality=args.modality,
        prompt_mode=args.prompt_mode,
        batch_size=args.batch_size,
        invert_grayscale=args.invert_grayscale,
        device=args.device,
    )
    summary = export_embeddings(job)
    print(json.dumps({
        "count": summary.count,
        "dim": summary.dim,
        "checksum": summary.checksum,
        "resolution": summary.resolution,
        "out": str(args.out),
    }))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
