"""Command line entry points: batch extraction, table scoring, API server."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import PapertabError
from .pipeline import DEFAULT_K
from .service import batch_extract, build_gateway, score_files

LOGGER = logging.getLogger(__name__)


def _parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="papertab")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    batch = sub.add_parser(
        "batch-extract", help="Extract a table from a bundle directory"
    )
    batch.add_argument("--bundles", type=Path, required=True, help="bundle directory")
    batch.add_argument(
        "--attributes", type=Path, default=None,
        help="JSON object mapping attribute names to descriptions",
    )
    batch.add_argument(
        "--question", default=None,
        help="natural-language question (alternative to --attributes)",
    )
    batch.add_argument("--out", type=Path, required=True, help="output CSV path")
    batch.add_argument("--mock", action="store_true", help="use the offline mock provider")
    batch.add_argument("--cache", type=Path, default=None, help="response cache directory")
    batch.add_argument("--config", type=Path, default=None, help="gateway config JSON")
    batch.add_argument("--k", type=int, default=DEFAULT_K, help="contexts per document")
    batch.add_argument("--seed", type=int, default=0, help="seed recorded in the sidecar")

    score = sub.add_parser("score", help="Grade a generated CSV against a reference")
    score.add_argument("generated", type=Path)
    score.add_argument("gold", type=Path)
    score.add_argument("--out", type=Path, default=None, help="write the report JSON here")

    serve = sub.add_parser("serve", help="Run the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8077)
    serve.add_argument("--mock", action="store_true", help="use the offline mock provider")
    serve.add_argument("--cache", type=Path, default=None, help="response cache directory")
    serve.add_argument("--config", type=Path, default=None, help="gateway config JSON")

    return parser.parse_args(argv)


def _cmd_batch_extract(args: argparse.Namespace) -> int:
    gateway = build_gateway(
        args.mock,
        cache_dir=str(args.cache) if args.cache else None,
        config_path=str(args.config) if args.config else None,
    )
    result = batch_extract(
        args.bundles, args.attributes, args.out, gateway,
        k=args.k, seed=args.seed, question=args.question,
    )
    print(f"wrote {result.records} records from {result.documents} documents to {result.csv_path}")
    print(f"quality sidecar: {result.sidecar_path}")
    if result.degraded_docs:
        print(f"{result.degraded_docs} document(s) degraded to empty rows")
    return result.exit_code


def _cmd_score(args: argparse.Namespace) -> int:
    report = score_files(args.generated, args.gold)
    for dimension, total in report.dimension_totals.items():
        print(f"{dimension}: {total}")
    print(f"total: {report.grand_total} / {report.max_total}")
    for note in report.notes:
        print(f"note: {note}")
    if args.out:
        args.out.write_text(report.to_json(), encoding="utf-8")
        print(f"report written to {args.out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    gateway = build_gateway(
        args.mock,
        cache_dir=str(args.cache) if args.cache else None,
        config_path=str(args.config) if args.config else None,
    )
    app = create_app(gateway)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "batch-extract": _cmd_batch_extract,
        "score": _cmd_score,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except PapertabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
