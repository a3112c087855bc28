"""Command-line interface: the full run plus each stage individually."""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .docs import DEFAULT_REPO_BASE
from .pipeline import Pipeline, RunConfig, StageDataError, run_all
from .store import EXPORT_FORMATS, EXPORT_SELECTORS, Store, StoreError

log = logging.getLogger("migmine")

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for partial per-project failures
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"ERROR event=usage_error detail={message!r}\n")
        raise SystemExit(EXIT_FATAL)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--workdir", default="migmine-work", help="working directory for clones, cache and reports")
    parser.add_argument("--db", dest="db_path", default=None, help="database file (default: WORKDIR/migmine.db)")
    parser.add_argument("--t-rel", type=float, default=1.0, help="relevance threshold in [0,1] (default 1.0)")
    parser.add_argument("--context-lines", type=int, default=3, help="unified diff context lines (default 3)")
    parser.add_argument("--offline", action="store_true", help="no network: use only cached archives")
    parser.add_argument("--jobs", type=int, default=1, help="parallel projects/downloads (default 1)")
    parser.add_argument("--repo-base", default=DEFAULT_REPO_BASE, help="Maven-layout repository base URL")
    parser.add_argument("--cache-dir", default=None, help="archive cache directory (default: WORKDIR/cache)")
    parser.add_argument(
        "--no-imports-count-as-use",
        dest="imports_count_as_use",
        action="store_false",
        help="library imports without calls do not count as residual dependency",
    )
    parser.add_argument(
        "--no-fallback-index",
        dest="fallback_index",
        action="store_false",
        help="fail instead of guessing a package prefix when a class archive is unavailable",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="migmine", description=__doc__)
    parser.add_argument("--version", action="version", version=f"migmine {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="full pipeline over a project list")
    run.add_argument("--projects", dest="projects_file", required=True, help="file with one origin per line, # comments")
    _add_common(run)

    ingest = sub.add_parser("ingest", help="clone projects, record commits and manifest changes")
    ingest.add_argument("--projects", dest="projects_file", required=True)
    _add_common(ingest)

    for name, help_text in (
        ("detect-rules", "build the migration graph and filter rules by t_rel"),
        ("detect-segments", "locate migration periods for every candidate rule"),
        ("detect-fragments", "extract witnessing diff hunks and confirm rules"),
        ("collect-docs", "download and parse javadoc for mapped methods"),
    ):
        stage = sub.add_parser(name, help=help_text)
        _add_common(stage)

    report = sub.add_parser("report", help="export stored results")
    report.add_argument("--format", choices=EXPORT_FORMATS, default="json")
    report.add_argument("--select", choices=EXPORT_SELECTORS, required=True)
    report.add_argument("--out", default=None, help="output file (default: stdout)")
    report.add_argument("--stdout", action="store_true", help="write the report to stdout")
    _add_common(report)

    return parser


def _config_from(args: argparse.Namespace) -> RunConfig:
    db_path = args.db_path or f"{args.workdir}/migmine.db"
    return RunConfig(
        projects_file=getattr(args, "projects_file", None),
        workdir=args.workdir,
        db_path=db_path,
        t_rel=args.t_rel,
        context_lines=args.context_lines,
        offline=args.offline,
        imports_count_as_use=args.imports_count_as_use,
        fallback_index=args.fallback_index,
        repo_base=args.repo_base,
        jobs=args.jobs,
        cache_dir=args.cache_dir,
    )


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s"
    )
    args = build_parser().parse_args(argv)
    try:
        config = _config_from(args)
    except ValueError as exc:
        log.error("event=config_error detail=%r", str(exc))
        return EXIT_FATAL

    try:
        with Store(config.db_path) as store:
            if args.command == "run":
                code, summary = run_all(store, config)
                for key, value in sorted(summary.items()):
                    log.info("event=count %s=%d", key, value)
                return code
            pipeline = Pipeline(store, config)
            if args.command == "ingest":
                errors = pipeline.ingest()
                if not store.projects():
                    log.error("event=fatal detail='every project failed to ingest'")
                    return EXIT_FATAL
                return EXIT_PARTIAL if errors else EXIT_OK
            if args.command == "detect-rules":
                pipeline.detect_rules()
                return EXIT_OK
            if args.command == "detect-segments":
                pipeline.detect_segments()
                return EXIT_OK
            if args.command == "detect-fragments":
                pipeline.detect_fragments()
                return EXIT_OK
            if args.command == "collect-docs":
                pipeline.collect_docs()
                return EXIT_OK
            if args.command == "report":
                payload = store.export(args.format, args.select)
                if args.out and not args.stdout:
                    with open(args.out, "wb") as fh:
                        fh.write(payload)
                    log.info("event=report_written path=%s bytes=%d", args.out, len(payload))
                else:
                    sys.stdout.buffer.write(payload)
                return EXIT_OK
            raise AssertionError(f"unhandled command {args.command}")
    except StageDataError as exc:
        log.error("event=missing_stage_data detail=%r", str(exc))
        return EXIT_FATAL
    except StoreError as exc:
        log.error("event=store_error detail=%r", str(exc))
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
