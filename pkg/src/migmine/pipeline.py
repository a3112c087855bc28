"""Stage orchestration: ingest, rules, segments, fragments, docs, reports.

Each stage reads its input from the store and can be rerun in isolation;
a full run is exactly the stage sequence.  One failing project never
aborts a corpus run: errors are logged and reflected in the exit status.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, gitrepo, javafacts
from .docs import DEFAULT_REPO_BASE, ArchiveFetcher, attach_docs, parse_doc_archive
from .fragments import extract_mappings, filter_fragments, unified_diff
from .history import ProjectHistory
from .model import (
    Fragment,
    LibraryCoordinate,
    LibraryId,
    MethodMapping,
    PackageIndex,
    RuleFilterConfig,
    Segment,
)
from .rulegraph import MigrationGraph, confirm_rules, normalize_and_filter
from .segments import find_segments
from .store import EXPORT_FORMATS, EXPORT_SELECTORS, Store

log = logging.getLogger(__name__)

UNRESOLVED = "unresolved"


class StageDataError(RuntimeError):
    """A stage's prerequisite data is missing from the store."""


@dataclass
class RunConfig:
    projects_file: str | None = None
    workdir: str = "migmine-work"
    db_path: str = "migmine.db"
    t_rel: float = 1.0
    context_lines: int = 3
    offline: bool = False
    imports_count_as_use: bool = True
    fallback_index: bool = True
    repo_base: str = DEFAULT_REPO_BASE
    jobs: int = 1
    cache_dir: str | None = None
    report_dir: str | None = None
    extra_origins: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.t_rel <= 1.0:
            raise ValueError(f"t_rel must be in [0, 1], got {self.t_rel}")
        if self.context_lines < 0:
            raise ValueError("context_lines must be >= 0")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    @property
    def cache_path(self) -> Path:
        return Path(self.cache_dir) if self.cache_dir else Path(self.workdir) / "cache"

    @property
    def report_path(self) -> Path:
        return Path(self.report_dir) if self.report_dir else Path(self.workdir) / "reports"


def read_projects_file(path: str) -> list[str]:
    """Project origins, one per line; # starts a comment."""
    origins = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            origins.append(line)
    return origins


class Pipeline:
    def __init__(self, store: Store, config: RunConfig):
        self.store = store
        self.config = config
        self.fetcher = ArchiveFetcher(
            cache_dir=config.cache_path,
            base=config.repo_base,
            offline=config.offline,
            max_workers=min(config.jobs, 4),
        )
        self._histories: dict[str, ProjectHistory] = {}
        self._indices: dict[LibraryCoordinate, PackageIndex] = {}

    # -- shared state ---------------------------------------------------------

    def history(self, project_id: str) -> ProjectHistory:
        if project_id not in self._histories:
            refs = {r.id: r for r in self.store.projects()}
            if project_id not in refs:
                raise StageDataError(f"project {project_id} not ingested")
            self._histories[project_id] = ProjectHistory(
                refs[project_id], self.store.commits_for(project_id)
            )
        return self._histories[project_id]

    def package_index(self, coordinate: LibraryCoordinate) -> PackageIndex:
        """Class index for a library, from its archive or the prefix fallback."""
        if coordinate in self._indices:
            return self._indices[coordinate]
        index = None
        data = self.fetcher.fetch(coordinate, "classes")
        if data is not None:
            try:
                index = javafacts.build_package_index(coordinate, data)
            except javafacts.IndexBuildError as exc:
                log.warning("event=index_error library=%s error=%s", coordinate, exc)
        if index is None:
            if not self.config.fallback_index:
                raise StageDataError(
                    f"package index unavailable for {coordinate} and fallback disabled"
                )
            log.warning(
                "event=index_fallback library=%s note=low_confidence_prefix_index",
                coordinate,
            )
            index = javafacts.fallback_package_index(coordinate)
        self._indices[coordinate] = index
        return index

    def _rule_coordinates(
        self, history: ProjectHistory, identity: LibraryId
    ) -> LibraryCoordinate:
        """Best coordinate (latest resolved version) of an identity in a project."""
        best = LibraryCoordinate(*identity)
        for declared in history.dependency_timeline():
            coord = declared.get(identity)
            if coord is not None and coord.version != UNRESOLVED:
                best = coord
        return best

    # -- stages -----------------------------------------------------------------

    def ingest(self) -> list[str]:
        """Clone projects and record commits plus dependency changes.

        Returns per-project error strings; failures never abort the run.
        """
        cfg = self.config
        origins = list(cfg.extra_origins)
        if cfg.projects_file:
            try:
                origins = read_projects_file(cfg.projects_file) + origins
            except OSError as exc:
                raise StageDataError(f"cannot read projects file: {exc}") from exc
        if not origins:
            raise StageDataError("no project origins (empty or missing projects file)")
        ids: dict[str, int] = {}
        jobs = []
        for origin in origins:
            base = gitrepo.derive_project_id(origin)
            ids[base] = ids.get(base, 0) + 1
            project_id = base if ids[base] == 1 else f"{base}-{ids[base]}"
            jobs.append((origin, project_id))

        clones_dir = Path(cfg.workdir) / "repos"

        def one(job):
            origin, project_id = job
            try:
                ref, commits = gitrepo.ingest_project(origin, clones_dir, project_id)
                hist = ProjectHistory(ref, commits)
                changes = hist.dependency_changes()
                return (project_id, ref, commits, changes, None)
            except (gitrepo.GitError, OSError) as exc:
                return (project_id, None, None, None, f"{origin}: {exc}")

        if cfg.jobs > 1:
            with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                results = list(pool.map(one, jobs))
        else:
            results = [one(job) for job in jobs]

        errors = []
        for project_id, ref, commits, changes, error in sorted(results, key=lambda r: r[0]):
            if error is not None:
                log.error("event=ingest_failed project=%s error=%s", project_id, error)
                errors.append(error)
                continue
            self.store.upsert(ref)
            for record in commits:
                self.store.upsert(record)
            for change in changes:
                if change.added or change.removed or change.upgraded:
                    self.store.upsert(change)
            self._histories[project_id] = ProjectHistory(ref, commits)
            log.info(
                "event=ingested project=%s commits=%d", project_id, len(commits)
            )
        version = gitrepo.git_version()
        self.store.set_meta("git_version", version)
        log.info("event=vcs_tool version=%r", version)
        return errors

    def detect_rules(self):
        """Cartesian-product graph over all stored changes, filtered by t_rel."""
        if not self.store.has_commits():
            raise StageDataError("no ingested commits; run ingest first")
        graph = MigrationGraph()
        for change in self.store.dependency_changes():
            graph.accumulate(change)
        rules = normalize_and_filter(graph, RuleFilterConfig(self.config.t_rel))
        self.store.clear_rules_and_downstream()
        self.store.replace_edges(graph.edges)
        for rule in rules:
            self.store.upsert(rule)
        self.store.set_meta("t_rel", repr(self.config.t_rel))
        log.info("event=rules_detected candidates=%d edges=%d", len(rules), len(graph))
        return rules

    def detect_segments(self) -> list[Segment]:
        rules = self.store.rules()
        if not rules:
            raise StageDataError("no rules in store; run detect-rules first")
        # segments invalidate everything downstream, including confirmations
        self.store.clear_segments_and_downstream()
        for rule in rules:
            if rule.status != "candidate":
                rule.status = "candidate"
                self.store.upsert(rule)
        segments = []
        for rule in rules:
            for ref in self.store.projects():
                history = self.history(ref.id)
                source_index = self.package_index(
                    self._rule_coordinates(history, rule.source)
                )
                target_index = self.package_index(
                    self._rule_coordinates(history, rule.target)
                )
                found = find_segments(
                    history,
                    rule.source,
                    rule.target,
                    source_index,
                    target_index,
                    self.config.imports_count_as_use,
                )
                for segment in found:
                    self.store.upsert(segment)
                    log.info(
                        "event=segment project=%s rule=%s start=%s end=%s commits=%d",
                        ref.id, rule, segment.start_commit[:12],
                        segment.end_commit[:12], len(segment.commits),
                    )
                segments.extend(found)
        return segments

    def detect_fragments(self) -> tuple[list[Fragment], list[MethodMapping]]:
        """Diff segment commits into fragments, then confirm or discard rules."""
        segments = self.store.segments(include_discarded=True)
        rules = self.store.rules()
        if not rules:
            raise StageDataError("no rules in store; run detect-rules first")
        self.store.clear_fragments_and_mappings()
        all_fragments: list[Fragment] = []
        for segment in segments:
            history = self.history(segment.project)
            source_index = self.package_index(
                self._rule_coordinates(history, segment.source)
            )
            target_index = self.package_index(
                self._rule_coordinates(history, segment.target)
            )
            for commit_id in segment.commits:
                for fc in history.java_changes(commit_id):
                    hunks = unified_diff(
                        fc.before or "",
                        fc.after or "",
                        self.config.context_lines,
                        path=fc.path,
                    )
                    if not hunks:
                        continue
                    uses_before = (
                        history.uses_for(fc.before_sha, fc.before, fc.path, source_index)
                        if fc.before is not None
                        else []
                    )
                    uses_after = (
                        history.uses_for(fc.after_sha, fc.after, fc.path, target_index)
                        if fc.after is not None
                        else []
                    )
                    found = filter_fragments(hunks, segment, commit_id, uses_before, uses_after)
                    for fragment in found:
                        self.store.upsert(fragment)
                    all_fragments.extend(found)
        mappings = extract_mappings(all_fragments)
        for mapping in mappings:
            self.store.upsert(mapping)
        confirmed = confirm_rules(rules, self.store.fragment_counts())
        for rule in confirmed:
            self.store.upsert(rule)
        log.info(
            "event=fragments_detected fragments=%d mappings=%d confirmed=%d",
            len(all_fragments), len(mappings),
            sum(1 for r in confirmed if r.status == "confirmed"),
        )
        return all_fragments, mappings

    def collect_docs(self) -> tuple[int, int]:
        """Fetch and parse javadoc for every confirmed rule's mapped methods."""
        confirmed = self.store.rules(("confirmed",))
        mappings = self.store.mappings()
        if not confirmed and not self.store.rules():
            raise StageDataError("no rules in store; run the pipeline through detect-fragments first")
        self.store.clear_docs()
        # versions recorded on the confirmed rules' segments
        wanted: dict[LibraryId, set[str]] = {}
        for segment in self.store.segments():
            wanted.setdefault(segment.source, set()).add(segment.source_version)
            wanted.setdefault(segment.target, set()).add(segment.target_version)
        coords = [
            (LibraryCoordinate(*identity, version), "documentation")
            for identity, versions in sorted(wanted.items())
            for version in sorted(versions)
            if version != UNRESOLVED
        ]
        archives = self.fetcher.fetch_many(coords)
        docs_by_identity: dict[LibraryId, list] = {}
        for (coordinate, _), data in archives.items():
            if data is None:
                continue
            docs = parse_doc_archive(data, coordinate)
            docs_by_identity.setdefault(coordinate.identity, []).extend(docs)
            for doc in docs:
                self.store.upsert(doc)
        attached = missing = 0
        doc_ids: dict[tuple, int] = {}
        for mapping_id, mapping in mappings:
            pool = docs_by_identity.get(mapping.source, []) + docs_by_identity.get(
                mapping.target, []
            )
            (_, source_docs, target_docs), = attach_docs([mapping], pool)
            for side, attachments in (("source", source_docs), ("target", target_docs)):
                for attachment in attachments:
                    doc_id = None
                    if attachment.doc is not None:
                        key = (
                            attachment.doc.library,
                            attachment.doc.class_name,
                            attachment.doc.method,
                            attachment.doc.signature,
                        )
                        if key not in doc_ids:
                            doc_ids[key] = self.store.upsert(attachment.doc)
                        doc_id = doc_ids[key]
                        attached += 1
                    else:
                        missing += 1
                    self.store.upsert_doc_attachment(mapping_id, side, attachment, doc_id)
        log.info("event=docs_collected attached=%d missing=%d", attached, missing)
        return attached, missing

    def export_reports(self) -> list[Path]:
        outdir = self.config.report_path
        outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        for selector in EXPORT_SELECTORS:
            for fmt in EXPORT_FORMATS:
                path = outdir / f"{selector}.{fmt}"
                path.write_bytes(self.store.export(fmt, selector))
                paths.append(path)
        return paths


def run_all(store: Store, config: RunConfig) -> tuple[int, dict[str, int]]:
    """Full pipeline; exit status 0, or 2 when some projects failed."""
    store.set_meta("tool_version", __version__)
    store.set_meta("run_started_at", datetime.now(timezone.utc).isoformat())
    pipeline = Pipeline(store, config)
    errors = pipeline.ingest()
    if not store.projects():
        raise StageDataError("every project failed to ingest")
    pipeline.detect_rules()
    pipeline.detect_segments()
    pipeline.detect_fragments()
    pipeline.collect_docs()
    pipeline.export_reports()
    store.set_meta("run_finished_at", datetime.now(timezone.utc).isoformat())
    summary = store.counts()
    log.info(
        "event=summary %s",
        " ".join(f"{key}={value}" for key, value in sorted(summary.items())),
    )
    return (2 if errors else 0), summary
