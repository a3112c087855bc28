"""Cached per-project view of a repository's history.

Wraps the git plumbing with per-commit change caches, per-blob fact
caches and the replayed manifest timeline, so segment and fragment
detection never analyze the same blob twice.
"""

from __future__ import annotations

import logging

from . import gitrepo, javafacts
from .manifest import ManifestParseError, diff_dependencies, parse_manifest
from .model import (
    CommitRecord,
    DependencyChange,
    FileChange,
    LibraryCoordinate,
    LibraryId,
    PackageIndex,
    ProjectRef,
    SourceFacts,
)

log = logging.getLogger(__name__)

POM_GLOB = "**/pom.xml"
JAVA_GLOB = "**/*.java"


class ProjectHistory:
    def __init__(self, ref: ProjectRef, commits: list[CommitRecord]):
        self.ref = ref
        self.commits = commits
        self.by_commit = {c.commit_id: c for c in commits}
        self._pom_changes: dict[str, list[FileChange]] = {}
        self._java_changes: dict[str, list[FileChange]] = {}
        self._facts: dict[str, SourceFacts] = {}
        self._uses: dict[tuple, list] = {}
        self._timeline: list[dict[LibraryId, LibraryCoordinate]] | None = None
        self._changes: list[DependencyChange] | None = None
        self._dep_flags: dict[tuple, list[bool]] = {}

    def ordinal_of(self, commit_id: str) -> int:
        return self.by_commit[commit_id].ordinal

    def pom_changes(self, commit_id: str) -> list[FileChange]:
        if commit_id not in self._pom_changes:
            self._pom_changes[commit_id] = gitrepo.changed_files(
                self.ref, commit_id, POM_GLOB
            )
        return self._pom_changes[commit_id]

    def java_changes(self, commit_id: str) -> list[FileChange]:
        if commit_id not in self._java_changes:
            self._java_changes[commit_id] = gitrepo.changed_files(
                self.ref, commit_id, JAVA_GLOB
            )
        return self._java_changes[commit_id]

    def facts_for(self, sha: str | None, text: str, path: str) -> SourceFacts:
        if sha is None:
            return javafacts.extract_facts(text, path)
        if sha not in self._facts:
            self._facts[sha] = javafacts.extract_facts(text, path)
        return self._facts[sha]

    @staticmethod
    def _index_key(index: PackageIndex):
        return (index.library.identity, index.prefix_mode)

    def uses_for(self, sha: str | None, text: str, path: str, index: PackageIndex):
        key = (sha, self._index_key(index))
        if sha is None or key not in self._uses:
            uses = javafacts.resolve_usages(self.facts_for(sha, text, path), index)
            if sha is None:
                return uses
            self._uses[key] = uses
        return self._uses[key]

    def depends(
        self,
        sha: str | None,
        text: str,
        path: str,
        index: PackageIndex,
        imports_count_as_use: bool,
    ) -> bool:
        return javafacts.facts_depend_on(
            self.facts_for(sha, text, path), index, imports_count_as_use
        )

    # -- manifest timeline ---------------------------------------------------

    def _replay_manifests(self) -> None:
        per_path: dict[str, list[LibraryCoordinate]] = {}
        timeline: list[dict[LibraryId, LibraryCoordinate]] = []
        changes: list[DependencyChange] = []
        prev_declared: dict[LibraryId, LibraryCoordinate] = {}
        for commit in self.commits:
            for fc in self.pom_changes(commit.commit_id):
                if fc.kind == "deleted":
                    per_path.pop(fc.path, None)
                    continue
                if fc.kind == "renamed" and fc.old_path:
                    per_path.pop(fc.old_path, None)
                try:
                    per_path[fc.path] = parse_manifest(fc.after or "")
                except ManifestParseError as exc:
                    log.warning(
                        "event=manifest_parse_error project=%s commit=%s path=%s error=%s",
                        self.ref.id, commit.commit_id[:12], fc.path, exc,
                    )
                    per_path[fc.path] = []
            declared: dict[LibraryId, LibraryCoordinate] = {}
            for path in sorted(per_path):
                for coord in per_path[path]:
                    declared.setdefault(coord.identity, coord)
            timeline.append(declared)
            changes.append(
                diff_dependencies(
                    list(prev_declared.values()),
                    list(declared.values()),
                    project=self.ref.id,
                    commit=commit.commit_id,
                )
            )
            prev_declared = declared
        self._timeline = timeline
        self._changes = changes

    def dependency_timeline(self) -> list[dict[LibraryId, LibraryCoordinate]]:
        """Declared dependencies after each commit, identity -> coordinate."""
        if self._timeline is None:
            self._replay_manifests()
        return self._timeline

    def dependency_changes(self) -> list[DependencyChange]:
        """Per-commit added/removed sets, aligned with self.commits."""
        if self._changes is None:
            self._replay_manifests()
        return self._changes

    # -- source dependency tracking -------------------------------------------

    def source_dependency_flags(
        self, index: PackageIndex, imports_count_as_use: bool = True
    ) -> list[bool]:
        """Per commit: does any file present at that commit depend on the library.

        Replays java file changes once, evaluating only changed blobs; files
        deleted at a commit stop counting from that commit on.
        """
        key = (self._index_key(index), imports_count_as_use)
        if key in self._dep_flags:
            return self._dep_flags[key]
        dependent: set[str] = set()
        flags = []
        for commit in self.commits:
            for fc in self.java_changes(commit.commit_id):
                if fc.kind == "deleted":
                    dependent.discard(fc.path)
                    continue
                if fc.kind == "renamed" and fc.old_path:
                    dependent.discard(fc.old_path)
                if fc.after is not None and self.depends(
                    fc.after_sha, fc.after, fc.path, index, imports_count_as_use
                ):
                    dependent.add(fc.path)
                else:
                    dependent.discard(fc.path)
            flags.append(bool(dependent))
        self._dep_flags[key] = flags
        return flags
