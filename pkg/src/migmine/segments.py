"""Migration period detection.

For one (project, rule) pair: the end commit is the earliest commit after
which no source file depends on the retired library (with the target
already in the manifest); the start commit is found scanning backward for
the first code change related to the replacement, bounded below by the
commit that first added the target library to any manifest.
"""

from __future__ import annotations

from .history import ProjectHistory
from .model import LibraryId, PackageIndex, Segment

UNRESOLVED = "unresolved"


class SegmentScanner:
    """Precomputes the per-commit signals one rule needs over one project."""

    def __init__(
        self,
        history: ProjectHistory,
        source: LibraryId,
        target: LibraryId,
        source_index: PackageIndex,
        target_index: PackageIndex,
        imports_count_as_use: bool = True,
    ):
        self.history = history
        self.source = source
        self.target = target
        self.source_index = source_index
        self.target_index = target_index
        self.imports_count_as_use = imports_count_as_use
        self.changes = history.dependency_changes()
        self.timeline = history.dependency_timeline()
        self._deltas: dict[int, tuple[bool, bool]] = {}
        self._dep_flags: list[bool] | None = None

    def libraries_in_change_history(self) -> bool:
        """Both rule endpoints appear among the project's added/removed sets."""
        seen_source = seen_target = False
        for change in self.changes:
            idents = {c.identity for c in change.added} | {
                c.identity for c in change.removed
            }
            seen_source = seen_source or self.source in idents
            seen_target = seen_target or self.target in idents
            if seen_source and seen_target:
                return True
        return False

    @property
    def dep_flags(self) -> list[bool]:
        if self._dep_flags is None:
            self._dep_flags = self.history.source_dependency_flags(
                self.source_index, self.imports_count_as_use
            )
        return self._dep_flags

    def target_present(self, ordinal: int) -> bool:
        return self.target in self.timeline[ordinal]

    def first_target_addition(self, hi: int) -> int | None:
        for i in range(hi + 1):
            if any(c.identity == self.target for c in self.changes[i].added):
                return i
        return None

    def deltas(self, ordinal: int) -> tuple[bool, bool]:
        """(source use removed, target use added) by this commit's java changes."""
        if ordinal in self._deltas:
            return self._deltas[ordinal]
        commit_id = self.history.commits[ordinal].commit_id
        removed_source = added_target = False
        for fc in self.history.java_changes(commit_id):
            src_before = self._use_counts(fc.before_sha, fc.before, fc.path, self.source_index)
            src_after = self._use_counts(fc.after_sha, fc.after, fc.path, self.source_index)
            if any(src_before[k] > src_after.get(k, 0) for k in src_before):
                removed_source = True
            dst_before = self._use_counts(fc.before_sha, fc.before, fc.path, self.target_index)
            dst_after = self._use_counts(fc.after_sha, fc.after, fc.path, self.target_index)
            if any(dst_after[k] > dst_before.get(k, 0) for k in dst_after):
                added_target = True
            if removed_source and added_target:
                break
        self._deltas[ordinal] = (removed_source, added_target)
        return self._deltas[ordinal]

    def _use_counts(self, sha, text, path, index) -> dict[tuple, int]:
        if text is None:
            return {}
        counts: dict[tuple, int] = {}
        for use in self.history.uses_for(sha, text, path, index):
            counts[use.method_key] = counts.get(use.method_key, 0) + 1
        return counts

    # -- boundary location ----------------------------------------------------

    def find_end(self, hi: int) -> int | None:
        """Earliest ordinal <= hi with the target declared and every commit
        from there to hi free of source-library dependency."""
        flags = self.dep_flags
        end = None
        clean = True
        for i in range(hi, -1, -1):
            clean = clean and not flags[i]
            if clean and self.target_present(i):
                end = i
        return end

    def find_start(self, end: int) -> tuple[int, bool]:
        """Scan backward from end for the first replacement-related commit.

        Bounded below by the first manifest addition of the target library;
        falls back to end itself.  Returns (ordinal, weak_start).
        """
        lower = self.first_target_addition(end)
        if lower is None:
            lower = end
        start = end
        for i in range(lower, end + 1):
            removed, added = self.deltas(i)
            if removed or added:
                start = i
                break
        removed, added = self.deltas(start)
        return start, (added and not removed)

    def segment_between(self, start: int, end: int, weak_start: bool) -> Segment:
        commits = [
            self.history.commits[i].commit_id
            for i in range(start, end + 1)
            if any(self.deltas(i))
        ]
        if not commits:
            commits = [self.history.commits[end].commit_id]
        segment = Segment(
            project=self.history.ref.id,
            source=self.source,
            target=self.target,
            start_commit=self.history.commits[start].commit_id,
            end_commit=self.history.commits[end].commit_id,
            commits=commits,
            weak_start=weak_start,
        )
        return self.record_versions(segment)

    def record_versions(self, segment: Segment) -> Segment:
        return record_versions(self.history, segment)


def record_versions(history: ProjectHistory, segment: Segment) -> Segment:
    """Source version at the last pre-start commit declaring it, target at end.

    Either side degrades to "unresolved" when the manifest never names a
    resolvable version; the docs stage skips such coordinates.
    """
    timeline = history.dependency_timeline()
    start = history.ordinal_of(segment.start_commit)
    end = history.ordinal_of(segment.end_commit)
    source_version = UNRESOLVED
    for i in range(start - 1, -1, -1):
        coord = timeline[i].get(segment.source)
        if coord is not None:
            source_version = coord.version
            break
    target_coord = timeline[end].get(segment.target)
    segment.source_version = source_version
    segment.target_version = target_coord.version if target_coord else UNRESOLVED
    return segment


def find_segments(
    history: ProjectHistory,
    source: LibraryId,
    target: LibraryId,
    source_index: PackageIndex,
    target_index: PackageIndex,
    imports_count_as_use: bool = True,
) -> list[Segment]:
    """All migration periods of the rule in this project, oldest first.

    Repeated migrations (migrate, revert, migrate again) are found by
    rerunning the scan on the history prefix before each found start.
    """
    scanner = SegmentScanner(
        history, source, target, source_index, target_index, imports_count_as_use
    )
    if not scanner.libraries_in_change_history():
        return []
    segments = []
    hi = len(history.commits) - 1
    while hi >= 0:
        end = scanner.find_end(hi)
        if end is None:
            break
        start, weak = scanner.find_start(end)
        segments.append(scanner.segment_between(start, end, weak))
        hi = start - 1
    segments.reverse()
    return segments


def find_segment_end(
    history: ProjectHistory,
    source: LibraryId,
    target: LibraryId,
    source_index: PackageIndex,
    target_index: PackageIndex,
    imports_count_as_use: bool = True,
) -> str | None:
    """Spec operation: end commit of the latest migration, if any."""
    scanner = SegmentScanner(
        history, source, target, source_index, target_index, imports_count_as_use
    )
    if not scanner.libraries_in_change_history():
        return None
    end = scanner.find_end(len(history.commits) - 1)
    return history.commits[end].commit_id if end is not None else None


def find_segment_start(
    history: ProjectHistory,
    source: LibraryId,
    target: LibraryId,
    source_index: PackageIndex,
    target_index: PackageIndex,
    end_commit: str,
    imports_count_as_use: bool = True,
) -> str:
    """Spec operation: start commit for a previously located end."""
    scanner = SegmentScanner(
        history, source, target, source_index, target_index, imports_count_as_use
    )
    start, _ = scanner.find_start(history.ordinal_of(end_commit))
    return history.commits[start].commit_id
