"""Git history ingestion through plumbing subprocesses.

Only rev-list/log, diff-tree and cat-file are used; file contents come
from the object store, never from per-commit checkouts.  History is
first-parent only, oldest first, which gives every project a stable
linear timeline for segment ordering.
"""

from __future__ import annotations

import logging
import re
import subprocess
from datetime import datetime, timezone
from pathlib import Path

from .model import CommitRecord, FileChange, ProjectRef

log = logging.getLogger(__name__)

GIT = "git"


class GitError(RuntimeError):
    pass


class IngestError(GitError):
    """Clone or history read failed; message carries the origin."""


class NoHistoryError(IngestError):
    """The repository exists but has no commits."""


class UnknownCommitError(LookupError):
    pass


def run_git(args: list[str], cwd: str | Path | None = None, data: bytes | None = None) -> bytes:
    proc = subprocess.run(
        [GIT, *args],
        cwd=cwd,
        input=data,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    if proc.returncode != 0:
        raise GitError(
            f"git {' '.join(args[:2])} failed (rc={proc.returncode}): "
            f"{proc.stderr.decode('utf-8', 'replace').strip()}"
        )
    return proc.stdout


def git_version() -> str:
    return run_git(["version"]).decode("ascii", "replace").strip()


def path_glob_to_regex(pattern: str) -> re.Pattern[str]:
    """Compile a path glob: ** crosses directories, * and ? do not."""
    out = []
    i = 0
    n = len(pattern)
    while i < n:
        c = pattern[i]
        if c == "*":
            if pattern[i : i + 3] == "**/":
                out.append("(?:.*/)?")
                i += 3
            elif pattern[i : i + 2] == "**":
                out.append(".*")
                i += 2
            else:
                out.append("[^/]*")
                i += 1
        elif c == "?":
            out.append("[^/]")
            i += 1
        else:
            out.append(re.escape(c))
            i += 1
    return re.compile("".join(out) + r"\Z")


def derive_project_id(origin: str) -> str:
    tail = origin.rstrip("/").rsplit("/", 1)[-1]
    if tail.endswith(".git"):
        tail = tail[:-4]
    slug = re.sub(r"[^A-Za-z0-9._-]+", "-", tail).strip("-")
    return slug or "project"


def _is_git_workdir(path: Path) -> bool:
    return (path / ".git").exists() or (path / "HEAD").is_file()


def ingest_project(
    origin: str, workdir_base: str | Path, project_id: str | None = None
) -> tuple[ProjectRef, list[CommitRecord]]:
    """Clone (or reuse) a repository and enumerate its first-parent history.

    Local directory origins are read in place; URLs are cloned below
    workdir_base and reused on later runs.  Returns commits oldest first
    with 0-based ordinals.
    """
    project_id = project_id or derive_project_id(origin)
    origin_path = Path(origin)
    if origin_path.is_dir() and _is_git_workdir(origin_path):
        workdir = origin_path.resolve()
    else:
        workdir = Path(workdir_base) / project_id
        if not (workdir.is_dir() and _is_git_workdir(workdir)):
            workdir.parent.mkdir(parents=True, exist_ok=True)
            try:
                run_git(["clone", "--quiet", origin, str(workdir)])
            except GitError as exc:
                raise IngestError(f"cannot clone {origin}: {exc}") from exc
    ref = ProjectRef(id=project_id, origin=origin, workdir=str(workdir))
    return ref, first_parent_history(ref)


def first_parent_history(ref: ProjectRef) -> list[CommitRecord]:
    try:
        raw = run_git(
            [
                "log",
                "--first-parent",
                "--reverse",
                "--format=%H%x1f%an%x1f%aI%x1f%B%x1e",
                "HEAD",
            ],
            cwd=ref.workdir,
        )
    except GitError as exc:
        raise NoHistoryError(f"no commit history in {ref.origin}: {exc}") from exc
    records = []
    for ordinal, chunk in enumerate(raw.decode("utf-8", "replace").split("\x1e")):
        chunk = chunk.strip("\n")
        if not chunk:
            continue
        commit_id, author, date_str, message = chunk.split("\x1f", 3)
        date = datetime.fromisoformat(date_str).astimezone(timezone.utc)
        records.append(
            CommitRecord(
                project=ref.id,
                commit_id=commit_id.strip(),
                date=date,
                author=author,
                message=message.rstrip("\n"),
                ordinal=ordinal,
            )
        )
    if not records:
        raise NoHistoryError(f"no commit history in {ref.origin}")
    return records


_HEX_RE = re.compile(r"[0-9a-f]{40,64}\Z")


def changed_files(
    ref: ProjectRef, commit_id: str, pattern: str | None = None
) -> list[FileChange]:
    """Diff a commit against its first parent, blobs resolved and decoded.

    Rename detection is on; binary blobs are skipped entirely.  `pattern`
    is a path glob matched against either side of the change.
    """
    try:
        parents_raw = run_git(["rev-list", "--parents", "-n", "1", commit_id], cwd=ref.workdir)
    except GitError as exc:
        raise UnknownCommitError(f"unknown commit {commit_id} in {ref.id}: {exc}") from exc
    parts = parents_raw.decode("ascii", "replace").split()
    first_parent = parts[1] if len(parts) > 1 else None
    if first_parent:
        raw = run_git(["diff-tree", "-r", "-M", "-z", first_parent, commit_id], cwd=ref.workdir)
    else:
        raw = run_git(["diff-tree", "-r", "-M", "-z", "--root", commit_id], cwd=ref.workdir)

    matcher = path_glob_to_regex(pattern).match if pattern else None
    fields = raw.decode("utf-8", "replace").split("\0")
    entries = []  # (kind, old_path, new_path, old_sha, new_sha)
    i = 0
    while i < len(fields):
        head = fields[i]
        if not head:
            i += 1
            continue
        if _HEX_RE.match(head):  # --root prints the commit id first
            i += 1
            continue
        if not head.startswith(":"):
            i += 1
            continue
        _, _, old_sha, new_sha, status = head[1:].split(" ", 4)
        if status.startswith(("R", "C")):
            old_path, new_path = fields[i + 1], fields[i + 2]
            i += 3
        else:
            old_path = new_path = fields[i + 1]
            i += 2
        entries.append((status, old_path, new_path, old_sha, new_sha))

    changes = []
    sha_wanted = set()
    kept = []
    for status, old_path, new_path, old_sha, new_sha in entries:
        if matcher and not (matcher(new_path) or matcher(old_path)):
            continue
        kept.append((status, old_path, new_path, old_sha, new_sha))
        for sha in (old_sha, new_sha):
            if sha.strip("0"):
                sha_wanted.add(sha)
    blobs = _read_blobs(ref.workdir, sha_wanted)

    for status, old_path, new_path, old_sha, new_sha in kept:
        before = blobs.get(old_sha)
        after = blobs.get(new_sha)
        if before is _BINARY or after is _BINARY:
            continue
        code = status[0]
        if code == "A":
            changes.append(
                FileChange(commit_id, new_path, "added", None, None, after, None, new_sha)
            )
        elif code == "D":
            changes.append(
                FileChange(commit_id, old_path, "deleted", None, before, None, old_sha, None)
            )
        elif code == "C":
            changes.append(
                FileChange(commit_id, new_path, "added", None, None, after, None, new_sha)
            )
        elif code == "R":
            changes.append(
                FileChange(
                    commit_id, new_path, "renamed", old_path, before, after, old_sha, new_sha
                )
            )
        else:  # M, T
            changes.append(
                FileChange(commit_id, new_path, "modified", None, before, after, old_sha, new_sha)
            )
    return changes


_BINARY = object()


def _read_blobs(workdir: str | Path, shas: set[str]) -> dict[str, str | object]:
    """Bulk-read blobs via one cat-file --batch call; binary marked, not decoded."""
    if not shas:
        return {}
    ordered = sorted(shas)
    data = run_git(
        ["cat-file", "--batch"],
        cwd=workdir,
        data=("\n".join(ordered) + "\n").encode("ascii"),
    )
    out: dict[str, str | object] = {}
    pos = 0
    for sha in ordered:
        nl = data.index(b"\n", pos)
        header = data[pos:nl].decode("ascii", "replace").split()
        pos = nl + 1
        if len(header) < 3 or header[1] == "missing":
            continue
        size = int(header[2])
        raw = data[pos : pos + size]
        pos += size + 1  # trailing newline after the blob
        out[header[0]] = _BINARY if b"\0" in raw else raw.decode("utf-8", "replace")
    return out
