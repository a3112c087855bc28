"""Data model shared across the mining pipeline stages."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime

# A library identity: (group, artifact).  Versions never participate in
# identity comparisons.
LibraryId = tuple[str, str]

# A method within a library: (fully-qualified class, method name, arity).
# Constructors use "<init>" as the method name.
MethodKey = tuple[str, str, int]


def library_key(lib: LibraryId) -> str:
    return f"{lib[0]}:{lib[1]}"


def method_key_str(key: MethodKey) -> str:
    return f"{key[0]}#{key[1]}/{key[2]}"


@dataclass(frozen=True, slots=True, order=True)
class LibraryCoordinate:
    """A build dependency: the (group, artifact, version) manifest triple."""

    group: str
    artifact: str
    version: str = "unresolved"

    @property
    def identity(self) -> LibraryId:
        return (self.group, self.artifact)

    @property
    def key(self) -> str:
        return f"{self.group}:{self.artifact}"

    def __str__(self) -> str:
        return f"{self.group}:{self.artifact}:{self.version}"


@dataclass(frozen=True, slots=True)
class ProjectRef:
    id: str
    origin: str
    workdir: str


@dataclass(frozen=True, slots=True)
class CommitRecord:
    project: str
    commit_id: str
    date: datetime
    author: str
    message: str
    ordinal: int  # 0-based position in first-parent history, 0 = oldest


@dataclass(frozen=True, slots=True)
class FileChange:
    """One file touched by a commit, with both content versions resolved.

    kind is one of added / modified / deleted / renamed.  The blob ids let
    later stages cache per-blob analysis results.
    """

    commit: str
    path: str
    kind: str
    old_path: str | None = None
    before: str | None = None
    after: str | None = None
    before_sha: str | None = None
    after_sha: str | None = None


@dataclass(frozen=True, slots=True)
class DependencyChange:
    """Per-commit library additions/removals, upgrades excluded.

    A (group, artifact) identity never appears in both added and removed:
    such pairs are same-library version upgrades and land in `upgraded`.
    """

    project: str
    commit: str
    added: frozenset[LibraryCoordinate]
    removed: frozenset[LibraryCoordinate]
    upgraded: frozenset[tuple[LibraryCoordinate, LibraryCoordinate]] = frozenset()


@dataclass(frozen=True, slots=True)
class RuleFilterConfig:
    t_rel: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.t_rel <= 1.0:
            raise ValueError(f"t_rel must be in [0, 1], got {self.t_rel}")


@dataclass(slots=True)
class MigrationRule:
    """A directed source→target library pair with its observation weight."""

    source: LibraryId
    target: LibraryId
    weight: int
    normalized_weight: float
    status: str = "candidate"  # candidate | confirmed | discarded

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (*self.source, *self.target)

    def __str__(self) -> str:
        return f"{library_key(self.source)} -> {library_key(self.target)}"


@dataclass(slots=True)
class Segment:
    """The migration period of one rule within one project."""

    project: str
    source: LibraryId
    target: LibraryId
    start_commit: str
    end_commit: str
    source_version: str = "unresolved"
    target_version: str = "unresolved"
    commits: list[str] = field(default_factory=list)
    weak_start: bool = False  # start only adds target uses, no source removal


@dataclass(frozen=True, slots=True)
class ImportDecl:
    qualified: str
    is_static: bool = False
    is_wildcard: bool = False


@dataclass(frozen=True, slots=True)
class Declaration:
    """A named, typed declaration (local, field or parameter)."""

    name: str
    type_name: str
    line: int
    scope_start_line: int
    scope_end_line: int


@dataclass(frozen=True, slots=True)
class Invocation:
    line: int
    kind: str  # constructor | instance | static_call | static_imported
    method: str  # for constructors: the class simple name
    arity: int
    receiver: str | None = None
    # declared (or constructed) type of the receiver, when locally evident
    receiver_type: str | None = None


@dataclass(frozen=True, slots=True)
class SourceFacts:
    path: str
    package: str | None
    imports: tuple[ImportDecl, ...]
    declarations: tuple[Declaration, ...]
    invocations: tuple[Invocation, ...]
    local_types: frozenset[str] = frozenset()


@dataclass(frozen=True, slots=True)
class PackageIndex:
    """Class membership index of one library, used to resolve invocations.

    In prefix mode (fallback when the class archive is unavailable) the
    index matches any class whose package sits under one of `packages`.
    """

    library: LibraryCoordinate
    classes: frozenset[str]
    packages: frozenset[str]
    prefix_mode: bool = False

    def contains_class(self, fqcn: str) -> bool:
        if not self.prefix_mode:
            return fqcn in self.classes
        pkg = fqcn.rpartition(".")[0]
        return bool(pkg) and self.covers_package(pkg)

    def covers_package(self, pkg: str) -> bool:
        if not self.prefix_mode:
            return pkg in self.packages
        return any(pkg == p or pkg.startswith(p + ".") for p in self.packages)


@dataclass(frozen=True, slots=True)
class LibraryMethodUse:
    library: LibraryId
    class_name: str  # fully qualified
    method: str  # "<init>" for constructors
    arity: int
    line: int

    @property
    def method_key(self) -> MethodKey:
        return (self.class_name, self.method, self.arity)


@dataclass(frozen=True, slots=True)
class HunkLine:
    tag: str  # context | removed | added
    text: str  # includes the line terminator when present
    before_no: int | None = None  # 1-based line in the before file
    after_no: int | None = None


@dataclass(frozen=True, slots=True)
class Hunk:
    file: str
    before_start: int
    before_len: int
    after_start: int
    after_len: int
    lines: tuple[HunkLine, ...]


@dataclass(frozen=True, slots=True)
class Fragment:
    """A diff hunk witnessing at least one method mapping."""

    project: str
    source: LibraryId
    target: LibraryId
    start_commit: str  # segment identity
    end_commit: str
    commit: str
    hunk: Hunk
    removed_methods: frozenset[LibraryMethodUse]
    added_methods: frozenset[LibraryMethodUse]


@dataclass(slots=True)
class MethodMapping:
    source: LibraryId
    target: LibraryId
    source_methods: frozenset[MethodKey]
    target_methods: frozenset[MethodKey]
    support: int


@dataclass(frozen=True, slots=True)
class MethodDoc:
    """Parsed API documentation for one method or constructor."""

    library: LibraryCoordinate
    package: str
    class_name: str
    class_description: str
    method: str  # "<init>" for constructors
    signature: tuple[str, ...]  # declared parameter types, simple names
    description: str
    param_docs: tuple[tuple[str, str], ...]
    return_doc: str | None = None
    since: str | None = None

    @property
    def arity(self) -> int:
        return len(self.signature)


@dataclass(frozen=True, slots=True)
class DocAttachment:
    """Resolution of one mapped method against the parsed documentation."""

    method: MethodKey
    doc: MethodDoc | None
    found: bool
    ambiguous: bool = False

    @property
    def marker(self) -> str:
        return "ok" if self.found else "no documentation found"
