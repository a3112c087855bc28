"""Lightweight static facts about Java sources.

Extracts imports, typed declarations and method invocations from raw
source text, and resolves invocations against a per-library class index.
Resolution is intra-file and declared-type based: a conservative
under-approximation that prefers missing a use over inventing one.
"""

from __future__ import annotations

import io
import zipfile

from ..model import (
    Declaration,
    ImportDecl,
    Invocation,
    LibraryCoordinate,
    LibraryMethodUse,
    PackageIndex,
    SourceFacts,
)
from .scanner import BACKEND, IDENT, PUNCT, tokenize

__all__ = [
    "BACKEND",
    "IndexBuildError",
    "build_package_index",
    "fallback_package_index",
    "extract_facts",
    "resolve_usages",
    "facts_depend_on",
    "file_depends_on",
]

_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while""".split()
)

_PRIMITIVES = frozenset(
    "boolean byte char short int long float double void".split()
)

_GENERIC_PUNCT = frozenset(".,?[]&@")


class IndexBuildError(RuntimeError):
    """Raised when a class archive cannot be turned into a usable index."""


def build_package_index(coordinate: LibraryCoordinate, archive: bytes) -> PackageIndex:
    """Index the top-level classes of a zip-format class archive.

    Inner classes (a/B$C.class) fold into their outer class.  An archive
    without any class entries is an error: it cannot resolve anything.
    """
    try:
        zf = zipfile.ZipFile(io.BytesIO(archive))
        names = zf.namelist()
    except (zipfile.BadZipFile, OSError) as exc:
        raise IndexBuildError(f"unreadable class archive for {coordinate}: {exc}") from exc
    classes = set()
    for name in names:
        if not name.endswith(".class") or name.startswith("META-INF/"):
            continue
        base = name[:-6].split("$", 1)[0]
        if base.endswith("module-info") or base.endswith("package-info"):
            continue
        classes.add(base.replace("/", "."))
    if not classes:
        raise IndexBuildError(f"archive for {coordinate} contains no classes")
    packages = {c.rpartition(".")[0] for c in classes if "." in c}
    return PackageIndex(
        library=coordinate,
        classes=frozenset(classes),
        packages=frozenset(packages),
    )


def fallback_package_index(coordinate: LibraryCoordinate) -> PackageIndex:
    """Low-confidence index guessing the group id as the package prefix."""
    return PackageIndex(
        library=coordinate,
        classes=frozenset(),
        packages=frozenset({coordinate.group}),
        prefix_mode=True,
    )


def _skip_generics(toks, i, n, limit=80):
    """Return the index after a type-argument list starting at '<', or None.

    Only type-like contents qualify; anything else means '<' was the
    less-than operator.
    """
    if i >= n or toks[i][0] != PUNCT or toks[i][1] != "<":
        return None
    depth = 0
    j = i
    steps = 0
    while j < n and steps < limit:
        kind, v, _ = toks[j]
        if kind == PUNCT:
            if v == "<":
                depth += 1
            elif v == ">":
                depth -= 1
                if depth == 0:
                    return j + 1
            elif v not in _GENERIC_PUNCT:
                return None
        elif kind == IDENT:
            if v in _KEYWORDS and v not in _PRIMITIVES and v not in ("extends", "super"):
                return None
        else:
            return None
        j += 1
        steps += 1
    return None


def _parse_type(toks, i, n):
    """Try to read a (possibly qualified, generic, array) type at token i.

    Returns (dotted_base_name, next_index) or None.  Generic arguments and
    array brackets are consumed but not part of the returned name.
    """
    if i >= n or toks[i][0] != IDENT:
        return None
    val = toks[i][1]
    if val in _KEYWORDS and val not in _PRIMITIVES:
        return None
    parts = [val]
    j = i + 1
    while (
        j + 1 < n
        and toks[j][0] == PUNCT
        and toks[j][1] == "."
        and toks[j + 1][0] == IDENT
        and toks[j + 1][1] not in _KEYWORDS
    ):
        parts.append(toks[j + 1][1])
        j += 2
    g = _skip_generics(toks, j, n)
    if g is not None:
        j = g
    while (
        j + 1 < n
        and toks[j][0] == PUNCT
        and toks[j][1] == "["
        and toks[j + 1][0] == PUNCT
        and toks[j + 1][1] == "]"
    ):
        j += 2
    return ".".join(parts), j


def _count_arity(toks, open_idx, n):
    """Count the top-level arguments of the call whose '(' is at open_idx."""
    depth = 1
    count = 0
    has_content = False
    j = open_idx + 1
    while j < n:
        kind, v, _ = toks[j]
        if kind == PUNCT:
            if v in "([{":
                depth += 1
            elif v in ")]}":
                depth -= 1
                if depth == 0:
                    break
            elif v == "," and depth == 1:
                count += 1
                j += 1
                continue
            elif v == "<":
                g = _skip_generics(toks, j, n)
                if g is not None:
                    has_content = True
                    j = g
                    continue
        has_content = True
        j += 1
    if count:
        return count + 1
    return 1 if has_content else 0


def _matching_paren(toks, open_idx, n):
    depth = 0
    j = open_idx
    while j < n:
        kind, v, _ = toks[j]
        if kind == PUNCT:
            if v in "([{":
                depth += 1
            elif v in ")]}":
                depth -= 1
                if depth == 0:
                    return j
        j += 1
    return n - 1


def _parse_qualified(toks, i, n):
    """Read a dotted identifier chain starting at token i (an IDENT)."""
    parts = [toks[i][1]]
    j = i + 1
    while (
        j + 1 < n
        and toks[j][0] == PUNCT
        and toks[j][1] == "."
        and toks[j + 1][0] == IDENT
    ):
        parts.append(toks[j + 1][1])
        j += 2
    return parts, j


class _Walker:
    """Single linear pass over the token stream collecting facts."""

    def __init__(self, toks, path):
        self.toks = toks
        self.n = len(toks)
        self.path = path
        self.package = None
        self.imports: list[ImportDecl] = []
        self.local_types: set[str] = set()
        self.static_import_names: set[str] = set()
        self.invocations: list[Invocation] = []
        # each record: [name, type, decl_line, start_line, end_line|None]
        self.decl_records: list[list] = []
        self.scopes: list[dict[str, str]] = [{}]
        self.scope_records: list[list[list]] = [[]]
        self.paren_depth = 0
        self.pending: list[tuple[str, str, int]] = []
        self.carry: list[tuple[str, str, int]] = []

    def run(self) -> SourceFacts:
        toks, n = self.toks, self.n
        i = 0
        while i < n:
            kind, val, line = toks[i]
            if kind == PUNCT:
                if val == "{":
                    self._push_scope(line)
                    i += 1
                elif val == "}":
                    self._pop_scope(line)
                    i += 1
                elif val == "(":
                    self.paren_depth += 1
                    i += 1
                elif val == ")":
                    if self.paren_depth > 0:
                        self.paren_depth -= 1
                        if self.paren_depth == 0 and self.pending:
                            self.carry = self.pending
                            self.pending = []
                    i += 1
                elif val == ";":
                    if self.carry:
                        self._merge_carry(line)
                    i += 1
                elif val == "@":
                    i = self._skip_annotation(i)
                else:
                    i += 1
                continue
            if kind != IDENT:
                i += 1
                continue
            prev_dot = i > 0 and toks[i - 1][0] == PUNCT and toks[i - 1][1] == "."
            if prev_dot:
                i += 1
                continue
            if val == "package" and self.package is None:
                parts, j = (
                    _parse_qualified(toks, i + 1, n) if i + 1 < n and toks[i + 1][0] == IDENT else ([], i + 1)
                )
                if parts:
                    self.package = ".".join(parts)
                i = j + 1
                continue
            if val == "import":
                i = self._parse_import(i)
                continue
            if val in ("class", "interface", "enum"):
                if i + 1 < n and toks[i + 1][0] == IDENT:
                    self.local_types.add(toks[i + 1][1])
                    i += 2
                else:
                    i += 1
                continue
            if (
                val == "record"
                and i + 2 < n
                and toks[i + 1][0] == IDENT
                and toks[i + 2][0] == PUNCT
                and toks[i + 2][1] in "(<"
            ):
                self.local_types.add(toks[i + 1][1])
                i += 2
                continue
            if val == "new":
                i = self._handle_new(i)
                continue
            if val in _KEYWORDS:
                i += 1
                continue
            consumed = self._try_declaration(i)
            if consumed is not None:
                i = consumed
                continue
            consumed = self._try_call_chain(i)
            if consumed is not None:
                i = consumed
                continue
            i += 1
        # close remaining scopes at the last line
        last_line = toks[-1][2] if toks else 1
        while len(self.scopes) > 1:
            self._pop_scope(last_line)
        for rec in self.scope_records[0]:
            rec[4] = last_line
        declarations = tuple(
            Declaration(r[0], r[1], r[2], r[3], r[4] if r[4] is not None else last_line)
            for r in self.decl_records
        )
        return SourceFacts(
            path=self.path,
            package=self.package,
            imports=tuple(self.imports),
            declarations=declarations,
            invocations=tuple(self.invocations),
            local_types=frozenset(self.local_types),
        )

    # -- scope machinery ---------------------------------------------------

    def _push_scope(self, line):
        scope: dict[str, str] = {}
        records: list[list] = []
        if self.carry:
            for name, type_name, decl_line in self.carry:
                scope[name] = type_name
                rec = [name, type_name, decl_line, decl_line, None]
                self.decl_records.append(rec)
                records.append(rec)
            self.carry = []
        self.scopes.append(scope)
        self.scope_records.append(records)

    def _pop_scope(self, line):
        if len(self.scopes) == 1:
            return
        self.scopes.pop()
        for rec in self.scope_records.pop():
            rec[4] = line

    def _merge_carry(self, line):
        # paren declarations not followed by a block (bodyless for/try)
        for name, type_name, decl_line in self.carry:
            self._record_decl(name, type_name, decl_line)
        self.carry = []

    def _record_decl(self, name, type_name, line):
        if self.paren_depth > 0:
            self.pending.append((name, type_name, line))
            return
        self.scopes[-1][name] = type_name
        rec = [name, type_name, line, line, None]
        self.decl_records.append(rec)
        self.scope_records[-1].append(rec)

    def _lookup(self, name):
        for scope in reversed(self.scopes):
            t = scope.get(name)
            if t is not None:
                return t
        for name2, type_name, _ in self.pending:
            if name2 == name:
                return type_name
        return None

    # -- constructs ----------------------------------------------------------

    def _skip_annotation(self, i):
        toks, n = self.toks, self.n
        j = i + 1
        if j < n and toks[j][0] == IDENT and toks[j][1] == "interface":
            return i + 1  # @interface declaration, let the main loop handle it
        if j < n and toks[j][0] == IDENT:
            _, j = _parse_qualified(toks, j, n)
        if j < n and toks[j][0] == PUNCT and toks[j][1] == "(":
            return _matching_paren(toks, j, n) + 1
        return j

    def _parse_import(self, i):
        toks, n = self.toks, self.n
        j = i + 1
        is_static = False
        if j < n and toks[j][0] == IDENT and toks[j][1] == "static":
            is_static = True
            j += 1
        parts = []
        wildcard = False
        while j < n and toks[j][0] == IDENT:
            parts.append(toks[j][1])
            j += 1
            if j < n and toks[j][0] == PUNCT and toks[j][1] == ".":
                j += 1
                if j < n and toks[j][0] == PUNCT and toks[j][1] == "*":
                    wildcard = True
                    j += 1
                    break
                continue
            break
        if parts:
            self.imports.append(ImportDecl(".".join(parts), is_static, wildcard))
            if is_static and not wildcard:
                self.static_import_names.add(parts[-1])
        while j < n and not (toks[j][0] == PUNCT and toks[j][1] == ";"):
            j += 1
        return j + 1

    def _handle_new(self, i):
        toks, n = self.toks, self.n
        t = _parse_type(toks, i + 1, n)
        if t is None:
            return i + 1
        type_name, j = t
        if not (j < n and toks[j][0] == PUNCT and toks[j][1] == "("):
            return i + 1  # array creation or malformed
        simple = type_name.rpartition(".")[2]
        type_line = toks[i + 1][2]
        self.invocations.append(
            Invocation(
                line=type_line,
                kind="constructor",
                method=simple,
                arity=_count_arity(toks, j, n),
                receiver=type_name,
                receiver_type=type_name,
            )
        )
        close = _matching_paren(toks, j, n)
        # constructor-chained call: the receiver type is locally evident
        if (
            close + 3 < n
            and toks[close + 1][0] == PUNCT
            and toks[close + 1][1] == "."
            and toks[close + 2][0] == IDENT
            and toks[close + 3][0] == PUNCT
            and toks[close + 3][1] == "("
        ):
            self.invocations.append(
                Invocation(
                    line=toks[close + 2][2],
                    kind="instance",
                    method=toks[close + 2][1],
                    arity=_count_arity(toks, close + 3, n),
                    receiver=type_name,
                    receiver_type=type_name,
                )
            )
        return j

    def _try_declaration(self, i):
        toks, n = self.toks, self.n
        t = _parse_type(toks, i, n)
        if t is None:
            return None
        type_name, j = t
        if not (j < n and toks[j][0] == IDENT and toks[j][1] not in _KEYWORDS):
            return None
        name = toks[j][1]
        k = j + 1
        if not (k < n and toks[k][0] == PUNCT and toks[k][1] in "=;,):"):
            return None
        if toks[k][1] == ":" and k + 1 < n and toks[k + 1][0] == PUNCT and toks[k + 1][1] == ":":
            return None  # method reference, not an enhanced-for declaration
        if toks[k][1] == "=" and k + 1 < n and toks[k + 1][0] == PUNCT and toks[k + 1][1] == "=":
            return None  # equality comparison
        self._record_decl(name, type_name, toks[j][2])
        if toks[k][1] == ",":
            # direct multi-declarator form: Type a, b, c;
            m = k
            while (
                m + 1 < n
                and toks[m][0] == PUNCT
                and toks[m][1] == ","
                and toks[m + 1][0] == IDENT
                and toks[m + 1][1] not in _KEYWORDS
                and m + 2 < n
                and toks[m + 2][0] == PUNCT
                and toks[m + 2][1] in "=;,"
            ):
                self._record_decl(toks[m + 1][1], type_name, toks[m + 1][2])
                m += 2
            return m
        return k

    def _try_call_chain(self, i):
        toks, n = self.toks, self.n
        parts, j = _parse_qualified(toks, i, n)
        if not (j < n and toks[j][0] == PUNCT and toks[j][1] == "("):
            return None
        method = parts[-1]
        prefix = parts[:-1]
        line = toks[j - 1][2] if len(parts) > 1 else toks[i][2]
        arity = _count_arity(toks, j, n)
        if not prefix:
            # resolvable only through an explicit static import; wildcard
            # static imports could attribute local helpers to the library
            if method in self.static_import_names:
                self.invocations.append(
                    Invocation(line=line, kind="static_imported", method=method, arity=arity)
                )
            return j
        if "this" in prefix or "super" in prefix:
            return j
        if len(prefix) == 1:
            declared = self._lookup(prefix[0])
            if declared is not None:
                self.invocations.append(
                    Invocation(
                        line=line,
                        kind="instance",
                        method=method,
                        arity=arity,
                        receiver=prefix[0],
                        receiver_type=declared,
                    )
                )
                return j
        self.invocations.append(
            Invocation(
                line=line,
                kind="static_call",
                method=method,
                arity=arity,
                receiver=".".join(prefix),
            )
        )
        return j


def extract_facts(source: str, path: str = "<memory>") -> SourceFacts:
    """Extract imports, declarations and invocations from Java text.

    Best-effort and total: syntactically broken files yield fewer facts,
    never an exception.
    """
    return _Walker(tokenize(source), path).run()


def _lookup_class(index: PackageIndex, fqcn: str) -> str | None:
    """Find fqcn in the index, folding trailing inner-class segments."""
    parts = fqcn.split(".")
    for cut in range(len(parts), 1, -1):
        cand = ".".join(parts[:cut])
        if index.contains_class(cand):
            return cand
    if len(parts) == 1 and index.contains_class(fqcn):
        return fqcn
    return None


class _Resolver:
    def __init__(self, facts: SourceFacts, index: PackageIndex):
        self.facts = facts
        self.index = index
        self.explicit: dict[str, str] = {}
        self.wildcards: list[str] = []
        self.static_explicit: dict[str, str] = {}
        for imp in facts.imports:
            if imp.is_static:
                if not imp.is_wildcard:
                    cls, _, member = imp.qualified.rpartition(".")
                    if cls:
                        self.static_explicit.setdefault(member, cls)
            elif imp.is_wildcard:
                self.wildcards.append(imp.qualified)
            else:
                simple = imp.qualified.rpartition(".")[2]
                self.explicit.setdefault(simple, imp.qualified)

    def resolve_type(self, name: str | None) -> str | None:
        if not name:
            return None
        index = self.index
        if "." in name:
            hit = _lookup_class(index, name)
            if hit:
                return hit
            # first segment may be an imported simple name (Outer.Inner use)
            first, _, rest = name.partition(".")
            fq = self.explicit.get(first)
            if fq:
                return _lookup_class(index, fq)
            return None
        if name in self.facts.local_types:
            return None  # locally declared type shadows any import
        fq = self.explicit.get(name)
        if fq:
            return _lookup_class(index, fq)
        for pkg in self.wildcards:
            cand = f"{pkg}.{name}"
            if index.contains_class(cand):
                return cand
        if self.facts.package:
            cand = f"{self.facts.package}.{name}"
            if index.contains_class(cand):
                return cand
        return None

    def resolve_static_import(self, method: str) -> str | None:
        fq = self.static_explicit.get(method)
        if fq:
            return _lookup_class(self.index, fq)
        return None


def resolve_usages(facts: SourceFacts, index: PackageIndex) -> list[LibraryMethodUse]:
    """Resolve the invocations in `facts` that belong to the indexed library.

    Unresolvable invocations are dropped: the result is a conservative
    under-approximation with no invented uses.
    """
    res = _Resolver(facts, index)
    lib = index.library.identity
    uses = []
    for inv in facts.invocations:
        if inv.kind == "constructor":
            cls = res.resolve_type(inv.receiver)
            method = "<init>"
        elif inv.kind == "instance":
            cls = res.resolve_type(inv.receiver_type)
            method = inv.method
        elif inv.kind == "static_call":
            cls = res.resolve_type(inv.receiver)
            method = inv.method
        else:  # static_imported
            cls = res.resolve_static_import(inv.method)
            method = inv.method
        if cls is not None:
            uses.append(
                LibraryMethodUse(
                    library=lib,
                    class_name=cls,
                    method=method,
                    arity=inv.arity,
                    line=inv.line,
                )
            )
    return uses


def facts_depend_on(
    facts: SourceFacts, index: PackageIndex, imports_count_as_use: bool = True
) -> bool:
    if resolve_usages(facts, index):
        return True
    if not imports_count_as_use:
        return False
    for imp in facts.imports:
        if imp.is_wildcard:
            if imp.is_static:
                if _lookup_class(index, imp.qualified):
                    return True
            elif index.covers_package(imp.qualified):
                return True
        else:
            qualified = imp.qualified
            if imp.is_static:
                qualified = qualified.rpartition(".")[0]
            if qualified and _lookup_class(index, qualified):
                return True
    return False


def file_depends_on(
    source: str, index: PackageIndex, imports_count_as_use: bool = True
) -> bool:
    """True when the source still references the indexed library.

    Imports without calls count as residual dependency by default; pass
    imports_count_as_use=False to require an actual resolved invocation.
    """
    return facts_depend_on(extract_facts(source), index, imports_count_as_use)
