# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled Java token scanner.

Token-for-token identical to _scanner_py; any change there has to be
mirrored here.
"""

IDENT = 1
NUMBER = 2
STRING = 3
CHAR = 4
PUNCT = 5


def tokenize(str text):
    """Lex Java source into (kind, value, line) tuples.

    See _scanner_py.tokenize for the contract; this is the fast path.
    """
    cdef Py_ssize_t i = 0, start
    cdef Py_ssize_t n = len(text)
    cdef long line = 1
    cdef Py_UCS4 c, ch, prev
    toks = []
    while i < n:
        c = text[i]
        if c == u'\n':
            line += 1
            i += 1
            continue
        if c == u' ' or c == u'\t' or c == u'\r' or c == u'\f' or c == u'\x0b':
            i += 1
            continue
        if c == u'/':
            if i + 1 < n and text[i + 1] == u'/':
                i += 2
                while i < n and text[i] != u'\n':
                    i += 1
                continue
            if i + 1 < n and text[i + 1] == u'*':
                i += 2
                while i + 1 < n and not (text[i] == u'*' and text[i + 1] == u'/'):
                    if text[i] == u'\n':
                        line += 1
                    i += 1
                if i + 1 < n:
                    i += 2
                else:
                    if i < n and text[i] == u'\n':
                        line += 1
                    i = n
                continue
            toks.append((PUNCT, u'/', line))
            i += 1
            continue
        if c == u'"':
            if i + 2 < n and text[i + 1] == u'"' and text[i + 2] == u'"':
                start = line  # reuse as start_line
                i += 3
                while i < n:
                    ch = text[i]
                    if ch == u'\\':
                        if i + 1 < n and text[i + 1] == u'\n':
                            line += 1
                        i += 2
                        continue
                    if ch == u'"' and i + 2 < n and text[i + 1] == u'"' and text[i + 2] == u'"':
                        i += 3
                        break
                    if ch == u'\n':
                        line += 1
                    i += 1
                else:
                    i = n
                toks.append((STRING, u'', start))
                continue
            i += 1
            while i < n:
                ch = text[i]
                if ch == u'\\':
                    if i + 1 < n and text[i + 1] == u'\n':
                        line += 1
                    i += 2
                    continue
                if ch == u'"':
                    i += 1
                    break
                if ch == u'\n':
                    break
                i += 1
            toks.append((STRING, u'', line))
            continue
        if c == u"'":
            i += 1
            while i < n:
                ch = text[i]
                if ch == u'\\':
                    if i + 1 < n and text[i + 1] == u'\n':
                        line += 1
                    i += 2
                    continue
                if ch == u"'":
                    i += 1
                    break
                if ch == u'\n':
                    break
                i += 1
            toks.append((CHAR, u'', line))
            continue
        if u'0' <= c <= u'9':
            i += 1
            while i < n:
                ch = text[i]
                if (u'0' <= ch <= u'9' or u'a' <= ch <= u'z'
                        or u'A' <= ch <= u'Z' or ch == u'_' or ch == u'.'):
                    i += 1
                elif ch == u'+' or ch == u'-':
                    prev = text[i - 1]
                    if prev == u'e' or prev == u'E' or prev == u'p' or prev == u'P':
                        i += 1
                    else:
                        break
                else:
                    break
            toks.append((NUMBER, u'', line))
            continue
        if (u'a' <= c <= u'z' or u'A' <= c <= u'Z' or c == u'_'
                or c == u'$' or c > 127):
            start = i
            i += 1
            while i < n:
                ch = text[i]
                if (u'a' <= ch <= u'z' or u'A' <= ch <= u'Z'
                        or u'0' <= ch <= u'9' or ch == u'_' or ch == u'$'
                        or ch > 127):
                    i += 1
                else:
                    break
            toks.append((IDENT, text[start:i], line))
            continue
        toks.append((PUNCT, text[i], line))
        i += 1
    return toks
