"""Token scanner backend selection.

Prefers the compiled extension, falls back to the pure-Python scanner.
Set MIGMINE_PURE=1 before import to force the fallback.
"""

import os

from . import _scanner_py

IDENT = _scanner_py.IDENT
NUMBER = _scanner_py.NUMBER
STRING = _scanner_py.STRING
CHAR = _scanner_py.CHAR
PUNCT = _scanner_py.PUNCT

if os.environ.get("MIGMINE_PURE"):
    _impl = _scanner_py
    BACKEND = "python"
else:
    try:
        from . import _scanner as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        _impl = _scanner_py
        BACKEND = "python"

tokenize = _impl.tokenize
