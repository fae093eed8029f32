"""Reading and writing of the plain-text ``key=value`` files used throughout.

Manifests, detector configs, and scenario files all share one discipline:
UTF-8 text, one ``key=value`` per line, ``#`` starts a comment, blank lines
are ignored.  Keys may repeat (scenario timelines rely on repeated ``item=``
lines), so the low-level API works on ordered pairs rather than dicts.
"""

from __future__ import annotations

import os


def parse_pairs(text: str) -> list[tuple[str, str]]:
    """Parse key=value lines into an ordered list of (key, value) pairs."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    return pairs


def read_pairs(path: str | os.PathLike) -> list[tuple[str, str]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pairs(fh.read())


def format_pairs(pairs) -> str:
    return "".join(f"{k}={v}\n" for k, v in pairs)


def write_pairs(path: str | os.PathLike, pairs) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_pairs(pairs))
