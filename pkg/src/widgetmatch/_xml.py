"""Minimal XML reader that keeps source line numbers for diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from xml.parsers import expat

from .errors import FileError, FormatError


@dataclass
class Node:
    tag: str
    attrib: dict[str, str]
    line: int
    children: list[Node] = field(default_factory=list)

    def iter(self, tag: str):
        return (child for child in self.children if child.tag == tag)


def read_bytes(path) -> bytes:
    path = Path(path)
    try:
        return path.read_bytes()
    except FileNotFoundError:
        raise FileError(path, "no such file") from None
    except IsADirectoryError:
        raise FileError(path, "is a directory") from None
    except OSError as exc:
        raise FileError(path, exc.strerror or "unreadable") from None


def parse_xml(data: bytes, path=None) -> Node:
    parser = expat.ParserCreate()
    stack: list[Node] = []
    roots: list[Node] = []

    def start(tag, attrib):
        node = Node(tag, dict(attrib), parser.CurrentLineNumber)
        if stack:
            stack[-1].children.append(node)
        else:
            roots.append(node)
        stack.append(node)

    def end(tag):
        stack.pop()

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise FormatError(expat.ErrorString(exc.code), path, exc.lineno) from None
    return roots[0]


def load_xml(path) -> Node:
    return parse_xml(read_bytes(path), path)


def parse_bool(node: Node, attr: str, default: bool, path=None) -> bool:
    value = node.attrib.get(attr)
    if value is None:
        return default
    lowered = value.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise FormatError(f"<{node.tag} {attr}>: expected a boolean, got {value!r}", path, node.line)
