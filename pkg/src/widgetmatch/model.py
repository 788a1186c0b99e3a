"""GUI models: windows holding trees of property-mapped widgets.

A model file is XML (or a JSON mirror with the same field names)::

    <GUI version="1.0">
      <Window id="main" root="true">
        <Property name="Title" value="Editor"/>
        <Widget id="w1">
          <Property name="Class" value="javax.swing.JButton"/>
          <Property name="Text" value="Ok"/>
          <Property name="Icon"/>
        </Widget>
      </Window>
    </GUI>

A ``Property`` without a ``value`` attribute is null, and a null property is
indistinguishable from an absent one.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from ._xml import Node, parse_bool, parse_xml, read_bytes
from .errors import FormatError

CLASS = "Class"
TEXT = "Text"
ICON = "Icon"
ACCELERATOR = "Accelerator"
INDEX = "Index"
WIDTH = "Width"
HEIGHT = "Height"
X = "X"
Y = "Y"
TITLE = "Title"

GEOMETRY_KEYS = frozenset({X, Y, WIDTH, HEIGHT})


@dataclass(frozen=True, eq=True)
class Widget:
    id: str
    properties: Mapping[str, str | None] = field(default_factory=dict)
    children: tuple[Widget, ...] = ()

    def get(self, key: str) -> str | None:
        return self.properties.get(key)

    def iter(self) -> Iterator[Widget]:
        """Pre-order traversal, self first."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def descendants(self) -> Iterator[Widget]:
        it = self.iter()
        next(it)
        return it

    def same_properties(self, other: Widget) -> bool:
        """Compare property maps with absent and null treated alike."""
        keys = set(self.properties) | set(other.properties)
        return all(self.get(k) == other.get(k) for k in keys)


@dataclass(frozen=True, eq=True)
class Window:
    root_widget: Widget
    is_root: bool = False

    @property
    def id(self) -> str:
        return self.root_widget.id

    @property
    def title(self) -> str | None:
        return self.root_widget.get(TITLE)

    def widgets(self) -> Iterator[Widget]:
        """Widgets contained in the window, in document order."""
        return self.root_widget.descendants()


@dataclass(frozen=True, eq=True)
class GuiModel:
    windows: tuple[Window, ...]
    version_label: str = ""
    _index: dict = field(default=None, init=False, repr=False, compare=False)
    _parent: dict = field(default=None, init=False, repr=False, compare=False)
    _window: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "windows", tuple(self.windows))
        if not self.windows:
            raise FormatError("model has no windows")
        roots = [w.id for w in self.windows if w.is_root]
        if len(roots) != 1:
            raise FormatError(f"model must have exactly one root window, found {len(roots)}")
        index: dict[str, Widget] = {}
        parent: dict[str, str] = {}
        window_of: dict[str, Window] = {}
        for window in self.windows:
            for node in window.root_widget.iter():
                if node.id in index:
                    raise FormatError(f"duplicate id {node.id!r}")
                index[node.id] = node
                window_of[node.id] = window
                for child in node.children:
                    parent[child.id] = node.id
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_parent", parent)
        object.__setattr__(self, "_window", window_of)

    @property
    def root_window(self) -> Window:
        return next(w for w in self.windows if w.is_root)

    def widgets(self) -> Iterator[Widget]:
        """All widgets, window roots excluded, in document order."""
        for window in self.windows:
            yield from window.widgets()

    def widget_ids(self) -> list[str]:
        return [w.id for w in self.widgets()]

    @property
    def widget_count(self) -> int:
        return len(self._index) - len(self.windows)

    def lookup(self, widget_id: str) -> Widget | None:
        return self._index.get(widget_id)

    def parent_id(self, widget_id: str) -> str | None:
        return self._parent.get(widget_id)

    def window_of(self, widget_id: str) -> Window | None:
        return self._window.get(widget_id)

    def is_window_id(self, widget_id: str) -> bool:
        return any(w.id == widget_id for w in self.windows)


def widget_lookup(model: GuiModel, widget_id: str) -> Widget | None:
    return model.lookup(widget_id)


@dataclass(frozen=True)
class FilterConfig:
    """Class-name rules for widgets removed before matching.

    Delimiter classes are dropped with their subtree; composite classes are
    kept but lose all descendants.
    """

    delimiter_classes: frozenset[str] = frozenset()
    composite_classes: frozenset[str] = frozenset()
    enabled: bool = True


def apply_filters(model: GuiModel, cfg: FilterConfig) -> GuiModel:
    if not cfg.enabled:
        return GuiModel(model.windows, model.version_label)

    def rebuild(node: Widget) -> Widget:
        if node.get(CLASS) in cfg.composite_classes:
            return Widget(node.id, node.properties, ())
        kept = tuple(
            rebuild(child)
            for child in node.children
            if child.get(CLASS) not in cfg.delimiter_classes
        )
        return Widget(node.id, node.properties, kept)

    windows = tuple(Window(rebuild(w.root_widget), w.is_root) for w in model.windows)
    return GuiModel(windows, model.version_label)


def removed_ids(before: GuiModel, after: GuiModel) -> list[str]:
    """Ids present in ``before`` but not in ``after``, in document order."""
    return [wid for wid in before.widget_ids() if after.lookup(wid) is None]


def prune(model: GuiModel, ids: Iterable[str]) -> GuiModel:
    """Drop the widgets named by ``ids`` together with their subtrees."""
    drop = set(ids)
    if not drop:
        return model

    def rebuild(node: Widget) -> Widget:
        kept = tuple(rebuild(c) for c in node.children if c.id not in drop)
        return Widget(node.id, node.properties, kept)

    windows = tuple(Window(rebuild(w.root_widget), w.is_root) for w in model.windows)
    return GuiModel(windows, model.version_label)


# -- reading ---------------------------------------------------------------


def parse_model(file_path) -> GuiModel:
    path = Path(file_path)
    data = read_bytes(path)
    if path.suffix.lower() == ".json":
        return model_from_json(data, path)
    return model_from_xml(data, path)


def model_from_xml(data: bytes, path=None) -> GuiModel:
    root = parse_xml(data, path)
    if root.tag != "GUI":
        raise FormatError(f"expected <GUI> document element, got <{root.tag}>", path, root.line)
    seen: dict[str, int] = {}
    windows = []
    for node in root.children:
        if node.tag != "Window":
            raise FormatError(f"unexpected <{node.tag}> inside <GUI>", path, node.line)
        is_root = parse_bool(node, "root", False, path)
        windows.append(Window(_widget_from_node(node, path, seen), is_root))
    if not windows:
        raise FormatError("model has no windows", path, root.line)
    roots = [w for w in windows if w.is_root]
    if len(roots) != 1:
        raise FormatError(
            f"model must have exactly one root window, found {len(roots)}", path, root.line
        )
    return GuiModel(tuple(windows), root.attrib.get("version", ""))


def _widget_from_node(node: Node, path, seen: dict[str, int]) -> Widget:
    widget_id = node.attrib.get("id")
    if not widget_id:
        raise FormatError(f"<{node.tag}> is missing an id", path, node.line)
    if widget_id in seen:
        raise FormatError(
            f"duplicate id {widget_id!r} (first defined on line {seen[widget_id]})",
            path,
            node.line,
        )
    seen[widget_id] = node.line
    properties: dict[str, str | None] = {}
    children = []
    for child in node.children:
        if child.tag == "Property":
            name = child.attrib.get("name")
            if not name:
                raise FormatError("<Property> is missing a name", path, child.line)
            if name in properties:
                raise FormatError(
                    f"duplicate property {name!r} on {widget_id!r}", path, child.line
                )
            properties[name] = child.attrib.get("value")
        elif child.tag == "Widget":
            children.append(_widget_from_node(child, path, seen))
        else:
            raise FormatError(f"unexpected <{child.tag}> inside <{node.tag}>", path, child.line)
    return Widget(widget_id, properties, tuple(children))


def model_from_json(data: bytes, path=None) -> GuiModel:
    try:
        doc = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise FormatError(f"not UTF-8: {exc.reason}", path) from None
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, path, exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("windows"), list):
        raise FormatError("expected an object with a 'windows' array", path)
    seen: set[str] = set()
    windows = []
    for i, item in enumerate(doc["windows"]):
        where = f"windows[{i}]"
        if not isinstance(item, dict):
            raise FormatError(f"{where}: expected an object", path)
        is_root = item.get("root", False)
        if not isinstance(is_root, bool):
            raise FormatError(f"{where}.root: expected a boolean", path)
        windows.append(Window(_widget_from_json(item, where, path, seen), is_root))
    if not windows:
        raise FormatError("model has no windows", path)
    roots = [w for w in windows if w.is_root]
    if len(roots) != 1:
        raise FormatError(f"model must have exactly one root window, found {len(roots)}", path)
    version = doc.get("version", "")
    if not isinstance(version, str):
        raise FormatError("version: expected a string", path)
    return GuiModel(tuple(windows), version)


def _widget_from_json(item, where: str, path, seen: set[str]) -> Widget:
    if not isinstance(item, dict):
        raise FormatError(f"{where}: expected an object", path)
    widget_id = item.get("id")
    if not isinstance(widget_id, str) or not widget_id:
        raise FormatError(f"{where}: missing id", path)
    if widget_id in seen:
        raise FormatError(f"{where}: duplicate id {widget_id!r}", path)
    seen.add(widget_id)
    props = item.get("properties", {})
    if not isinstance(props, dict):
        raise FormatError(f"{where}.properties: expected an object", path)
    for name, value in props.items():
        if not name:
            raise FormatError(f"{where}.properties: empty property name", path)
        if value is not None and not isinstance(value, str):
            raise FormatError(f"{where}.properties.{name}: expected a string or null", path)
    children = item.get("children", [])
    if not isinstance(children, list):
        raise FormatError(f"{where}.children: expected an array", path)
    kids = tuple(
        _widget_from_json(child, f"{where}.children[{j}]", path, seen)
        for j, child in enumerate(children)
    )
    return Widget(widget_id, dict(props), kids)


# -- writing ---------------------------------------------------------------


def model_to_xml(model: GuiModel) -> bytes:
    root = ET.Element("GUI", {"version": model.version_label})
    for window in model.windows:
        elem = ET.SubElement(
            root, "Window", {"id": window.id, "root": "true" if window.is_root else "false"}
        )
        _fill_element(elem, window.root_widget)
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def _fill_element(elem: ET.Element, widget: Widget) -> None:
    for name, value in widget.properties.items():
        attrs = {"name": name}
        if value is not None:
            attrs["value"] = value
        ET.SubElement(elem, "Property", attrs)
    for child in widget.children:
        _fill_element(ET.SubElement(elem, "Widget", {"id": child.id}), child)


def model_to_json(model: GuiModel) -> bytes:
    def encode(widget: Widget) -> dict:
        return {
            "id": widget.id,
            "properties": dict(widget.properties),
            "children": [encode(c) for c in widget.children],
        }

    doc = {
        "version": model.version_label,
        "windows": [
            {**encode(w.root_widget), "root": w.is_root} for w in model.windows
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def serialize_model(model: GuiModel, fmt: str = "xml") -> bytes:
    if fmt == "json":
        return model_to_json(model)
    if fmt == "xml":
        return model_to_xml(model)
    raise ValueError(f"unknown model format {fmt!r}")


def format_for_path(path) -> str:
    return "json" if Path(path).suffix.lower() == ".json" else "xml"
