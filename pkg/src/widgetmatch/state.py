"""Evolving match state for one old/new model pair."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .model import GuiModel, Widget, Window


class WindowPair:
    """Two matched windows plus the lookup tables heuristics need.

    Built once per Phase-1 pair. Everything here is static; the mutable
    matching lives in :class:`MatchState`.
    """

    def __init__(self, index: int, old: Window, new: Window) -> None:
        self.index = index
        self.old = old
        self.new = new
        self.old_widgets: tuple[Widget, ...] = tuple(old.widgets())
        self.new_widgets: tuple[Widget, ...] = tuple(new.widgets())
        self.old_pos = {w.id: i for i, w in enumerate(self.old_widgets)}
        self.new_pos = {w.id: i for i, w in enumerate(self.new_widgets)}
        self.old_parent = _parents(old.root_widget)
        self.new_parent = _parents(new.root_widget)
        self.old_by_id = {w.id: w for w in old.root_widget.iter()}
        self.new_by_id = {w.id: w for w in new.root_widget.iter()}
        self._value_counts: dict[tuple[str, str], dict[str | None, int]] = {}

    def value_counts(self, side: str, key: str) -> dict[str | None, int]:
        """Occurrences of each value of ``key`` among the widgets on one side."""
        cache_key = (side, key)
        counts = self._value_counts.get(cache_key)
        if counts is None:
            widgets = self.old_widgets if side == "old" else self.new_widgets
            counts = {}
            for w in widgets:
                value = w.get(key)
                counts[value] = counts.get(value, 0) + 1
            self._value_counts[cache_key] = counts
        return counts

    def __repr__(self) -> str:
        return f"WindowPair({self.index}, {self.old.id!r} -> {self.new.id!r})"


def _parents(root: Widget) -> dict[str, str]:
    parent = {}
    for node in root.iter():
        for child in node.children:
            parent[child.id] = node.id
    return parent


@dataclass
class Commit:
    step: int
    window_pair: int
    old: str
    new: str
    heuristic: str
    priority: int
    score: int

    def as_dict(self) -> dict:
        return {
            "step": self.step,
            "window_pair": self.window_pair,
            "old": self.old,
            "new": self.new,
            "heuristic": self.heuristic,
            "priority": self.priority,
            "score": self.score,
        }


@dataclass
class MatchState:
    """Matched window pairs and the widget bijection built on top of them.

    Window roots of a matched pair act as matched parents for their
    top-level widgets but are never part of ``maintained``.
    """

    old_model: GuiModel
    new_model: GuiModel
    window_pairs: list[WindowPair]
    maintained: dict[str, str] = field(default_factory=dict)
    matched_new: dict[str, str] = field(default_factory=dict)
    trace: list[Commit] = field(default_factory=list)
    versions: list[int] = field(default_factory=list)
    passes: int = 0

    def __post_init__(self) -> None:
        self._anchor_old = {wp.old.id: wp.new.id for wp in self.window_pairs}
        self._anchor_new = {wp.new.id: wp.old.id for wp in self.window_pairs}
        if not self.versions:
            self.versions = [0] * len(self.window_pairs)

    @classmethod
    def start(cls, old: GuiModel, new: GuiModel, pairs: Iterable[tuple[Window, Window]]):
        window_pairs = [WindowPair(i, a, b) for i, (a, b) in enumerate(pairs)]
        return cls(old, new, window_pairs)

    def copy(self) -> MatchState:
        return MatchState(
            self.old_model,
            self.new_model,
            self.window_pairs,
            dict(self.maintained),
            dict(self.matched_new),
            list(self.trace),
            list(self.versions),
        )

    def is_old_matched(self, widget_id: str) -> bool:
        return widget_id in self.maintained

    def is_new_matched(self, widget_id: str) -> bool:
        return widget_id in self.matched_new

    def counterpart(self, old_id: str) -> str | None:
        """Matched new-side id of an old widget or window root."""
        found = self.maintained.get(old_id)
        if found is None:
            found = self._anchor_old.get(old_id)
        return found

    def is_new_anchored(self, new_id: str) -> bool:
        return new_id in self.matched_new or new_id in self._anchor_new

    def commit(
        self,
        window_pair: int,
        old_id: str,
        new_id: str,
        heuristic: str = "",
        priority: int = 0,
        score: int = 0,
    ) -> Commit:
        if old_id in self.maintained or new_id in self.matched_new:
            raise ValueError(f"widget already matched: {old_id!r} -> {new_id!r}")
        wp = self.window_pairs[window_pair]
        if old_id not in wp.old_pos or new_id not in wp.new_pos:
            raise ValueError(f"{old_id!r} -> {new_id!r} is outside window pair {window_pair}")
        self.maintained[old_id] = new_id
        self.matched_new[new_id] = old_id
        self.versions[window_pair] += 1
        entry = Commit(len(self.trace), window_pair, old_id, new_id, heuristic, priority, score)
        self.trace.append(entry)
        return entry

    def unmatched(self, wp: WindowPair) -> tuple[list[Widget], list[Widget]]:
        old = [w for w in wp.old_widgets if w.id not in self.maintained]
        new = [w for w in wp.new_widgets if w.id not in self.matched_new]
        return old, new


@dataclass
class MatchResult:
    """Final three-way partition of the widgets of a version pair."""

    maintained: dict[str, str]
    deleted: list[str]
    created: list[str]
    provenance: dict[tuple[str, str], str] = field(default_factory=dict)
    trace: list[Commit] = field(default_factory=list)
    ignored_old: list[str] = field(default_factory=list)
    ignored_new: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "maintained": [
                {"old": a, "new": b, "heuristic": self.provenance.get((a, b), "")}
                for a, b in self.maintained.items()
            ],
            "deleted": list(self.deleted),
            "created": list(self.created),
            "ignored": {"old": list(self.ignored_old), "new": list(self.ignored_new)},
            "trace": [c.as_dict() for c in self.trace],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> MatchResult:
        maintained = {}
        provenance = {}
        for item in doc["maintained"]:
            maintained[item["old"]] = item["new"]
            provenance[(item["old"], item["new"])] = item.get("heuristic", "")
        ignored = doc.get("ignored", {})
        return cls(
            maintained,
            list(doc["deleted"]),
            list(doc["created"]),
            provenance,
            [Commit(**c) for c in doc.get("trace", [])],
            list(ignored.get("old", [])),
            list(ignored.get("new", [])),
        )
