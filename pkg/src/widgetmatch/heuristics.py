"""Window and widget matching heuristics, plus the priority-table generator."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Collection, Iterator

from ._xml import load_xml, parse_bool
from .errors import ConfigError, FormatError
from .model import GuiModel, Window
from .state import MatchResult, MatchState, WindowPair
from .textdiff import bounded_diff_ops

DEFAULT_MAX_OPS = 10


class CriterionKind(Enum):
    EQUALITY = "equality"
    SIMILARITY = "similarity"
    NULLITY = "nullity"


class HeuristicKind(Enum):
    WINDOW = "Window"
    PROPERTY_VALUES = "PropertyValues"
    PROPERTY_VALUES_HIERARCHY = "PropertyValuesHierarchy"
    SINGLETON = "Singleton"
    INVERSE_HIERARCHY = "InverseHierarchy"
    FINAL = "Final"


PROPERTY_VALUE_KINDS = (HeuristicKind.PROPERTY_VALUES, HeuristicKind.PROPERTY_VALUES_HIERARCHY)
WIDGET_KINDS = PROPERTY_VALUE_KINDS + (HeuristicKind.SINGLETON, HeuristicKind.INVERSE_HIERARCHY)


@dataclass(frozen=True)
class Criterion:
    kind: CriterionKind
    property: str
    max_ops: int | None = None

    def __post_init__(self) -> None:
        if not self.property:
            raise ConfigError("criterion needs a property name")
        if self.kind is CriterionKind.SIMILARITY:
            if self.max_ops is None or self.max_ops < 0:
                raise ConfigError(f"similarity on {self.property} needs maxOps >= 0")
        elif self.max_ops is not None:
            raise ConfigError(f"maxOps is only valid for similarity ({self.property})")

    def __str__(self) -> str:
        if self.kind is CriterionKind.EQUALITY:
            return f"{self.property}="
        if self.kind is CriterionKind.SIMILARITY:
            return f"{self.property}~{self.max_ops}"
        return f"{self.property}=null"


@dataclass(frozen=True)
class GenerationSpec:
    n_dp: int
    retained_rows: frozenset[int]


@dataclass(frozen=True)
class HeuristicSpec:
    kind: HeuristicKind
    criteria: tuple[Criterion, ...] = ()
    singleton_property: str | None = None
    priority: int = 1
    label: str = ""
    source: GenerationSpec | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "criteria", tuple(self.criteria))
        if self.kind in PROPERTY_VALUE_KINDS:
            if not self.criteria:
                raise ConfigError(f"{self.kind.value} heuristic needs at least one criterion")
        elif self.criteria:
            raise ConfigError(f"{self.kind.value} heuristic takes no criteria")
        if self.kind is HeuristicKind.SINGLETON and not self.singleton_property:
            raise ConfigError("Singleton heuristic needs a property")
        if self.kind is not HeuristicKind.SINGLETON and self.singleton_property:
            raise ConfigError(f"{self.kind.value} heuristic takes no singleton property")
        if self.priority < 1:
            raise ConfigError("priorities are positive integers")
        if not self.label:
            object.__setattr__(self, "label", self.describe())

    def describe(self) -> str:
        if self.kind in PROPERTY_VALUE_KINDS:
            return f"{self.kind.value}[{','.join(str(c) for c in self.criteria)}]"
        if self.kind is HeuristicKind.SINGLETON:
            return f"Singleton[{self.singleton_property}]"
        return self.kind.value

    def identity(self) -> tuple:
        """What the heuristic does, ignoring priority, label and origin."""
        return (self.kind, frozenset(self.criteria), self.singleton_property)

    def with_priority(self, priority: int) -> HeuristicSpec:
        return replace(self, priority=priority)


@dataclass(frozen=True)
class CandidateMatch:
    old_widget: str
    new_widget: str
    score: int = 0


# -- priority tables -------------------------------------------------------


@dataclass(frozen=True)
class Row:
    label: str
    entries: tuple[tuple[str, CriterionKind, int | None], ...] = ()
    hierarchical: bool = False

    @property
    def group(self) -> bool:
        return len(self.entries) > 1


@dataclass(frozen=True)
class PriorityTable:
    rows: tuple[Row, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        if sum(row.hierarchical for row in self.rows) > 1:
            raise ConfigError("at most one hierarchical row is allowed")
        for row in self.rows:
            if row.hierarchical and row.entries:
                raise ConfigError(f"row {row.label!r}: the hierarchical row carries no entries")
            if not row.hierarchical and not row.entries:
                raise ConfigError(f"row {row.label!r} has no entries")


def _row(label: str, *entries: tuple[str, CriterionKind]) -> Row:
    return Row(label, tuple((p, k, None) for p, k in entries))


EQ = CriterionKind.EQUALITY
SIM = CriterionKind.SIMILARITY

TABLE3 = PriorityTable(
    (
        Row("Hierarchical", (), True),
        _row("(diff) Icon", ("Icon", SIM)),
        _row("Icon", ("Icon", EQ)),
        _row("(diff) Text", ("Text", SIM)),
        _row("Class", ("Class", EQ)),
        _row("Text", ("Text", EQ)),
        _row("Accelerator", ("Accelerator", EQ)),
        _row("Index", ("Index", EQ)),
        _row("Width Height", ("Width", EQ), ("Height", EQ)),
        _row("X Y", ("X", EQ), ("Y", EQ)),
    )
)


def load_priority_table(path) -> PriorityTable:
    root = load_xml(path)
    if root.tag != "PriorityTable":
        raise FormatError(f"expected <PriorityTable>, got <{root.tag}>", path, root.line)
    rows = []
    for node in root.children:
        if node.tag != "Row":
            raise FormatError(f"unexpected <{node.tag}> in <PriorityTable>", path, node.line)
        label = node.attrib.get("label", "")
        hierarchical = parse_bool(node, "hierarchical", False, path)
        if label == "Hierarchical" and not node.children:
            hierarchical = True
        entries = []
        for entry in node.children:
            if entry.tag != "Entry":
                raise FormatError(f"unexpected <{entry.tag}> in <Row>", path, entry.line)
            prop = entry.attrib.get("property")
            if not prop:
                raise FormatError("<Entry> is missing a property", path, entry.line)
            try:
                kind = CriterionKind(entry.attrib.get("criterion", "equality").lower())
            except ValueError:
                raise FormatError(
                    f"unknown criterion {entry.attrib.get('criterion')!r}", path, entry.line
                ) from None
            max_ops = entry.attrib.get("maxOps")
            entries.append((prop, kind, None if max_ops is None else _nonneg(max_ops, entry, path)))
        try:
            rows.append(Row(label, tuple(entries), hierarchical))
        except ConfigError as exc:
            raise FormatError(str(exc), path, node.line) from None
    try:
        return PriorityTable(tuple(rows))
    except ConfigError as exc:
        raise FormatError(str(exc), path, root.line) from None


def _nonneg(text: str, node, path) -> int:
    try:
        value = int(text)
    except ValueError:
        value = -1
    if value < 0:
        raise FormatError(f"expected a non-negative integer, got {text!r}", path, node.line)
    return value


# -- generation ------------------------------------------------------------


def enumerate_generation(table: PriorityTable) -> Iterator[GenerationSpec]:
    """Retained-row sets from strictest to most permissive.

    For each count of disregarded rows, subsets are visited so that rows near
    the bottom of the table are dropped first.
    """
    n = len(table.rows)
    bottom_up = range(n - 1, -1, -1)
    for n_dp in range(0, n - 1):
        for dropped in itertools.combinations(bottom_up, n_dp):
            yield GenerationSpec(n_dp, frozenset(range(n)) - frozenset(dropped))


def spec_for_rows(
    table: PriorityTable, retained: frozenset[int], default_max_ops: int = DEFAULT_MAX_OPS
) -> HeuristicSpec:
    hierarchical = False
    equal: set[str] = set()
    pending: list[Criterion] = []
    for i in sorted(retained):
        row = table.rows[i]
        if row.hierarchical:
            hierarchical = True
            continue
        for prop, kind, max_ops in row.entries:
            if kind is CriterionKind.SIMILARITY:
                max_ops = default_max_ops if max_ops is None else max_ops
            else:
                max_ops = None
            pending.append(Criterion(kind, prop, max_ops))
            if kind is CriterionKind.EQUALITY:
                equal.add(prop)
    criteria = []
    for c in pending:
        # equality is stricter than similarity on the same property
        if c.kind is CriterionKind.SIMILARITY and c.property in equal:
            continue
        if c not in criteria:
            criteria.append(c)
    kind = HeuristicKind.PROPERTY_VALUES_HIERARCHY if hierarchical else HeuristicKind.PROPERTY_VALUES
    n_dp = len(table.rows) - len(retained)
    return HeuristicSpec(kind, tuple(criteria), source=GenerationSpec(n_dp, retained))


def generate_heuristic_set(
    table: PriorityTable, default_max_ops: int = DEFAULT_MAX_OPS, dedupe: bool = True
) -> list[HeuristicSpec]:
    if len(table.rows) < 3:
        raise ConfigError(f"priority table needs at least 3 rows, got {len(table.rows)}")
    if default_max_ops < 0:
        raise ConfigError("default max ops must be non-negative")
    specs = []
    seen = set()
    for gen in enumerate_generation(table):
        spec = spec_for_rows(table, gen.retained_rows, default_max_ops)
        if dedupe:
            key = spec.identity()
            if key in seen:
                continue
            seen.add(key)
        specs.append(spec)
    return [s.with_priority(i + 1) for i, s in enumerate(specs)]


# -- window matching -------------------------------------------------------


def match_windows(old: GuiModel, new: GuiModel) -> list[tuple[Window, Window]]:
    if len(old.windows) == 1 and len(new.windows) == 1:
        return [(old.windows[0], new.windows[0])]
    pairs = []
    old_root, new_root = old.root_window, new.root_window
    if old_root.title == new_root.title:
        pairs.append((old_root, new_root))
    taken_old = {w.id for w, _ in pairs}
    taken_new = {w.id for _, w in pairs}
    for a in old.windows:
        if a.id in taken_old or a.title is None:
            continue
        for b in new.windows:
            if b.id not in taken_new and b.title == a.title:
                pairs.append((a, b))
                taken_old.add(a.id)
                taken_new.add(b.id)
                break
    order = {w.id: i for i, w in enumerate(old.windows)}
    pairs.sort(key=lambda p: order[p[0].id])
    return pairs


# -- widget heuristics -----------------------------------------------------


def run_property_values(
    spec: HeuristicSpec,
    wp: WindowPair,
    state: MatchState,
    old_scope: Collection[str] | None = None,
    new_scope: Collection[str] | None = None,
) -> CandidateMatch | None:
    """Lowest-scoring eligible pair, ties broken by old then new document order.

    ``old_scope`` and ``new_scope`` optionally restrict the widgets examined;
    the engine uses them to re-check only what a recent commit could enable.
    """
    if spec.kind not in PROPERTY_VALUE_KINDS:
        raise ValueError(f"not a property-values heuristic: {spec.kind.value}")
    hierarchical = spec.kind is HeuristicKind.PROPERTY_VALUES_HIERARCHY
    equal = [c.property for c in spec.criteria if c.kind is CriterionKind.EQUALITY]
    similar = [(c.property, c.max_ops) for c in spec.criteria if c.kind is CriterionKind.SIMILARITY]
    null = [c.property for c in spec.criteria if c.kind is CriterionKind.NULLITY]
    present = equal + [p for p, _ in similar]

    def passes(widget) -> bool:
        props = widget.properties
        for p in present:
            if props.get(p) is None:
                return False
        for p in null:
            if props.get(p) is not None:
                return False
        return True

    buckets: dict[tuple, list] = {}
    for b in wp.new_widgets:
        if b.id in state.matched_new or (new_scope is not None and b.id not in new_scope):
            continue
        if not passes(b):
            continue
        parent = None
        if hierarchical:
            parent = wp.new_parent[b.id]
            if not state.is_new_anchored(parent):
                continue
        key = (parent, tuple(b.properties[p] for p in equal))
        buckets.setdefault(key, []).append(b)
    if not buckets:
        return None

    best: tuple[int, str, str] | None = None
    for a in wp.old_widgets:
        if a.id in state.maintained or (old_scope is not None and a.id not in old_scope):
            continue
        if not passes(a):
            continue
        parent = None
        if hierarchical:
            parent = state.counterpart(wp.old_parent[a.id])
            if parent is None:
                continue
        bucket = buckets.get((parent, tuple(a.properties[p] for p in equal)))
        if not bucket:
            continue
        if not similar:
            return CandidateMatch(a.id, bucket[0].id, 0)
        for b in bucket:
            # only a strictly lower score can displace the current best
            budget = None if best is None else best[0] - 1
            score = 0
            for prop, max_ops in similar:
                bound = max_ops if budget is None else min(max_ops, budget - score)
                ops = None if bound < 0 else bounded_diff_ops(a.properties[prop], b.properties[prop], bound)
                if ops is None:
                    score = None
                    break
                score += ops
            if score is None:
                continue
            best = (score, a.id, b.id)
            if score == 0:
                return CandidateMatch(a.id, b.id, 0)
    if best is None:
        return None
    return CandidateMatch(best[1], best[2], best[0])


def run_singleton(
    spec: HeuristicSpec,
    wp: WindowPair,
    state: MatchState,
    old_scope: Collection[str] | None = None,
) -> CandidateMatch | None:
    if spec.kind is not HeuristicKind.SINGLETON:
        raise ValueError(f"not a singleton heuristic: {spec.kind.value}")
    key = spec.singleton_property
    old_counts = wp.value_counts("old", key)
    new_counts = wp.value_counts("new", key)
    for a in wp.old_widgets:
        if a.id in state.maintained or (old_scope is not None and a.id not in old_scope):
            continue
        value = a.get(key)
        if value is None or old_counts[value] != 1 or new_counts.get(value) != 1:
            continue
        b = next(w for w in wp.new_widgets if w.get(key) == value)
        if b.id not in state.matched_new:
            return CandidateMatch(a.id, b.id, 0)
    return None


def run_inverse_hierarchy(
    wp: WindowPair, state: MatchState, old_scope: Collection[str] | None = None
) -> CandidateMatch | None:
    for a in wp.old_widgets:
        if not a.children or a.id in state.maintained:
            continue
        if old_scope is not None and a.id not in old_scope:
            continue
        parents = set()
        for child in a.children:
            mate = state.maintained.get(child.id)
            if mate is None:
                break
            parents.add(wp.new_parent[mate])
            if len(parents) > 1:
                break
        else:
            (target,) = parents
            b = wp.new_by_id[target]
            if (
                target in wp.new_pos
                and target not in state.matched_new
                and len(b.children) == len(a.children)
            ):
                return CandidateMatch(a.id, b.id, 0)
    return None


def run_widget_heuristic(
    spec: HeuristicSpec, wp: WindowPair, state: MatchState, old_scope=None, new_scope=None
) -> CandidateMatch | None:
    if spec.kind in PROPERTY_VALUE_KINDS:
        return run_property_values(spec, wp, state, old_scope, new_scope)
    if spec.kind is HeuristicKind.SINGLETON:
        return run_singleton(spec, wp, state, old_scope)
    if spec.kind is HeuristicKind.INVERSE_HIERARCHY:
        return run_inverse_hierarchy(wp, state, old_scope)
    raise ValueError(f"{spec.kind.value} is not a widget heuristic")


def finalize(state: MatchState) -> MatchResult:
    old_order = state.old_model.widget_ids()
    maintained = {a: state.maintained[a] for a in old_order if a in state.maintained}
    deleted = [a for a in old_order if a not in state.maintained]
    created = [b for b in state.new_model.widget_ids() if b not in state.matched_new]
    provenance = {(c.old, c.new): c.heuristic for c in state.trace}
    return MatchResult(maintained, deleted, created, provenance, list(state.trace))
