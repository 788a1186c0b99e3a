"""Three-phase matching: windows, widgets under a strategy, finalization."""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Sequence

from ._xml import Node, load_xml, parse_bool
from .errors import ConfigError, FormatError
from .heuristics import (
    DEFAULT_MAX_OPS,
    TABLE3,
    WIDGET_KINDS,
    CandidateMatch,
    Criterion,
    CriterionKind,
    HeuristicKind,
    HeuristicSpec,
    finalize,
    generate_heuristic_set,
    load_priority_table,
    match_windows,
    run_widget_heuristic,
)
from .model import FilterConfig, GuiModel, apply_filters, removed_ids
from .state import Commit, MatchResult, MatchState, WindowPair

__all__ = [
    "MatchResult",
    "MatchState",
    "PipelineConfig",
    "Strategy",
    "default_config",
    "default_config_path",
    "execute",
    "load_config",
    "run_cyclic",
    "run_priority",
]

log = logging.getLogger("widgetmatch")


class Strategy(Enum):
    CYCLIC = "cyclic"
    PRIORITY = "priority"


@dataclass(frozen=True)
class PipelineConfig:
    heuristic_specs: tuple[HeuristicSpec, ...]
    strategy: Strategy = Strategy.PRIORITY
    filter: FilterConfig = field(default_factory=FilterConfig)
    default_max_ops: int = DEFAULT_MAX_OPS

    def __post_init__(self) -> None:
        object.__setattr__(self, "heuristic_specs", tuple(self.heuristic_specs))
        if not isinstance(self.strategy, Strategy):
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        kinds = [s.kind for s in self.heuristic_specs]
        for required in (HeuristicKind.WINDOW, HeuristicKind.FINAL):
            if kinds.count(required) != 1:
                raise ConfigError(
                    f"pipeline needs exactly one {required.value} heuristic, found {kinds.count(required)}"
                )
        priorities = [s.priority for s in self.heuristic_specs]
        if len(set(priorities)) != len(priorities):
            raise ConfigError("heuristic priorities must be unique")

    @property
    def widget_specs(self) -> list[HeuristicSpec]:
        """Widget heuristics in descending accuracy (ascending priority number)."""
        specs = [s for s in self.heuristic_specs if s.kind in WIDGET_KINDS]
        return sorted(specs, key=lambda s: s.priority)


def build_pipeline(
    widget_specs: Sequence[HeuristicSpec],
    strategy: Strategy = Strategy.PRIORITY,
    filter: FilterConfig | None = None,
    default_max_ops: int = DEFAULT_MAX_OPS,
) -> PipelineConfig:
    """Wrap widget heuristics with the Window and Final heuristics, renumbering priorities."""
    ordered = (
        [HeuristicSpec(HeuristicKind.WINDOW)]
        + list(widget_specs)
        + [HeuristicSpec(HeuristicKind.FINAL)]
    )
    specs = tuple(s.with_priority(i + 1) for i, s in enumerate(ordered))
    return PipelineConfig(specs, strategy, filter or FilterConfig(), default_max_ops)


# -- phase 2 -----------------------------------------------------------------


class _Runner:
    """Evaluates (heuristic, window pair) cells, remembering which came up empty.

    A commit only removes widgets from the unmatched pool, so an empty
    PropertyValues or Singleton cell stays empty. Hierarchical cells can only
    gain pairs among children of newly matched widgets, and InverseHierarchy
    cells among their parents; those are re-checked on just that scope.
    """

    def __init__(self, specs: Sequence[HeuristicSpec], state: MatchState, use_cache: bool = True):
        self.specs = list(specs)
        self.state = state
        self.use_cache = use_cache
        self._empty: dict[tuple[int, int], int] = {}
        self._commits: list[list[Commit]] = [[] for _ in state.window_pairs]

    def find(self, i: int, wp: WindowPair) -> CandidateMatch | None:
        spec = self.specs[i]
        commits = self._commits[wp.index]
        seen = self._empty.get((i, wp.index)) if self.use_cache else None
        if seen is None:
            found = run_widget_heuristic(spec, wp, self.state)
        elif seen == len(commits):
            return None
        elif spec.kind is HeuristicKind.PROPERTY_VALUES_HIERARCHY:
            fresh = commits[seen:]
            old_scope = {c.id for e in fresh for c in wp.old_by_id[e.old].children}
            new_scope = {c.id for e in fresh for c in wp.new_by_id[e.new].children}
            found = run_widget_heuristic(spec, wp, self.state, old_scope, new_scope)
        elif spec.kind is HeuristicKind.INVERSE_HIERARCHY:
            old_scope = {wp.old_parent[e.old] for e in commits[seen:]}
            found = run_widget_heuristic(spec, wp, self.state, old_scope)
        else:
            return None
        if found is None:
            self._empty[(i, wp.index)] = len(commits)
        return found

    def commit(self, i: int, wp: WindowPair, found: CandidateMatch) -> None:
        spec = self.specs[i]
        entry = self.state.commit(
            wp.index, found.old_widget, found.new_widget, spec.label, spec.priority, found.score
        )
        self._commits[wp.index].append(entry)
        log.debug(
            "commit #%d %s -> %s by %s (score %d)",
            entry.step, entry.old, entry.new, spec.label, entry.score,
        )


def run_cyclic(specs: Sequence[HeuristicSpec], state: MatchState, use_cache: bool = True) -> MatchState:
    runner = _Runner(specs, state, use_cache)
    while True:
        state.passes += 1
        committed = 0
        for i in range(len(runner.specs)):
            for wp in state.window_pairs:
                found = runner.find(i, wp)
                if found is not None:
                    runner.commit(i, wp, found)
                    committed += 1
        log.info("cyclic sweep %d: %d matches", state.passes, committed)
        if not committed:
            return state


def run_priority(specs: Sequence[HeuristicSpec], state: MatchState, use_cache: bool = True) -> MatchState:
    runner = _Runner(specs, state, use_cache)
    while True:
        state.passes += 1
        for i in range(len(runner.specs)):
            found = None
            for wp in state.window_pairs:
                found = runner.find(i, wp)
                if found is not None:
                    runner.commit(i, wp, found)
                    break
            if found is not None:
                break
        else:
            return state


def execute(
    old: GuiModel, new: GuiModel, config: PipelineConfig, use_cache: bool = True
) -> MatchResult:
    old_f = apply_filters(old, config.filter)
    new_f = apply_filters(new, config.filter)

    pairs = match_windows(old_f, new_f)
    log.info("matched %d window pair(s)", len(pairs))
    state = MatchState.start(old_f, new_f, pairs)

    specs = config.widget_specs
    if config.strategy is Strategy.PRIORITY:
        run_priority(specs, state, use_cache)
    else:
        run_cyclic(specs, state, use_cache)

    result = finalize(state)
    result.ignored_old = removed_ids(old, old_f)
    result.ignored_new = removed_ids(new, new_f)
    log.info(
        "maintained %d, deleted %d, created %d",
        len(result.maintained), len(result.deleted), len(result.created),
    )
    return result


# -- configuration files -----------------------------------------------------


def default_config_path() -> Path:
    return Path(str(resources.files("widgetmatch") / "data" / "default_config.xml"))


def default_config() -> PipelineConfig:
    return load_config(default_config_path())


def _int_attr(node: Node, name: str, path, default=None, minimum: int = 0):
    raw = node.attrib.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{path}:{node.line}: {name}={raw!r} is not an integer") from None
    if value < minimum:
        raise ConfigError(f"{path}:{node.line}: {name} must be >= {minimum}")
    return value


def _filters(node: Node, path) -> FilterConfig:
    delimiters, composites = set(), set()
    for child in node.children:
        cls = child.attrib.get("class")
        if not cls:
            raise ConfigError(f"{path}:{child.line}: <{child.tag}> needs a class attribute")
        if child.tag == "Delimiter":
            delimiters.add(cls)
        elif child.tag == "Composite":
            composites.add(cls)
        else:
            raise ConfigError(f"{path}:{child.line}: unexpected <{child.tag}> in <Filters>")
    enabled = parse_bool(node, "enabled", True, path)
    return FilterConfig(frozenset(delimiters), frozenset(composites), enabled)


def _heuristic(node: Node, path, default_max_ops: int) -> HeuristicSpec:
    raw_kind = node.attrib.get("kind", "")
    try:
        kind = HeuristicKind(raw_kind)
    except ValueError:
        raise ConfigError(f"{path}:{node.line}: unknown heuristic kind {raw_kind!r}") from None
    criteria = []
    for child in node.children:
        if child.tag != "Criterion":
            raise ConfigError(f"{path}:{child.line}: unexpected <{child.tag}> in <Heuristic>")
        try:
            ckind = CriterionKind(child.attrib.get("kind", "").lower())
        except ValueError:
            raise ConfigError(
                f"{path}:{child.line}: unknown criterion kind {child.attrib.get('kind')!r}"
            ) from None
        max_ops = _int_attr(child, "maxOps", path)
        if ckind is CriterionKind.SIMILARITY and max_ops is None:
            max_ops = default_max_ops
        try:
            criteria.append(Criterion(ckind, child.attrib.get("property", ""), max_ops))
        except ConfigError as exc:
            raise ConfigError(f"{path}:{child.line}: {exc}") from None
    try:
        return HeuristicSpec(
            kind,
            tuple(criteria),
            node.attrib.get("property"),
            _int_attr(node, "priority", path, 1, minimum=1),
            node.attrib.get("label", ""),
        )
    except ConfigError as exc:
        raise ConfigError(f"{path}:{node.line}: {exc}") from None


def _generated(node: Node, path, default_max_ops: int) -> list[HeuristicSpec]:
    ref = node.attrib.get("tableRef")
    if not ref:
        raise ConfigError(f"{path}:{node.line}: <Generate> needs a tableRef")
    if ref == "builtin:table3":
        table = TABLE3
    else:
        table_path = Path(ref)
        if not table_path.is_absolute():
            table_path = Path(path).parent / table_path
        table = load_priority_table(table_path)
    max_ops = _int_attr(node, "maxOps", path, default_max_ops)
    specs = generate_heuristic_set(table, max_ops)
    start = _int_attr(node, "start", path, 0)
    stop = _int_attr(node, "stop", path, len(specs))
    return specs[start:stop]


def load_config(path) -> PipelineConfig:
    """Read a ``<HeuristicProcess>`` pipeline file.

    Widget heuristics run in document order, with ``<Generate>`` blocks
    spliced in place. Explicit ``priority`` attributes reorder them instead,
    but only in files without ``<Generate>`` and only when every widget
    heuristic carries one.
    """
    try:
        root = load_xml(path)
    except FormatError as exc:
        raise ConfigError(str(exc)) from None
    if root.tag != "HeuristicProcess":
        raise ConfigError(f"{path}:{root.line}: expected <HeuristicProcess>, got <{root.tag}>")
    raw_strategy = root.attrib.get("strategy", "priority").lower()
    try:
        strategy = Strategy(raw_strategy)
    except ValueError:
        raise ConfigError(f"{path}:{root.line}: unknown strategy {raw_strategy!r}") from None
    default_max_ops = _int_attr(root, "defaultMaxOps", path, DEFAULT_MAX_OPS)

    filt = FilterConfig(enabled=False)
    window = final = None
    widget_specs: list[HeuristicSpec] = []
    explicit: list[bool] = []
    has_generate = False
    for node in root.children:
        if node.tag == "Filters":
            filt = _filters(node, path)
        elif node.tag == "Generate":
            has_generate = True
            widget_specs.extend(_generated(node, path, default_max_ops))
        elif node.tag == "Heuristic":
            spec = _heuristic(node, path, default_max_ops)
            if spec.kind is HeuristicKind.WINDOW:
                if window is not None:
                    raise ConfigError(f"{path}:{node.line}: more than one Window heuristic")
                window = spec
            elif spec.kind is HeuristicKind.FINAL:
                if final is not None:
                    raise ConfigError(f"{path}:{node.line}: more than one Final heuristic")
                final = spec
            else:
                widget_specs.append(spec)
                explicit.append("priority" in node.attrib)
        else:
            raise ConfigError(f"{path}:{node.line}: unexpected <{node.tag}> in <HeuristicProcess>")
    if window is None or final is None:
        raise ConfigError(f"{path}: pipeline needs one Window and one Final heuristic")

    if explicit and all(explicit):
        if has_generate:
            raise ConfigError(f"{path}: priority attributes cannot be combined with <Generate>")
        priorities = [s.priority for s in widget_specs]
        if len(set(priorities)) != len(priorities):
            raise ConfigError(f"{path}: heuristic priorities must be unique")
        widget_specs.sort(key=lambda s: s.priority)
    elif any(explicit):
        raise ConfigError(f"{path}: either every widget heuristic has a priority or none does")

    return build_pipeline(widget_specs, strategy, filt, default_max_ops)


def config_to_xml(config: PipelineConfig) -> bytes:
    root = ET.Element(
        "HeuristicProcess",
        {"strategy": config.strategy.value, "defaultMaxOps": str(config.default_max_ops)},
    )
    filt = ET.SubElement(root, "Filters", {"enabled": "true" if config.filter.enabled else "false"})
    for cls in sorted(config.filter.delimiter_classes):
        ET.SubElement(filt, "Delimiter", {"class": cls})
    for cls in sorted(config.filter.composite_classes):
        ET.SubElement(filt, "Composite", {"class": cls})
    for spec in sorted(config.heuristic_specs, key=lambda s: s.priority):
        attrs = {"kind": spec.kind.value, "priority": str(spec.priority)}
        if spec.singleton_property:
            attrs["property"] = spec.singleton_property
        elem = ET.SubElement(root, "Heuristic", attrs)
        for c in spec.criteria:
            cattrs = {"property": c.property, "kind": c.kind.value}
            if c.max_ops is not None:
                cattrs["maxOps"] = str(c.max_ops)
            ET.SubElement(elem, "Criterion", cattrs)
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"
