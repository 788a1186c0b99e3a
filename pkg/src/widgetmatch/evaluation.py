"""Oracle-based accuracy metrics for a match result."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from ._xml import read_bytes
from .errors import ConsistencyError, FormatError
from .model import GEOMETRY_KEYS, GuiModel, Widget
from .state import MatchResult


@dataclass
class Oracle:
    maintained: dict[str, str] = field(default_factory=dict)
    deleted: list[str] = field(default_factory=list)
    created: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "maintained": [{"old": a, "new": b} for a, b in self.maintained.items()],
            "deleted": list(self.deleted),
            "created": list(self.created),
        }

    @classmethod
    def from_dict(cls, doc, path=None) -> Oracle:
        if not isinstance(doc, dict):
            raise FormatError("oracle must be a JSON object", path)
        for key in ("maintained", "deleted", "created"):
            if not isinstance(doc.get(key), list):
                raise FormatError(f"oracle needs a {key!r} array", path)
        maintained: dict[str, str] = {}
        for i, item in enumerate(doc["maintained"]):
            if not isinstance(item, dict) or not all(
                isinstance(item.get(k), str) for k in ("old", "new")
            ):
                raise FormatError(f"maintained[{i}]: expected {{'old': id, 'new': id}}", path)
            if item["old"] in maintained:
                raise ConsistencyError(f"old widget {item['old']!r} is assigned twice")
            maintained[item["old"]] = item["new"]
        for key in ("deleted", "created"):
            if not all(isinstance(x, str) for x in doc[key]):
                raise FormatError(f"{key}: expected an array of ids", path)
        return cls(maintained, list(doc["deleted"]), list(doc["created"]))

    @classmethod
    def from_result(cls, result: MatchResult) -> Oracle:
        return cls(dict(result.maintained), list(result.deleted), list(result.created))

    def without(self, old_ids: Iterable[str] = (), new_ids: Iterable[str] = ()) -> Oracle:
        """Project onto models from which the given widgets were removed.

        A pair that loses one side turns its surviving side into a deletion
        or creation.
        """
        drop_old, drop_new = set(old_ids), set(new_ids)
        maintained, deleted, created = {}, [], []
        for a, b in self.maintained.items():
            if a in drop_old and b in drop_new:
                continue
            if a in drop_old:
                created.append(b)
            elif b in drop_new:
                deleted.append(a)
            else:
                maintained[a] = b
        deleted += [a for a in self.deleted if a not in drop_old]
        created += [b for b in self.created if b not in drop_new]
        return Oracle(maintained, deleted, created)


def check_partition(
    maintained: Mapping[str, str],
    deleted: Iterable[str],
    created: Iterable[str],
    old: GuiModel,
    new: GuiModel,
    what: str = "oracle",
) -> None:
    """Raise ConsistencyError unless the three sets partition both models' widgets."""
    for side, model, ids in (
        ("old", old, list(maintained.keys()) + list(deleted)),
        ("new", new, list(maintained.values()) + list(created)),
    ):
        seen = set()
        for wid in ids:
            if wid in seen:
                raise ConsistencyError(f"{what}: {side} widget {wid!r} is assigned twice")
            seen.add(wid)
            if model.lookup(wid) is None or model.is_window_id(wid):
                raise ConsistencyError(f"{what}: unknown {side} widget {wid!r}")
        missing = [wid for wid in model.widget_ids() if wid not in seen]
        if missing:
            raise ConsistencyError(
                f"{what}: {side} widget {missing[0]!r} is not assigned"
                + (f" (and {len(missing) - 1} more)" if len(missing) > 1 else "")
            )


def load_oracle(file, old: GuiModel, new: GuiModel) -> Oracle:
    path = Path(file)
    try:
        doc = json.loads(read_bytes(path).decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise FormatError(f"not UTF-8: {exc.reason}", path) from None
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, path, exc.lineno) from None
    oracle = Oracle.from_dict(doc, path)
    check_partition(oracle.maintained, oracle.deleted, oracle.created, old, new)
    return oracle


def is_dissimilar(a: Widget, b: Widget) -> bool:
    """True when some property other than position or size differs."""
    keys = (set(a.properties) | set(b.properties)) - GEOMETRY_KEYS
    return any(a.get(k) != b.get(k) for k in keys)


def dissimilar_pairs(oracle: Oracle, old: GuiModel, new: GuiModel) -> set[tuple[str, str]]:
    return {
        (a, b)
        for a, b in oracle.maintained.items()
        if is_dissimilar(old.lookup(a), new.lookup(b))
    }


def base_counts(
    oracle: Oracle, old: GuiModel, new: GuiModel, pair_weight: int = 1
) -> tuple[int, int, int]:
    """CDC, CMC and DWC from the oracle alone.

    ``pair_weight`` is how many dissimilar widgets one dissimilar maintained
    pair counts as.
    """
    cmc = len(oracle.maintained)
    cdc = cmc + len(oracle.deleted) + len(oracle.created)
    dwc = len(oracle.deleted) + len(oracle.created)
    dwc += pair_weight * len(dissimilar_pairs(oracle, old, new))
    return cdc, cmc, dwc


def _rate(part: int, whole: int) -> Fraction:
    return Fraction(1) if whole == 0 else Fraction(part, whole)


def percent(rate: Fraction) -> str:
    """Two-decimal percentage, rounding half up."""
    hundredths = rate * 10000
    q = (hundredths.numerator * 2 + hundredths.denominator) // (2 * hundredths.denominator)
    return f"{q // 100}.{q % 100:02d}"


@dataclass(frozen=True)
class MetricsReport:
    cdc: int
    cmc: int
    dwc: int
    hcdc: int
    hcmc: int
    hcddwc: int
    hdc: int = 0
    hmc: int = 0

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"{f.name} must be a non-negative integer, got {value!r}")
        if self.hcdc > self.cdc or self.hcmc > self.cmc or self.hcddwc > self.dwc:
            raise ValueError("heuristic counts cannot exceed their oracle counterparts")
        if self.hcmc > self.hcdc:
            raise ValueError("hcmc cannot exceed hcdc")

    @property
    def hdr(self) -> Fraction:
        return _rate(self.hcdc, self.cdc)

    @property
    def hmr(self) -> Fraction:
        return _rate(self.hcmc, self.cmc)

    @property
    def hdwdr(self) -> Fraction:
        return _rate(self.hcddwc, self.dwc)

    def __add__(self, other: MetricsReport) -> MetricsReport:
        return MetricsReport(
            *(getattr(self, f.name) + getattr(other, f.name) for f in fields(self))
        )

    def to_dict(self) -> dict:
        doc = {f.name: getattr(self, f.name) for f in fields(self)}
        doc.update(hdr=percent(self.hdr), hmr=percent(self.hmr), hdwdr=percent(self.hdwdr))
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> MetricsReport:
        return cls(**{f.name: int(doc.get(f.name, 0)) for f in fields(cls)})


def aggregate(reports: Iterable[MetricsReport]) -> MetricsReport:
    total = MetricsReport(0, 0, 0, 0, 0, 0)
    for r in reports:
        total = total + r
    return total


def evaluate(
    result: MatchResult, oracle: Oracle, old: GuiModel, new: GuiModel, pair_weight: int = 1
) -> MetricsReport:
    check_partition(result.maintained, result.deleted, result.created, old, new, "result")
    check_partition(oracle.maintained, oracle.deleted, oracle.created, old, new, "oracle")
    cdc, cmc, dwc = base_counts(oracle, old, new, pair_weight)
    dissimilar = dissimilar_pairs(oracle, old, new)

    correct_pairs = {(a, b) for a, b in result.maintained.items() if oracle.maintained.get(a) == b}
    correct_deleted = set(result.deleted) & set(oracle.deleted)
    correct_created = set(result.created) & set(oracle.created)
    hcmc = len(correct_pairs)
    hcdc = hcmc + len(correct_deleted) + len(correct_created)
    hcddwc = len(correct_deleted) + len(correct_created)
    hcddwc += pair_weight * len(correct_pairs & dissimilar)
    hmc = len(result.maintained)
    hdc = hmc + len(result.deleted) + len(result.created)
    return MetricsReport(cdc, cmc, dwc, hcdc, hcmc, hcddwc, hdc, hmc)


ROW_LABELS = (
    ("Correct Decision Count", "cdc"),
    ("Correct Match Count", "cmc"),
    ("Dissimilar Widget Count", "dwc"),
    ("Heuristic Decision Count", "hdc"),
    ("Heuristic Match Count", "hmc"),
    ("Heuristic Correct Decision Count", "hcdc"),
    ("Heuristic Correct Match Count", "hcmc"),
    ("Heuristic Correct Decision in Dissimilar Widgets Count", "hcddwc"),
    ("Heuristic Decision Rate", "hdr"),
    ("Heuristic Match Rate", "hmr"),
    ("Heuristic Dissimilar Widget Decision Rate", "hdwdr"),
)


def format_table(columns: Mapping[str, MetricsReport]) -> str:
    header = ["Measurement", *columns]
    rows = [header]
    for label, attr in ROW_LABELS:
        cells = [label]
        for report in columns.values():
            value = getattr(report, attr)
            cells.append(f"{percent(value)}%" if isinstance(value, Fraction) else str(value))
        rows.append(cells)
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for r in rows:
        first = r[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join([first, *rest]).rstrip())
    return "\n".join(lines) + "\n"


CONSISTENCY_BUCKETS = (
    ("100%", Fraction(1)),
    ("above 95%", Fraction(95, 100)),
    ("above 90%", Fraction(90, 100)),
    ("above 80%", Fraction(80, 100)),
)


def consistency(reports: Iterable[MetricsReport]) -> dict[str, dict[str, int]]:
    """Per threshold, how many version pairs reach it for each rate."""
    reports = list(reports)
    table = {}
    for name, threshold in CONSISTENCY_BUCKETS:
        table[name] = {
            "hdr": sum(r.hdr >= threshold for r in reports),
            "hmr": sum(r.hmr >= threshold for r in reports),
            "hdwdr": sum(r.hdwdr >= threshold for r in reports),
        }
    return table


def format_consistency(table: Mapping[str, Mapping[str, int]], title: str = "Pairs") -> str:
    header = [title, "Decision Rate", "Match Rate", "Dissimilar Decision Rate"]
    rows = [header] + [
        [name, str(c["hdr"]), str(c["hmr"]), str(c["hdwdr"])] for name, c in table.items()
    ]
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return "\n".join(
        "  ".join([r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])])
        for r in rows
    ) + "\n"
