"""Fixture builders and independent checking oracles shared by the tests."""

from __future__ import annotations

import itertools
from collections import Counter

from widgetmatch.heuristics import CriterionKind, HeuristicKind, match_windows, run_widget_heuristic
from widgetmatch.model import GuiModel, Widget, Window
from widgetmatch.state import MatchResult, MatchState

SWING = "javax.swing."


def w(wid: str, cls: str = "JButton", *children: Widget, **props) -> Widget:
    """Widget with ``Class`` set to a Swing class; keyword props become properties."""
    properties = {"Class": SWING + cls}
    properties.update(props)
    return Widget(wid, properties, tuple(children))


def window(wid: str, title: str | None, *children: Widget, root: bool = False) -> Window:
    props = {"Class": SWING + ("JFrame" if root else "JDialog")}
    if title is not None:
        props["Title"] = title
    return Window(Widget(wid, props, tuple(children)), root)


def gui(*windows: Window, version: str = "") -> GuiModel:
    return GuiModel(tuple(windows), version)


def single(*children: Widget, title: str = "App", wid: str = "win") -> GuiModel:
    return gui(window(wid, title, *children, root=True))


# -- string oracles ----------------------------------------------------------


def subsequences(s: str):
    for r in range(len(s) + 1):
        for idx in itertools.combinations(range(len(s)), r):
            yield "".join(s[i] for i in idx)


def is_subsequence(sub: str, s: str) -> bool:
    it = iter(s)
    return all(ch in it for ch in sub)


def brute_lcs(a: str, b: str) -> int:
    """Longest common subsequence by trying every subsequence of the shorter string."""
    if len(a) > len(b):
        a, b = b, a
    return max(len(s) for s in subsequences(a) if is_subsequence(s, b))


def brute_ops(a: str, b: str) -> int:
    return len(a) + len(b) - 2 * brute_lcs(a, b)


def dp_ops(a: str, b: str) -> int:
    """Quadratic edit distance restricted to insertions and deletions."""
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            cur[j] = prev[j - 1] if ca == cb else 1 + min(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


# -- matching oracles --------------------------------------------------------


def eligible_pairs(spec, wp, state) -> list[tuple[int, int, int, str, str]]:
    """Every pair a property-values heuristic may return, as (score, old pos, new pos, old, new)."""
    hierarchical = spec.kind is HeuristicKind.PROPERTY_VALUES_HIERARCHY
    out = []
    for a in wp.old_widgets:
        if a.id in state.maintained:
            continue
        for b in wp.new_widgets:
            if b.id in state.matched_new:
                continue
            if hierarchical and state.counterpart(wp.old_parent[a.id]) != wp.new_parent[b.id]:
                continue
            score = 0
            for c in spec.criteria:
                va, vb = a.get(c.property), b.get(c.property)
                if c.kind is CriterionKind.NULLITY:
                    ok = va is None and vb is None
                elif va is None or vb is None:
                    ok = False
                elif c.kind is CriterionKind.EQUALITY:
                    ok = va == vb
                else:
                    ops = dp_ops(va, vb)
                    ok = ops <= c.max_ops
                    score += ops
                if not ok:
                    break
            else:
                out.append((score, wp.old_pos[a.id], wp.new_pos[b.id], a.id, b.id))
    return out


def replay_violations(old_f: GuiModel, new_f: GuiModel, specs, trace) -> list[str]:
    """Replay ``trace`` from scratch, reporting commits a better-ranked spec could have preempted.

    Also confirms each commit is exactly what its own spec yields on the
    pre-commit state. Caching is not involved: every check is a fresh run.
    """
    state = MatchState.start(old_f, new_f, match_windows(old_f, new_f))
    by_priority = {s.priority: s for s in specs}
    problems = []
    for entry in trace:
        for spec in specs:
            if spec.priority >= entry.priority:
                continue
            for wp in state.window_pairs:
                found = run_widget_heuristic(spec, wp, state)
                if found is not None:
                    problems.append(
                        f"step {entry.step}: {spec.label} could match {found.old_widget}->{found.new_widget}"
                    )
        own = by_priority[entry.priority]
        found = run_widget_heuristic(own, state.window_pairs[entry.window_pair], state)
        if found is None or (found.old_widget, found.new_widget) != (entry.old, entry.new):
            problems.append(f"step {entry.step}: {own.label} would not commit {entry.old}->{entry.new}")
        state.commit(entry.window_pair, entry.old, entry.new, entry.heuristic, entry.priority)
    return problems


def check_invariants(result: MatchResult, old_f: GuiModel, new_f: GuiModel) -> None:
    """Partition, bijection and window confinement over filtered models."""
    old_side = list(result.maintained) + result.deleted
    new_side = list(result.maintained.values()) + result.created
    assert Counter(old_side) == Counter(old_f.widget_ids()), "old partition"
    assert Counter(new_side) == Counter(new_f.widget_ids()), "new partition"
    assert len(set(result.maintained.values())) == len(result.maintained), "bijection"
    window_pairs = {(a.id, b.id) for a, b in match_windows(old_f, new_f)}
    for a, b in result.maintained.items():
        assert (old_f.window_of(a).id, new_f.window_of(b).id) in window_pairs, (a, b)


# -- acceptance reporting ----------------------------------------------------

acceptance_lines: list[str] = []


def verdict(name: str, ok: bool, detail: str) -> None:
    """Record and print one acceptance line, then fail the test if needed."""
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    acceptance_lines.append(line)
    print(line)
    assert ok, line
