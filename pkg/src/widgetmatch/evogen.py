"""Synthetic GUI evolution: seeded models and mutated versions with exact oracles."""

from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from ._xml import read_bytes
from .errors import FormatError, PlanError
from .evaluation import Oracle
from .model import (
    ACCELERATOR,
    CLASS,
    HEIGHT,
    ICON,
    INDEX,
    TEXT,
    TITLE,
    WIDTH,
    X,
    Y,
    GuiModel,
    Widget,
    Window,
)

SWING = "javax.swing."
MENU_BAR = SWING + "JMenuBar"
MENU = SWING + "JMenu"
MENU_ITEM = SWING + "JMenuItem"
CHECK_MENU_ITEM = SWING + "JCheckBoxMenuItem"
TOOL_BAR = SWING + "JToolBar"
BUTTON = SWING + "JButton"
PANEL = SWING + "JPanel"
LABEL = SWING + "JLabel"
TEXT_FIELD = SWING + "JTextField"
CHECK_BOX = SWING + "JCheckBox"
RADIO_BUTTON = SWING + "JRadioButton"
COMBO_BOX = SWING + "JComboBox"
SEPARATOR = SWING + "JPopupMenu$Separator"
LIST = SWING + "JList"

# never targeted by mutations; they are filtered before matching anyway
_SEPARATORS = frozenset({SEPARATOR, SWING + "JSeparator", SWING + "JToolBar$Separator"})
_COMPOSITES = frozenset({COMBO_BOX})

VERBS = (
    "Open", "Save", "Close", "Print", "Export", "Import", "Undo", "Redo", "Cut", "Copy",
    "Paste", "Find", "Replace", "Select", "Zoom", "Insert", "Delete", "Rename", "Move",
    "Refresh", "Sort", "Filter", "Toggle", "Show", "Hide", "Expand", "Collapse", "Edit",
    "Format", "Run", "Stop", "Record", "Browse", "Attach", "Merge", "Split", "Reload",
)
NOUNS = (
    "File", "Map", "Node", "Buffer", "Window", "Selection", "Line", "Word", "Macro",
    "Plugin", "Toolbar", "Panel", "Icon", "Link", "Note", "Branch", "Session", "View",
    "Marker", "Register", "Font", "Color", "Style", "Table", "Image", "Project", "Tab",
)
MENU_NAMES = (
    "File", "Edit", "View", "Insert", "Format", "Navigate", "Tools", "Search",
    "Markers", "Macros", "Plugins", "Utilities", "Window", "Help",
)
DIALOG_TITLES = (
    "Find", "Replace", "Preferences", "About", "Print", "Export", "Go to Line",
    "Open File", "Save As", "Properties", "Plugin Manager", "Macros", "Buffers",
    "Spelling", "Styles", "Shortcuts", "Encoding", "Session Manager", "Markers",
)
KEYS = string.ascii_uppercase + "0123456789"
MODIFIERS = ("ctrl", "ctrl shift", "alt", "ctrl alt", "meta")


class MutationKind(Enum):
    RENAME_TEXT = "RenameText"
    CHANGE_ICON = "ChangeIcon"
    CHANGE_ACCELERATOR = "ChangeAccelerator"
    MOVE_WITHIN_PARENT = "MoveWithinParent"
    MOVE_TO_OTHER_CONTAINER = "MoveToOtherContainer"
    RESIZE = "Resize"
    REPOSITION = "Reposition"
    DELETE_SUBTREE = "DeleteSubtree"
    INSERT_WIDGET = "InsertWidget"
    RETITLE_WINDOW = "RetitleWindow"


@dataclass(frozen=True)
class Mutation:
    kind: MutationKind
    max_edit: int = 3
    max_size: int | None = None

    @classmethod
    def from_dict(cls, doc) -> Mutation:
        if isinstance(doc, str):
            doc = {"kind": doc}
        try:
            kind = MutationKind(doc["kind"])
        except (KeyError, ValueError, TypeError):
            raise PlanError(f"unknown mutation {doc!r}") from None
        return cls(kind, int(doc.get("max_edit", 3)), doc.get("max_size"))

    def to_dict(self) -> dict:
        doc = {"kind": self.kind.value, "max_edit": self.max_edit}
        if self.max_size is not None:
            doc["max_size"] = self.max_size
        return doc


DEFAULT_MIX = (
    Mutation(MutationKind.RENAME_TEXT),
    Mutation(MutationKind.CHANGE_ICON),
    Mutation(MutationKind.CHANGE_ACCELERATOR),
    Mutation(MutationKind.MOVE_WITHIN_PARENT),
    Mutation(MutationKind.MOVE_TO_OTHER_CONTAINER),
    Mutation(MutationKind.RESIZE),
    Mutation(MutationKind.REPOSITION),
    Mutation(MutationKind.DELETE_SUBTREE, max_size=3),
    Mutation(MutationKind.INSERT_WIDGET),
)


@dataclass(frozen=True)
class MutationPlan:
    """Either ``ops`` random draws from ``mix`` or an explicit mutation list."""

    seed: int
    ops: int | tuple[Mutation, ...] = 0
    mix: tuple[Mutation, ...] = DEFAULT_MIX

    @classmethod
    def from_dict(cls, doc) -> MutationPlan:
        if not isinstance(doc, dict) or "seed" not in doc:
            raise PlanError("plan must be an object with a seed")
        ops = doc.get("ops", 0)
        if isinstance(ops, list):
            ops = tuple(Mutation.from_dict(m) for m in ops)
        elif not isinstance(ops, int) or ops < 0:
            raise PlanError("ops must be a non-negative count or a list of mutations")
        mix = tuple(Mutation.from_dict(m) for m in doc["mix"]) if "mix" in doc else DEFAULT_MIX
        if not mix:
            raise PlanError("mix must name at least one mutation")
        return cls(int(doc["seed"]), ops, mix)

    def to_dict(self) -> dict:
        ops = self.ops if isinstance(self.ops, int) else [m.to_dict() for m in self.ops]
        return {"seed": self.seed, "ops": ops, "mix": [m.to_dict() for m in self.mix]}


def load_plan(path) -> MutationPlan:
    try:
        doc = json.loads(read_bytes(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"bad plan file: {exc}", path) from None
    return MutationPlan.from_dict(doc)


# -- mutable working copy --------------------------------------------------


@dataclass(eq=False)
class _Node:
    origin: str | None
    props: dict[str, str | None]
    children: list[_Node] = field(default_factory=list)
    parent: _Node | None = None
    window_root: bool = False

    def iter(self):
        yield self
        for c in self.children:
            yield from c.iter()

    def protected(self) -> bool:
        if self.props.get(CLASS) in _SEPARATORS:
            return True
        node = self.parent
        while node is not None:
            if node.props.get(CLASS) in _COMPOSITES:
                return True
            node = node.parent
        return False


def _thaw(widget: Widget, parent: _Node | None = None) -> _Node:
    node = _Node(widget.id, dict(widget.properties), parent=parent)
    node.children = [_thaw(c, node) for c in widget.children]
    return node


@dataclass
class MutationRecord:
    kind: str
    target: str | None
    detail: str = ""

    def as_dict(self) -> dict:
        return {"kind": self.kind, "target": self.target, "detail": self.detail}


@dataclass
class MutationOutcome:
    new_model: GuiModel
    oracle: Oracle
    log: list[MutationRecord]
    touched: set[str]
    collateral: set[str]

    @property
    def effect_size(self) -> int:
        """Widgets whose existence or properties a mutation changed."""
        return len(self.touched | self.collateral | set(self.oracle.deleted)) + len(
            self.oracle.created
        )


class _Mutator:
    def __init__(self, model: GuiModel, seed: int) -> None:
        self.rng = random.Random(seed)
        self.model = model
        self.windows = [(_thaw(w.root_widget), w.is_root) for w in model.windows]
        for root, _ in self.windows:
            root.window_root = True
        self.touched: set[str] = set()
        self.collateral: set[str] = set()
        self.inserted = 0
        self.log: list[MutationRecord] = []

    # candidate pools -------------------------------------------------------

    def _widgets(self):
        for root, _ in self.windows:
            for node in root.iter():
                if not node.window_root:
                    yield node

    def _candidates(self, predicate=lambda n: True) -> list[_Node]:
        return [
            n for n in self._widgets()
            if n.origin is not None
            and n.origin not in self.touched
            and not n.protected()
            and predicate(n)
        ]

    def _pick(self, pool: Sequence[_Node], kind: str) -> _Node:
        if not pool:
            raise PlanError(f"{kind}: no applicable widget")
        return self.rng.choice(pool)

    def _touch(self, node: _Node) -> None:
        if node.origin is not None:
            self.touched.add(node.origin)

    def _renumber(self, parent: _Node) -> None:
        for i, child in enumerate(parent.children):
            if INDEX in child.props and child.props[INDEX] != str(i):
                child.props[INDEX] = str(i)
                if child.origin is not None and child.origin not in self.touched:
                    self.collateral.add(child.origin)

    def _window_root(self, node: _Node) -> _Node:
        while node.parent is not None:
            node = node.parent
        return node

    # mutations -------------------------------------------------------------

    def apply(self, m: Mutation) -> None:
        handler = getattr(self, "_" + m.kind.name.lower())
        handler(m)

    def _rename_text(self, m: Mutation) -> None:
        node = self._pick(self._candidates(lambda n: bool(n.props.get(TEXT))), m.kind.value)
        old = node.props[TEXT]
        node.props[TEXT] = _edit_text(self.rng, old, max(1, m.max_edit))
        self._touch(node)
        self.log.append(MutationRecord(m.kind.value, node.origin, f"{old!r} -> {node.props[TEXT]!r}"))

    def _change_icon(self, m: Mutation) -> None:
        node = self._pick(self._candidates(lambda n: n.props.get(ICON) is not None), m.kind.value)
        old = node.props[ICON]
        new = old
        while new == old:
            new = f"icons/{self.rng.choice(NOUNS).lower()}{self.rng.randint(1, 99)}.png"
        node.props[ICON] = new
        self._touch(node)
        self.log.append(MutationRecord(m.kind.value, node.origin, f"{old} -> {new}"))

    def _change_accelerator(self, m: Mutation) -> None:
        node = self._pick(
            self._candidates(lambda n: n.props.get(ACCELERATOR) is not None), m.kind.value
        )
        root = self._window_root(node)
        used = {n.props.get(ACCELERATOR) for n in root.iter()}
        old = node.props[ACCELERATOR]
        new = old
        while new in used:
            new = f"{self.rng.choice(MODIFIERS)} {self.rng.choice(KEYS)}"
        node.props[ACCELERATOR] = new
        self._touch(node)
        self.log.append(MutationRecord(m.kind.value, node.origin, f"{old} -> {new}"))

    def _move_within_parent(self, m: Mutation) -> None:
        node = self._pick(
            self._candidates(lambda n: n.parent is not None and len(n.parent.children) > 1),
            m.kind.value,
        )
        parent = node.parent
        old_pos = parent.children.index(node)
        new_pos = self.rng.choice([i for i in range(len(parent.children)) if i != old_pos])
        parent.children.remove(node)
        parent.children.insert(new_pos, node)
        self._touch(node)
        _relocate(node, parent, new_pos, self.rng)
        self._renumber(parent)
        self.log.append(MutationRecord(m.kind.value, node.origin, f"{old_pos} -> {new_pos}"))

    def _move_to_other_container(self, m: Mutation) -> None:
        def has_destination(n: _Node) -> bool:
            return bool(self._destinations(n))

        node = self._pick(
            self._candidates(lambda n: not n.parent.window_root and has_destination(n)),
            m.kind.value,
        )
        dest = self.rng.choice(self._destinations(node))
        source = node.parent
        source.children.remove(node)
        pos = self.rng.randint(0, len(dest.children))
        dest.children.insert(pos, node)
        node.parent = dest
        self._touch(node)
        _relocate(node, dest, pos, self.rng)
        self._renumber(source)
        self._renumber(dest)
        self.log.append(MutationRecord(m.kind.value, node.origin, f"-> {dest.origin}"))

    def _destinations(self, node: _Node) -> list[_Node]:
        parent_class = node.parent.props.get(CLASS)
        root = self._window_root(node)
        inside = set(map(id, node.iter()))
        return [
            n for n in root.iter()
            if not n.window_root
            and n is not node.parent
            and id(n) not in inside
            and n.props.get(CLASS) == parent_class
            and not n.protected()
        ]

    def _resize(self, m: Mutation) -> None:
        node = self._pick(self._candidates(lambda n: n.props.get(WIDTH) is not None), m.kind.value)
        w = int(node.props[WIDTH])
        h = int(node.props.get(HEIGHT) or 20)
        delta = self.rng.randint(4, 40)
        if w > 44 and self.rng.random() < 0.5:
            delta = -delta
        node.props[WIDTH] = str(w + delta)
        node.props[HEIGHT] = str(h + self.rng.randint(1, 10))
        self._touch(node)
        self.log.append(MutationRecord(m.kind.value, node.origin))

    def _reposition(self, m: Mutation) -> None:
        node = self._pick(self._candidates(lambda n: n.props.get(X) is not None), m.kind.value)
        node.props[X] = str(int(node.props[X]) + self.rng.randint(3, 60))
        node.props[Y] = str(int(node.props.get(Y) or 0) + self.rng.randint(3, 60))
        self._touch(node)
        self.log.append(MutationRecord(m.kind.value, node.origin))

    def _delete_subtree(self, m: Mutation) -> None:
        def fits(n: _Node) -> bool:
            size = sum(1 for _ in n.iter())
            if m.max_size is not None and size > m.max_size:
                return False
            return all(c.origin not in self.touched and c.origin is not None for c in n.iter())

        node = self._pick(self._candidates(fits), m.kind.value)
        parent = node.parent
        parent.children.remove(node)
        for removed in node.iter():
            self.touched.add(removed.origin)
            self.collateral.discard(removed.origin)
        self._renumber(parent)
        self.log.append(
            MutationRecord(m.kind.value, node.origin, f"{sum(1 for _ in node.iter())} widget(s)")
        )

    def _insert_widget(self, m: Mutation) -> None:
        containers = [
            n for root, _ in self.windows for n in root.iter()
            if not n.window_root
            and n.props.get(CLASS) in (MENU, PANEL, TOOL_BAR)
            and not n.protected()
        ]
        parent = self._pick(containers, m.kind.value)
        self.inserted += 1
        cls = {MENU: MENU_ITEM, PANEL: CHECK_BOX, TOOL_BAR: BUTTON}[parent.props[CLASS]]
        props: dict[str, str | None] = {CLASS: cls}
        if cls == BUTTON:
            props[ICON] = f"icons/new{self.inserted}_{self.rng.randint(100, 999)}.png"
        else:
            props[TEXT] = f"{self.rng.choice(VERBS)} {self.rng.choice(NOUNS)} {self.inserted + 1}"
        pos = self.rng.randint(0, len(parent.children))
        props[INDEX] = str(pos)
        props[WIDTH] = str(self.rng.randint(40, 160))
        props[HEIGHT] = "22"
        node = _Node(None, props, parent=parent)
        parent.children.insert(pos, node)
        _relocate(node, parent, pos, self.rng)
        self._renumber(parent)
        self.log.append(MutationRecord(m.kind.value, None, f"{cls} under {parent.origin}"))

    def _retitle_window(self, m: Mutation) -> None:
        roots = [r for r, _ in self.windows if r.props.get(TITLE)]
        root = self._pick(roots, m.kind.value)
        old = root.props[TITLE]
        root.props[TITLE] = old + " " + self.rng.choice(("(2)", "Dialog", "Options", "..."))
        self.log.append(MutationRecord(m.kind.value, root.origin, f"{old!r} -> {root.props[TITLE]!r}"))

    # output ----------------------------------------------------------------

    def freeze(self, version: str) -> MutationOutcome:
        counter = 0
        maintained: dict[str, str] = {}
        created: list[str] = []

        def build(node: _Node) -> Widget:
            nonlocal counter
            counter += 1
            new_id = f"n{counter}"
            if not node.window_root:
                if node.origin is None:
                    created.append(new_id)
                else:
                    maintained[node.origin] = new_id
            return Widget(new_id, dict(node.props), tuple(build(c) for c in node.children))

        windows = tuple(Window(build(root), is_root) for root, is_root in self.windows)
        new_model = GuiModel(windows, version)
        deleted = [wid for wid in self.model.widget_ids() if wid not in maintained]
        oracle = Oracle(maintained, deleted, created)
        touched = {t for t in self.touched if t in maintained}
        return MutationOutcome(new_model, oracle, self.log, touched, set(self.collateral))


def _relocate(node: _Node, parent: _Node, pos: int, rng: random.Random) -> None:
    """Give a moved or inserted widget coordinates near its new slot."""
    px = int(parent.props.get(X) or 0)
    py = int(parent.props.get(Y) or 0)
    node.props[X] = str(px + 12 + rng.randint(0, 5))
    node.props[Y] = str(py + 22 * (pos + 1) + rng.randint(0, 5))


def _edit_text(rng: random.Random, text: str, max_edit: int) -> str:
    letters = string.ascii_letters + " ."
    while True:
        chars = list(text)
        for _ in range(rng.randint(1, max_edit)):
            if chars and rng.random() < 0.5:
                del chars[rng.randrange(len(chars))]
            else:
                chars.insert(rng.randint(0, len(chars)), rng.choice(letters))
        result = "".join(chars)
        if result.strip() and result != text:
            return result


def mutate_detailed(model: GuiModel, plan: MutationPlan) -> MutationOutcome:
    mutator = _Mutator(model, plan.seed)
    if isinstance(plan.ops, int):
        for _ in range(plan.ops):
            options = list(plan.mix)
            mutator.rng.shuffle(options)
            for mutation in options:
                try:
                    mutator.apply(mutation)
                    break
                except PlanError:
                    continue
            else:
                raise PlanError("no mutation in the mix is applicable")
    else:
        for mutation in plan.ops:
            mutator.apply(mutation)
    label = f"{model.version_label}+mut{plan.seed}" if model.version_label else f"mut{plan.seed}"
    return mutator.freeze(label)


def mutate(model: GuiModel, plan: MutationPlan) -> tuple[GuiModel, Oracle]:
    outcome = mutate_detailed(model, plan)
    return outcome.new_model, outcome.oracle


# -- random models -----------------------------------------------------------


class _Builder:
    def __init__(self, rng: random.Random, decorations: bool) -> None:
        self.rng = rng
        self.decorations = decorations
        self.next_id = 0
        self.texts: set[str] = set()
        self.accelerators: set[str] = set()
        self.icons = 0

    def new_id(self) -> str:
        self.next_id += 1
        return f"w{self.next_id}"

    def text(self) -> str:
        for _ in range(200):
            words = [self.rng.choice(VERBS), self.rng.choice(NOUNS)]
            if self.rng.random() < 0.2:
                words.append(self.rng.choice(NOUNS))
            candidate = " ".join(words)
            if candidate not in self.texts:
                break
        else:
            candidate = f"{self.rng.choice(VERBS)} {len(self.texts)}"
        self.texts.add(candidate)
        return candidate

    def accelerator(self) -> str:
        while True:
            candidate = f"{self.rng.choice(MODIFIERS)} {self.rng.choice(KEYS)}"
            if candidate not in self.accelerators:
                self.accelerators.add(candidate)
                return candidate

    def icon(self) -> str:
        self.icons += 1
        return f"icons/{self.rng.choice(NOUNS).lower()}_{self.icons}.png"


@dataclass(eq=False)
class _Draft:
    props: dict
    children: list = field(default_factory=list)


def _layout(root: _Draft, builder: _Builder) -> Widget:
    """Assign ids, Index and window-absolute geometry in document order."""
    row = 0

    def visit(node: _Draft, depth: int, index: int | None) -> Widget:
        nonlocal row
        props = dict(node.props)
        if index is not None:
            text = props.get(TEXT) or ""
            props[INDEX] = str(index)
            props[X] = str(12 * depth)
            props[Y] = str(22 * row)
            props[WIDTH] = str(max(24, 7 * len(text) + 16 + builder.rng.randint(0, 8)))
            props[HEIGHT] = str(22 if not node.children else 22 + 4 * len(node.children))
            row += 1
            widget_id = builder.new_id()
        else:
            widget_id = "window"  # replaced by the caller
        kids = tuple(visit(c, depth + 1, i) for i, c in enumerate(node.children))
        return Widget(widget_id, props, kids)

    return visit(root, 0, None)


def _main_window(b: _Builder, title: str, budget: int) -> _Draft:
    rng = b.rng
    bar = _Draft({CLASS: MENU_BAR})
    tools = _Draft({CLASS: TOOL_BAR})
    content = _Draft({CLASS: PANEL})
    menus: list[_Draft] = []
    panels = [content]
    names = list(MENU_NAMES)
    used = 3
    while used < budget:
        left = budget - used
        r = rng.random()
        if not menus or (r < 0.1 and names and len(menus) < len(MENU_NAMES)):
            menu = _Draft({CLASS: MENU, TEXT: names.pop(0) if names else b.text()})
            bar.children.append(menu)
            menus.append(menu)
            used += 1
        elif r < 0.5:
            menu = rng.choice(menus)
            props = {CLASS: rng.choice((MENU_ITEM, MENU_ITEM, MENU_ITEM, CHECK_MENU_ITEM)), TEXT: b.text()}
            if rng.random() < 0.5:
                props[ACCELERATOR] = b.accelerator()
            if rng.random() < 0.3:
                props[ICON] = b.icon()
            menu.children.append(_Draft(props))
            used += 1
        elif r < 0.55 and left >= 2:
            parent = rng.choice(menus)
            sub = _Draft({CLASS: MENU, TEXT: b.text()})
            sub.children.append(_Draft({CLASS: MENU_ITEM, TEXT: b.text()}))
            parent.children.append(sub)
            menus.append(sub)
            used += 2
        elif r < 0.7:
            tools.children.append(_Draft({CLASS: BUTTON, ICON: b.icon()}))
            used += 1
        elif r < 0.75 and b.decorations:
            rng.choice(menus).children.append(_Draft({CLASS: SEPARATOR}))
            used += 1
        elif r < 0.8 and b.decorations and left >= 3:
            combo = _Draft({CLASS: COMBO_BOX},
                           [_Draft({CLASS: TEXT_FIELD}), _Draft({CLASS: BUTTON}), _Draft({CLASS: LIST})])
            rng.choice(panels).children.append(combo)
            used += 4 if left >= 4 else 3
            if left < 4:
                combo.children.pop()
        elif r < 0.85:
            sub = _Draft({CLASS: PANEL})
            rng.choice(panels).children.append(sub)
            panels.append(sub)
            used += 1
        else:
            rng.choice(panels).children.append(_leaf(b))
            used += 1
    return _Draft({TITLE: title, CLASS: SWING + "JFrame"}, [bar, tools, content])


def _leaf(b: _Builder) -> _Draft:
    cls = b.rng.choice((LABEL, TEXT_FIELD, CHECK_BOX, BUTTON, RADIO_BUTTON))
    props = {CLASS: cls}
    if cls != TEXT_FIELD:
        props[TEXT] = b.text()
    if cls == BUTTON and b.rng.random() < 0.3:
        props[ICON] = b.icon()
    return _Draft(props)


def _dialog(b: _Builder, title: str, budget: int) -> _Draft:
    rng = b.rng
    content = _Draft({CLASS: PANEL})
    top = [content]
    used = 1
    if budget >= 4:
        buttons = _Draft({CLASS: PANEL}, [
            _Draft({CLASS: BUTTON, TEXT: "OK"}), _Draft({CLASS: BUTTON, TEXT: "Cancel"})
        ])
        top.append(buttons)
        used += 3
    panels = [content]
    while used < budget:
        r = rng.random()
        if r < 0.15:
            sub = _Draft({CLASS: PANEL})
            rng.choice(panels).children.append(sub)
            panels.append(sub)
        elif r < 0.2 and b.decorations and budget - used >= 3:
            rng.choice(panels).children.append(
                _Draft({CLASS: COMBO_BOX}, [_Draft({CLASS: TEXT_FIELD}), _Draft({CLASS: BUTTON})])
            )
            used += 2
        else:
            rng.choice(panels).children.append(_leaf(b))
        used += 1
    return _Draft({TITLE: title, CLASS: SWING + "JDialog"}, top)


def random_model(
    seed: int,
    n_widgets: int = 150,
    n_windows: int = 4,
    decorations: bool = True,
    version: str = "1.0",
) -> GuiModel:
    """A plausible desktop GUI with exactly ``n_widgets`` widgets."""
    if n_windows < 1 or n_windows > len(DIALOG_TITLES) + 1:
        raise ValueError(f"n_windows must be in 1..{len(DIALOG_TITLES) + 1}")
    if n_widgets < 3 * n_windows:
        raise ValueError("need at least three widgets per window")
    rng = random.Random(seed)
    b = _Builder(rng, decorations)
    main_budget = n_widgets if n_windows == 1 else max(3, int(n_widgets * 0.4))
    rest = n_widgets - main_budget
    shares = [rest // (n_windows - 1)] * (n_windows - 1) if n_windows > 1 else []
    for i in range(rest - sum(shares)):
        shares[i] += 1
    titles = rng.sample(DIALOG_TITLES, n_windows - 1)
    app = rng.choice(("Mind Mapper", "Text Editor", "Outline", "Notebook"))
    drafts = [_main_window(b, app, main_budget)]
    drafts += [_dialog(b, t, s) for t, s in zip(titles, shares)]
    windows = []
    for i, draft in enumerate(drafts):
        root = _layout(draft, b)
        windows.append(Window(Widget(f"win{i}", root.properties, root.children), i == 0))
    model = GuiModel(tuple(windows), version)
    assert model.widget_count == n_widgets, (model.widget_count, n_widgets)
    return model
