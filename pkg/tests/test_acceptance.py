"""Exit criteria for the package, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the verdict lines as
they happen; they are also repeated in the session summary.
"""

import itertools
import random
import time
from fractions import Fraction
from statistics import mean

import pytest

from helpers import brute_ops, check_invariants, replay_violations, verdict
from widgetmatch.cli import main
from widgetmatch.engine import default_config, execute
from widgetmatch.evaluation import MetricsReport, evaluate, percent
from widgetmatch.evogen import Mutation, MutationKind, MutationPlan, mutate_detailed, random_model
from widgetmatch.heuristics import TABLE3, generate_heuristic_set
from widgetmatch.model import apply_filters, model_to_xml, prune
from widgetmatch.textdiff import diff_ops

ACCURACY_MIX = (
    Mutation(MutationKind.RENAME_TEXT),
    Mutation(MutationKind.MOVE_WITHIN_PARENT),
    Mutation(MutationKind.MOVE_TO_OTHER_CONTAINER),
    Mutation(MutationKind.RESIZE),
    Mutation(MutationKind.DELETE_SUBTREE, max_size=2),
    Mutation(MutationKind.INSERT_WIDGET),
)


@pytest.fixture(scope="module")
def config():
    return default_config()


def test_metric_arithmetic():
    start = time.perf_counter()
    cases = [
        # (numerator, denominator, expected two-decimal percentage)
        (1743, 1799, "96.89"),
        (1502, 1524, "98.56"),
        (10179, 10775, "94.47"),
        (8436, 8976, "93.98"),
        (7194, 7461, "96.42"),
        (8696, 8985, "96.78"),
    ]
    got = [percent(Fraction(n, d)) for n, d, _ in cases]
    report = MetricsReport(cdc=1799, cmc=1524, dwc=797, hcdc=1743, hcmc=1502, hcddwc=713)
    rates = (percent(report.hdr), percent(report.hmr))
    elapsed = time.perf_counter() - start
    ok = got == [p for _, _, p in cases] and rates == ("96.89", "98.56") and elapsed < 1
    verdict("1 metric arithmetic", ok, f"{', '.join(got)} in {elapsed * 1000:.1f} ms")


IDENTITY_CORPUS = [
    (seed, n, k, decorated)
    for seed, (n, k) in enumerate([(12, 1), (40, 2), (90, 3), (150, 4), (240, 6), (360, 10), (500, 16)])
    for decorated in (True, False)
]


def test_identity_matching(config):
    worst = 0.0
    failures = []
    for seed, n, k, decorated in IDENTITY_CORPUS:
        model = random_model(seed, n_widgets=n, n_windows=k, decorations=decorated)
        start = time.perf_counter()
        result = execute(model, model, config)
        worst = max(worst, time.perf_counter() - start)
        filtered = apply_filters(model, config.filter)
        check_invariants(result, filtered, filtered)
        if result.deleted or result.created:
            failures.append(f"{n}/{k}: deleted or created not empty")
        if len(result.maintained) + len(result.ignored_old) != model.widget_count:
            failures.append(f"{n}/{k}: maintained {len(result.maintained)}")
        if not decorated and result.ignored_old:
            failures.append(f"{n}/{k}: plain model lost widgets to filtering")
        for a, b in result.maintained.items():
            if model.lookup(a).properties != model.lookup(b).properties:
                failures.append(f"{n}/{k}: {a}->{b} property maps differ")
                break
    ok = not failures and worst < 10
    verdict(
        "2 identity matching",
        ok,
        f"{len(IDENTITY_CORPUS)} models up to 500 widgets/16 windows, slowest {worst:.2f} s"
        + (f"; {failures[:3]}" if failures else ""),
    )


def test_mutation_oracle_accuracy(config):
    start = time.perf_counter()
    old = random_model(0, n_widgets=150, n_windows=4)
    reports = []
    over_budget = []
    for seed in range(20):
        outcome = mutate_detailed(old, MutationPlan(seed, 7, ACCURACY_MIX))
        oracle = outcome.oracle
        touched = len(outcome.touched) + len(oracle.deleted) + len(oracle.created)
        if touched > 15:
            over_budget.append((seed, touched))
        new = outcome.new_model
        result = execute(old, new, config)
        check_invariants(result, apply_filters(old, config.filter), apply_filters(new, config.filter))
        old_p, new_p = prune(old, result.ignored_old), prune(new, result.ignored_new)
        reports.append(evaluate(result, oracle.without(result.ignored_old, result.ignored_new), old_p, new_p))
    elapsed = time.perf_counter() - start
    hdr = mean(r.hdr for r in reports)
    hmr = mean(r.hmr for r in reports)
    ok = not over_budget and hdr >= Fraction(95, 100) and hmr >= Fraction(95, 100) and elapsed < 120
    verdict(
        "3 mutation-oracle accuracy",
        ok,
        f"mean HDR {percent(hdr)}%, mean HMR {percent(hmr)}% over 20 seeds "
        f"(worst HDR {percent(min(r.hdr for r in reports))}%), {elapsed:.1f} s"
        + (f"; plans over 10%: {over_budget}" if over_budget else ""),
    )


def test_diff_oracle_equivalence():
    start = time.perf_counter()
    rng = random.Random(20240601)
    pairs = []
    for _ in range(500):
        a = "".join(rng.choice("abc") for _ in range(rng.randint(0, 10)))
        b = "".join(rng.choice("abc") for _ in range(rng.randint(0, 10)))
        pairs.append((a, b))
    short = ["".join(p) for n in range(5) for p in itertools.product("abc", repeat=n)]
    pairs += list(itertools.product(short, repeat=2))
    mismatches = [(a, b) for a, b in pairs if diff_ops(a, b) != brute_ops(a, b)]
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 30
    verdict(
        "4 diff oracle equivalence",
        ok,
        f"{len(pairs)} pairs, {len(mismatches)} mismatches, {elapsed:.1f} s",
    )


def test_generator_count_and_order():
    start = time.perf_counter()
    specs = generate_heuristic_set(TABLE3, dedupe=False)
    rows = [s.source.retained_rows for s in specs]
    rng = random.Random(7)
    violations = 0
    for _ in range(1000):
        i, j = sorted(rng.sample(range(len(rows)), 2))
        if rows[j] > rows[i]:
            violations += 1
    elapsed = time.perf_counter() - start
    first_all = rows[0] == frozenset(range(len(TABLE3.rows)))
    ok = len(specs) == 1013 and first_all and violations == 0 and elapsed < 10
    verdict(
        "5 generator count and order",
        ok,
        f"{len(specs)} specs, first retains all rows: {first_all}, "
        f"{violations} order violations in 1000 pairs, {elapsed:.2f} s",
    )


def test_priority_optimality(config):
    start = time.perf_counter()
    commits = 0
    problems = []
    for seed in range(50):
        rng = random.Random(seed)
        windows = rng.randint(1, 3)
        old = random_model(seed, n_widgets=rng.randint(4 * windows, 30), n_windows=windows)
        outcome = mutate_detailed(old, MutationPlan(seed, rng.randint(1, 6)))
        new = outcome.new_model
        result = execute(old, new, config)
        old_f, new_f = apply_filters(old, config.filter), apply_filters(new, config.filter)
        check_invariants(result, old_f, new_f)
        commits += len(result.trace)
        problems += [f"seed {seed}: {p}" for p in replay_violations(old_f, new_f, config.widget_specs, result.trace)]
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 60
    verdict(
        "6 priority optimality",
        ok,
        f"50 fixtures, {commits} commits replayed, {len(problems)} violations, {elapsed:.1f} s"
        + (f"; {problems[:2]}" if problems else ""),
    )


def test_invariants_and_repeatable_cli(tmp_path, config):
    # partition, bijection and confinement are asserted inside criteria 2, 3 and 6
    model = tmp_path / "a.xml"
    model.write_bytes(model_to_xml(random_model(13, n_widgets=150, n_windows=4)))
    outputs = []
    codes = []
    for run in range(2):
        d = tmp_path / f"run{run}"
        d.mkdir()
        argvs = [
            ["mutate", "--model", str(model), "--ops", "12", "--seed", "4", "--out", str(d / "b.xml"), "--oracle-out", str(d / "o.json")],
            ["match", "--old", str(model), "--new", str(d / "b.xml"), "--out", str(d / "r.json")],
            ["evaluate", "--result", str(d / "r.json"), "--oracle", str(d / "o.json"), "--old", str(model), "--new", str(d / "b.xml"), "--out", str(d / "e.json")],
        ]
        codes.append([main(argv) for argv in argvs])
        outputs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    same = outputs[0] == outputs[1]
    ok = same and codes == [[0, 0, 0]] * 2 and set(outputs[0]) == {"b.xml", "o.json", "r.json", "e.json"}
    verdict(
        "7 invariants and determinism",
        ok,
        f"invariants held in criteria 2, 3, 6; exit codes {codes[0]}; "
        f"{len(outputs[0])} output files byte-identical across runs: {same}",
    )
