import json
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import single, w
from widgetmatch.errors import ConsistencyError, FormatError
from widgetmatch.evaluation import (
    MetricsReport,
    Oracle,
    aggregate,
    base_counts,
    consistency,
    evaluate,
    format_consistency,
    format_table,
    is_dissimilar,
    load_oracle,
    percent,
)
from widgetmatch.state import MatchResult

# reference aggregate counts; the dissimilar-decision counts are the unique
# integers reproducing the reference rates and summing to the total column
FREEMIND = MetricsReport(cdc=1799, cmc=1524, dwc=797, hcdc=1743, hcmc=1502, hcddwc=713, hdc=1787, hmc=1505)
JEDIT = MetricsReport(cdc=8976, cmc=7461, dwc=4115, hcdc=8436, hcmc=7194, hcddwc=3311, hdc=8953, hmc=7321)
TOTAL = MetricsReport(cdc=10775, cmc=8985, dwc=4912, hcdc=10179, hcmc=8696, hcddwc=4024, hdc=10740, hmc=8826)


def _pair():
    old = single(
        w("a1", Text="Open"), w("a2", Text="Save"), w("a3", Text="Quit", X="1"),
        w("a4", Text="Cut"), w("a5", Text="Copy"), w("a6", Text="Gone"), w("a7", Text="Old"),
    )
    new = single(
        w("b1", Text="Open"), w("b2", Text="Save"), w("b3", Text="Quit", X="9"),
        w("b4", Text="Cut"), w("b5", Text="Copy"), w("b6", Text="Fresh"),
    )
    oracle = Oracle({"a1": "b1", "a2": "b2", "a3": "b3", "a4": "b4", "a5": "b5"}, ["a6", "a7"], ["b6"])
    return old, new, oracle


def test_base_counts_from_definitions():
    old, new, oracle = _pair()
    assert base_counts(oracle, old, new) == (8, 5, 3)


def test_geometry_changes_are_not_dissimilar():
    a = w("a", Text="Ok", X="1", Y="2", Width="30", Height="20")
    b = w("b", Text="Ok", X="5", Y="7", Width="40", Height="22")
    assert not is_dissimilar(a, b)
    assert is_dissimilar(a, w("c", Text="Ok", Icon="ok.png"))
    assert is_dissimilar(a, w("d", Text="OK"))
    old, new = single(a), single(b)
    assert base_counts(Oracle({"a": "b"}), old, new) == (1, 1, 0)


def test_dissimilar_pair_weight():
    old, new = single(w("a", Text="Ok")), single(w("b", Text="Okay"))
    oracle = Oracle({"a": "b"})
    assert base_counts(oracle, old, new) == (1, 1, 1)
    assert base_counts(oracle, old, new, pair_weight=2) == (1, 1, 2)


@pytest.mark.parametrize(
    "report, rates",
    [
        (FREEMIND, ("96.89", "98.56", "89.46")),
        (JEDIT, ("93.98", "96.42", "80.46")),
        (TOTAL, ("94.47", "96.78", "81.92")),
    ],
)
def test_reference_rates(report, rates):
    assert (percent(report.hdr), percent(report.hmr), percent(report.hdwdr)) == rates


def test_reference_columns_sum_to_total():
    assert FREEMIND + JEDIT == TOTAL
    assert aggregate([FREEMIND, JEDIT]) == TOTAL


def test_rates_are_exact_fractions():
    assert FREEMIND.hdr == Fraction(1743, 1799)
    assert MetricsReport(0, 0, 0, 0, 0, 0).hdr == 1


def test_percent_rounds_half_up():
    assert percent(Fraction(1, 8)) == "12.50"
    assert percent(Fraction(12345, 1000000)) == "1.23"
    assert percent(Fraction(12345, 100000)) == "12.35"
    assert percent(Fraction(1)) == "100.00"
    assert percent(Fraction(0)) == "0.00"


@given(st.integers(0, 10**6), st.integers(1, 10**6))
def test_percent_matches_decimal(part, whole):
    part = min(part, whole)
    expected = (Decimal(part) * 100 / Decimal(whole)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    # Decimal division rounds at 28 digits; exact ties survive that
    assert percent(Fraction(part, whole)) == str(expected)


def test_evaluate_counts():
    old, new, oracle = _pair()
    result = MatchResult(
        {"a1": "b1", "a2": "b2", "a3": "b4", "a4": "b3", "a6": "b6"},
        ["a5", "a7"],
        ["b5"],
    )
    report = evaluate(result, oracle, old, new)
    assert (report.cdc, report.cmc, report.dwc) == (8, 5, 3)
    assert (report.hcdc, report.hcmc, report.hcddwc) == (3, 2, 1)
    assert (report.hdc, report.hmc) == (8, 5)
    assert percent(report.hdr) == "37.50"


def test_oracle_as_result_is_perfect():
    old, new, oracle = _pair()
    result = MatchResult(dict(oracle.maintained), list(oracle.deleted), list(oracle.created))
    report = evaluate(result, oracle, old, new)
    assert (report.hcdc, report.hcmc, report.hcddwc) == (report.cdc, report.cmc, report.dwc)
    assert report.hdr == report.hmr == report.hdwdr == 1


def test_dropping_a_correct_pair_never_raises_rates():
    old, new, oracle = _pair()
    perfect = evaluate(MatchResult(dict(oracle.maintained), list(oracle.deleted), list(oracle.created)), oracle, old, new)
    for a, b in oracle.maintained.items():
        maintained = {k: v for k, v in oracle.maintained.items() if k != a}
        worse = evaluate(MatchResult(maintained, oracle.deleted + [a], oracle.created + [b]), oracle, old, new)
        assert worse.hcdc < perfect.hcdc and worse.hcmc < perfect.hcmc
        assert worse.hdr < perfect.hdr


def _write(tmp_path, doc):
    path = tmp_path / "oracle.json"
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return path


def test_load_oracle(tmp_path):
    old, new, oracle = _pair()
    loaded = load_oracle(_write(tmp_path, oracle.to_dict()), old, new)
    assert loaded == oracle


def test_oracle_missing_widget(tmp_path):
    old, new, oracle = _pair()
    doc = oracle.to_dict()
    doc["deleted"].remove("a7")
    with pytest.raises(ConsistencyError, match="'a7' is not assigned"):
        load_oracle(_write(tmp_path, doc), old, new)


def test_oracle_unknown_widget(tmp_path):
    old, new, oracle = _pair()
    doc = oracle.to_dict()
    doc["created"].append("zz")
    with pytest.raises(ConsistencyError, match="unknown new widget 'zz'"):
        load_oracle(_write(tmp_path, doc), old, new)


def test_oracle_double_assignment(tmp_path):
    old, new, oracle = _pair()
    doc = oracle.to_dict()
    doc["deleted"].append("a1")
    with pytest.raises(ConsistencyError, match="'a1' is assigned twice"):
        load_oracle(_write(tmp_path, doc), old, new)


@pytest.mark.parametrize("text", ["[]", '{"maintained": []}', "{not json", '{"maintained": [1], "deleted": [], "created": []}'])
def test_oracle_format_errors(tmp_path, text):
    old, new, _ = _pair()
    with pytest.raises(FormatError):
        load_oracle(_write(tmp_path, text), old, new)


def test_evaluate_rejects_mismatched_models():
    old, new, oracle = _pair()
    other = single(w("x"))
    result = MatchResult(dict(oracle.maintained), list(oracle.deleted), list(oracle.created))
    with pytest.raises(ConsistencyError):
        evaluate(result, oracle, old, other)


def test_oracle_projection():
    _, _, oracle = _pair()
    projected = oracle.without(["a1", "a6"], ["b2"])
    assert projected.maintained == {"a3": "b3", "a4": "b4", "a5": "b5"}
    assert projected.deleted == ["a2", "a7"]
    assert projected.created == ["b1", "b6"]


def test_report_validation_and_json():
    with pytest.raises(ValueError):
        MetricsReport(1, 1, 1, 2, 1, 1)
    with pytest.raises(ValueError):
        MetricsReport(1, 1, 1, 1, 1, -1)
    doc = FREEMIND.to_dict()
    assert doc["hdr"] == "96.89" and doc["cdc"] == 1799
    assert MetricsReport.from_dict(doc) == FREEMIND


def test_table_rows():
    table = format_table({"FreeMind": FREEMIND, "jEdit": JEDIT, "Total": TOTAL})
    lines = table.splitlines()
    assert lines[0].split() == ["Measurement", "FreeMind", "jEdit", "Total"]
    rows = {line.rsplit(None, 3)[0]: line.split()[-3:] for line in lines[1:]}
    assert rows["Heuristic Decision Rate"] == ["96.89%", "93.98%", "94.47%"]
    assert rows["Heuristic Match Rate"] == ["98.56%", "96.42%", "96.78%"]
    assert rows["Heuristic Dissimilar Widget Decision Rate"] == ["89.46%", "80.46%", "81.92%"]
    assert rows["Heuristic Decision Count"] == ["1787", "8953", "10740"]
    assert rows["Correct Decision Count"] == ["1799", "8976", "10775"]


def test_consistency_buckets():
    reports = [
        MetricsReport(10, 10, 4, 10, 10, 4),  # perfect
        MetricsReport(100, 50, 20, 96, 50, 17),  # 96%, 100%, 85%
        MetricsReport(100, 50, 20, 91, 45, 15),  # 91%, 90%, 75%
        MetricsReport(100, 50, 20, 50, 40, 10),  # 50%, 80%, 50%
    ]
    table = consistency(reports)
    assert table["100%"] == {"hdr": 1, "hmr": 2, "hdwdr": 1}
    assert table["above 95%"] == {"hdr": 2, "hmr": 2, "hdwdr": 1}
    assert table["above 90%"] == {"hdr": 3, "hmr": 3, "hdwdr": 1}
    assert table["above 80%"] == {"hdr": 3, "hmr": 4, "hdwdr": 2}
    text = format_consistency(table)
    assert text.splitlines()[1].split() == ["100%", "1", "2", "1"]
