import json
import re

import jsonschema
import numpy as np
import pytest

from resil.fixtures import generate_fixture
from resil.ingest import SeriesBundle, parse_figure_json, parse_native_json
from resil.pipeline import AnalysisConfig, analyze
from resil.report import emit_figure_json, load_schema, to_html, to_json
from resil.series import TimeSeries


def multi_bundle():
    a = parse_native_json(generate_fixture("multi-dip", {"n_dips": 3}, name="A"))
    b = TimeSeries("B", np.arange(13.0), np.linspace(1.0, 0.6, 13))
    return SeriesBundle((a.series[0], b))


FULL = AnalysisConfig(auc=True, threshold=0.8, derivatives=True, dips="max",
                      dip_metrics=("aucd", "r", "rr", "ac", "ra", "irm"), antifragility=True)


@pytest.fixture(scope="module")
def full_report():
    return analyze(multi_bundle(), FULL)


def test_json_deterministic(full_report):
    assert to_json(full_report) == to_json(analyze(multi_bundle(), FULL))


def test_json_validates_against_schema(full_report):
    schema = load_schema()
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.validate(json.loads(to_json(full_report)), schema)


def test_float_rounding(full_report):
    doc = json.loads(to_json(full_report))
    for m in doc["metrics"]["dip"]:
        for v in m["values"].values():
            if v is not None:
                assert v == float(f"{v:.12g}")


def test_not_computable_alpha_has_reason():
    s = parse_native_json(generate_fixture("v")).series
    doc = json.loads(to_json(analyze(SeriesBundle(s), AnalysisConfig(dips="max", antifragility=True))))
    for sc in doc["antifragility"]["systems"][0]["scores"]:
        assert sc["alpha"] is None and sc["reason"]
    jsonschema.validate(doc, load_schema())


def test_empty_dips():
    flat = SeriesBundle((TimeSeries("flat", [0, 1, 2, 3], [0.9] * 4),))
    rep = analyze(flat, AnalysisConfig(dips="max", dip_metrics=("r",), auc=True))
    doc = json.loads(to_json(rep))
    assert doc["dips"] == [] and "dip" not in doc["metrics"]
    jsonschema.validate(doc, load_schema())
    page = to_html(rep).decode()
    assert 'class="dip"' not in page and page.count("<svg") == 1


def test_html_threshold_line(full_report):
    page = to_html(full_report).decode()
    m = re.search(r'<line class="threshold" data-value="([^"]+)"[^>]*stroke="black"'
                  r'[^>]*stroke-dasharray', page)
    assert m and float(m.group(1)) == 0.8


def test_html_self_contained(full_report):
    page = to_html(full_report).decode()
    assert "http://" not in page.replace('xmlns="http://www.w3.org/2000/svg"', "")
    assert "https://" not in page and "<script" not in page


def test_html_two_colored_series(full_report):
    page = to_html(full_report).decode()
    strokes = dict(re.findall(r'<polyline class="series" data-series="([^"]+)" fill="none" '
                              r'stroke="([^"]+)"', page))
    assert set(strokes) == {"A", "B"} and strokes["A"] != strokes["B"]
    legend = re.search(r'<div class="legend">(.*?)</div>', page).group(1)
    assert "A" in legend and "B" in legend


def test_html_annotations_match_json(full_report):
    page = to_html(full_report).decode()
    doc = json.loads(to_json(full_report))
    labels = {"RR": "rr", "RA": "ra", "R": "r", "AC": "ac", "AUC-D": "aucd", "IRM": "irm",
              "TAPL": "tapl", "RAPI": "rapi"}
    ann = re.findall(r'class="dip-annotation" data-series="([^"]+)" data-dip="(\d+)"[^>]*>'
                     r'\(([^<]*)\)</text>', page)
    rows = {(r["series"], r["dip_index"]): r["values"] for r in doc["metrics"]["dip"]}
    assert len(ann) == len(rows) == 3
    for name, idx, text in ann:
        values = rows[(name, int(idx))]
        for part in text.split(", "):
            label, shown = part.split("=")
            v = values[labels[label]]
            assert shown == ("n/a" if v is None else f"{v:.4f}")


def test_html_antifragility_table(full_report):
    page = to_html(full_report).decode()
    assert '<table class="antifragility">' in page and 'class="alpha-mean"' in page
    assert "Dashed lines" in page


def test_figure_round_trip(full_report):
    fig = emit_figure_json(full_report)
    back = parse_figure_json(fig)
    orig = multi_bundle()
    assert [s.name for s in back] == [s.name for s in orig]
    for a, b in zip(back, orig):
        assert a.t.tobytes() == b.t.tobytes() and a.q.tobytes() == b.q.tobytes()


def test_figure_derivative_trace_names(full_report):
    names = [d["name"] for d in json.loads(emit_figure_json(full_report))["data"]]
    for s in ("A", "B"):
        assert f"{s}:dQ" in names and f"{s}:d2Q" in names


def test_figure_constant_series():
    rep = analyze(SeriesBundle((TimeSeries("c", [0, 1, 2], [0.7] * 3),)), AnalysisConfig())
    data = json.loads(emit_figure_json(rep))["data"]
    assert len(data) == 1 and data[0]["y"] == [0.7, 0.7, 0.7]


def test_config_echo_complete(full_report):
    cfg = json.loads(to_json(full_report))["config"]
    assert cfg == json.loads(json.dumps(FULL.to_dict()))


def test_timestamp_from_env(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    rep = analyze(multi_bundle(), AnalysisConfig(auc=True))
    assert json.loads(to_json(rep))["timestamp"] == "1700000000"
    monkeypatch.delenv("SOURCE_DATE_EPOCH")
    assert json.loads(to_json(analyze(multi_bundle(), AnalysisConfig())))["timestamp"] is None
