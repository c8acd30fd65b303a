import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resil.errors import FormatError, ParseError, ValidationError
from resil.ingest import load, parse_figure_json, parse_native_json, serialize_native
from resil.series import TimeSeries


def test_native_minimal():
    b = parse_native_json(b'{"series":[{"name":"A","t":[0,1],"q":[1.0,0.5]}]}')
    assert b.names() == ["A"] and len(b.series[0]) == 2
    assert b.window is None


@pytest.mark.parametrize(
    "doc",
    [
        '{"series":[{"name":"A","t":[0,1],"q":[1.0,1.2]}]}',
        '{"series":[{"name":"A","t":[1,0],"q":[1.0,0.5]}]}',
        '{"series":[{"name":"A","t":[0,1,2],"q":[1.0,0.5]}]}',
        '{"series":[{"name":"A","t":[0,1],"q":[1.0,"x"]}]}',
        '{"series":[{"name":"A","t":[0,1],"q":[1.0,0.5]},{"name":"A","t":[0,1],"q":[1,1]}]}',
        '{"series":[]}',
    ],
)
def test_native_validation_errors(doc):
    with pytest.raises(ValidationError):
        parse_native_json(doc)


def test_native_error_names_series_and_index():
    with pytest.raises(ValidationError, match=r"'A'.*index 1"):
        parse_native_json('{"series":[{"name":"A","t":[0,1],"q":[1.0,1.2]}]}')


def test_malformed_json_reports_position():
    with pytest.raises(ParseError) as info:
        parse_native_json(b'{"series": [\n  {"name": }]}')
    assert info.value.lineno == 2


def test_native_window():
    b = parse_native_json('{"series":[{"name":"A","t":[0,1,2],"q":[1,1,1]}],'
                          '"window":{"t0":0.5,"t1":1.5}}')
    assert (b.window.t0, b.window.t1) == (0.5, 1.5)


def test_figure_examples():
    b = parse_figure_json('{"data":[{"x":[0,1,2],"y":[1,0.5,1],"name":"LLL"}]}')
    assert b.names() == ["LLL"]
    b = parse_figure_json('{"data":[{"x":[0,1],"y":[0.9,0.8]},{"x":[0,1],"y":[0.7,0.6]}]}')
    assert b.names() == ["trace-0", "trace-1"]
    with pytest.raises(FormatError):
        parse_figure_json('{"layout":{}}')


def test_figure_skips_traces_without_xy():
    b = parse_figure_json('{"data":[{"type":"pie","values":[1]},{"x":[0,1],"y":[1,1]}]}')
    assert b.names() == ["trace-1"]
    assert b.warnings and "no x/y" in b.warnings[0]


def test_figure_errors():
    with pytest.raises(ValidationError):
        parse_figure_json('{"data":[{"x":[0,1,2],"y":[1,1]}]}')
    with pytest.raises(ValidationError):
        parse_figure_json('{"data":[{"x":[0,1],"y":[1,1.5]}]}')


def test_load_dispatch(tmp_path):
    native = tmp_path / "run.json"
    native.write_text('{"series":[{"name":"A","t":[0,1],"q":[1.0,0.5]}]}')
    fig = tmp_path / "fig.json"
    fig.write_text('{"data":[{"x":[0,1],"y":[0.3,0.4],"name":"F"}]}')
    assert load(native, "native").source["format"] == "native"
    b = load(fig, "auto")
    assert b.source["format"] == "figure" and b.names() == ["F"]
    with pytest.raises(OSError):
        load(tmp_path / "missing.json", "auto")
    junk = tmp_path / "junk.json"
    junk.write_text('{"foo": 1}')
    with pytest.raises(FormatError, match="native.*figure"):
        load(junk, "auto")


def test_native_roundtrip_bytes():
    doc = parse_native_json('{"series":[{"name":"A","t":[0,0.1,0.30000000000000004],'
                            '"q":[1,0.123456789012345678,0.3]}],"window":{"t0":0,"t1":0.2}}')
    once = serialize_native(doc)
    again = serialize_native(parse_native_json(once))
    assert once == again
    assert parse_native_json(once).series[0] == doc.series[0]


json_values = st.recursive(
    st.none() | st.booleans() | st.floats(allow_nan=False, allow_infinity=False) | st.text(max_size=3),
    lambda kids: st.lists(kids, max_size=4) | st.dictionaries(st.text(max_size=3), kids, max_size=4),
    max_leaves=20,
)
numbers = st.lists(st.floats(-2, 2, allow_nan=False) | st.integers(-3, 3), max_size=6)


@settings(max_examples=300)
@given(st.one_of(
    json_values,
    st.fixed_dictionaries({"series": st.lists(st.fixed_dictionaries(
        {"name": st.sampled_from(["a", "b"]), "t": numbers, "q": numbers}), max_size=3)}),
    st.fixed_dictionaries({"data": st.lists(st.fixed_dictionaries(
        {"x": numbers, "y": numbers}), max_size=3)}),
))
def test_fuzz_never_yields_invalid_bundle(doc):
    text = json.dumps(doc)
    for parse in (parse_native_json, parse_figure_json):
        try:
            bundle = parse(text)
        except (FormatError, ValidationError):
            continue
        for s in bundle:
            assert isinstance(s, TimeSeries)
            assert len(s) >= 2 and (s.q >= 0).all() and (s.q <= 1).all()
            assert (s.t[1:] > s.t[:-1]).all()
