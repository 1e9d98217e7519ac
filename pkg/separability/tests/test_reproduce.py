import json
import math
from io import StringIO

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError
from scipy.optimize import brentq

from separability.services.errors import BadConfig, ParseError
from separability.services.reproduce import (
    GHZ_CORRECTED_OFFSET, GHZ_PRINTED_OFFSET, ghz_closed_form, load_reference_values, number, reproduce,
)


def ghz_bisep_threshold():
    # zero-parameter bisep on GHZ + noise: average realigned norm against 1 + 2/3
    def norm(x):
        return 1.5 * (1.0 - x) + np.sqrt((2.0 - x) ** 2 + x * x) / 4.0

    return brentq(lambda x: norm(x) - 5.0 / 3.0, 0.0, 1.0, xtol=1e-14)


def values_file(tmp_path, *, bell_value=1.0, ordering="<"):
    data = {
        "version": 1,
        "examples": [
            {
                "example": 1,
                "title": "bell concurrence and ghz threshold",
                "checks": [
                    {"key": "bell.conc", "label": "concurrence bound", "value": bell_value, "tol": 1e-9,
                     "location": "hand computed",
                     "compute": {"kind": "bound", "measure": "concurrence", "state": "bell", "params": [],
                                 "mu": [0], "nu": [0]}},
                    {"key": "ghz.bisep", "label": "bisep threshold", "value": ghz_bisep_threshold(),
                     "tol": 1e-6, "location": "hand computed",
                     "compute": {"kind": "threshold", "family": "ghz_noise", "lo": 0, "hi": 1,
                                 "criterion": "bisep", "mu": [0], "nu": [0]}},
                    {"key": "ref", "label": "printed only", "value": 2.0, "tol": 0, "location": "table",
                     "compute": {"kind": "reference"}},
                ],
                "orderings": [["ghz.bisep", ordering, "ref"]],
                "warnings": ["a documented inconsistency"],
            },
        ],
    }
    path = tmp_path / "values.json"
    path.write_text(json.dumps(data))
    return path


def test_number_parsing():
    assert number(2) == 2.0
    assert number("37/16") == pytest.approx(37 / 16)
    assert number("sqrt(2)") == pytest.approx(math.sqrt(2.0))
    assert number(" 1/4 ") == 0.25


def test_ghz_closed_forms():
    assert GHZ_CORRECTED_OFFSET == pytest.approx((6.0 + 2.0 / 3.0) / math.sqrt(2.0))
    assert ghz_closed_form(0.0, GHZ_CORRECTED_OFFSET) == pytest.approx(math.sqrt(2.0) / 6.0)
    assert ghz_closed_form(0.0, GHZ_PRINTED_OFFSET) == pytest.approx(0.9428, abs=1e-4)


def test_bundled_values_load():
    examples = load_reference_values()
    assert [e["example"] for e in examples] == [1, 2, 3, 4, 5, 6]
    assert all(check["tol"] >= 0 for e in examples for check in e["checks"])


def test_reproduce_custom_values(tmp_path):
    result = reproduce(path=values_file(tmp_path), threads=2)
    rows = {r.key: r for r in result.rows}
    assert rows["bell.conc"].computed == pytest.approx(1.0)
    assert rows["bell.conc"].ok
    assert rows["ghz.bisep"].ok
    assert rows["ref"].computed is None and rows["ref"].ok is None
    assert result.orderings[0].ok
    assert result.warnings == ("example 1: a documented inconsistency",)
    assert result.deviations == []


def test_reproduce_flags_deviations(tmp_path):
    result = reproduce(path=values_file(tmp_path, bell_value=0.5, ordering=">"))
    assert len(result.deviations) == 2
    assert result.deviations[0].startswith("bell.conc")


def test_reproduce_unknown_example(tmp_path):
    with pytest.raises(BadConfig):
        reproduce([7], path=values_file(tmp_path))


def test_reproduce_rejects_invalid_values_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"version": 1, "examples": [{"example": 1, "title": "x", "checks": [
        {"key": "k", "label": "l", "tol": 0, "location": "here", "compute": {"kind": "reference"}}]}]}))
    with pytest.raises(ParseError):
        reproduce(path=path)
    with pytest.raises(ParseError):
        reproduce(path=tmp_path / "missing.json")


def test_ghz_closed_form_rows():
    result = reproduce([6])
    rows = {r.key: r for r in result.rows}
    corrected = rows["ex6.closed.corrected.x0"]
    assert corrected.computed == pytest.approx(math.sqrt(2.0) / 6.0)
    assert corrected.ok
    printed = rows["ex6.closed.printed.x0"]
    assert printed.informational and printed.ok is False
    assert not printed.is_deviation
    assert any("formula" in w for w in result.warnings)
    assert [o.left for o in result.orderings] == ["ex6.thm", "ex6.sun"]
    for key in ("ex6.thm", "ex6.sun", "ex6.scalar"):
        assert rows[key].ok, rows[key]
    assert all(o.ok for o in result.orderings)


def test_command_exit_0(tmp_path):
    out = StringIO()
    call_command("reproduce", f"--values={values_file(tmp_path)}", stdout=out)
    text = out.getvalue()
    assert "bell.conc" in text
    assert "ordering ghz.bisep < ref" in text
    assert "warning: example 1: a documented inconsistency" in text


def test_command_exit_5_lists_deviations(tmp_path):
    out = StringIO()
    with pytest.raises(CommandError) as exc:
        call_command("reproduce", f"--values={values_file(tmp_path, bell_value=0.5)}", stdout=out)
    assert exc.value.returncode == 5
    assert "bell.conc" in str(exc.value)
    assert "DEVIATION" in out.getvalue()


def test_command_unknown_example_exit_2(tmp_path):
    with pytest.raises(CommandError) as exc:
        call_command("reproduce", "--example=9", f"--values={values_file(tmp_path)}", stdout=StringIO())
    assert exc.value.returncode == 2
    with pytest.raises(CommandError) as exc:
        call_command("reproduce", "--example=one", stdout=StringIO())
    assert exc.value.returncode == 2


def test_command_csv_and_json(tmp_path):
    out = StringIO()
    call_command("reproduce", f"--values={values_file(tmp_path)}", "--csv", stdout=out)
    lines = out.getvalue().strip().splitlines()
    assert lines[0] == "example,key,label,paper,computed,delta,tol,status"
    assert lines[3].endswith(",reference")

    out = StringIO()
    call_command("reproduce", f"--values={values_file(tmp_path)}", "--json", stdout=out)
    data = json.loads(out.getvalue())
    assert [r["key"] for r in data["reproduction"]] == ["bell.conc", "ghz.bisep", "ref"]
    assert data["orderings"][0]["ok"] is True


def test_tiles_concurrence_example():
    out = StringIO()
    call_command("reproduce", "--example=3", stdout=out)
    text = out.getvalue()
    assert "0.04407" in text
    assert "0.05399" in text


@pytest.fixture(scope="module")
def bundled():
    return reproduce([1, 2, 3, 4, 5, 6])


def test_bundled_reference_values_reproduce(bundled):
    assert bundled.deviations == []
    rows = {r.key: r for r in bundled.rows}
    assert rows["ex1.thm1"].computed == pytest.approx(0.232958, abs=5e-6)
    assert rows["ex1.sun"].computed == pytest.approx(0.233889, abs=5e-6)
    assert rows["ex1.shi"].computed == pytest.approx(0.233931, abs=5e-6)
    assert rows["ex3.concurrence"].computed == pytest.approx(0.0440636, abs=5e-6)
    assert rows["ex4.thm1"].computed == pytest.approx(0.882201, abs=5e-6)
    assert rows["ex4.shi"].computed == pytest.approx(0.884372, abs=5e-6)
    for t in ("0.2", "0.4", "0.6", "0.8", "0.9"):
        assert rows[f"ex2.t{t}.thm1"].ok, t


@pytest.mark.parametrize("example", [1, 2, 3, 4, 5, 6])
def test_bundled_orderings_hold(bundled, example):
    orderings = [o for o in bundled.orderings if o.example == example]
    assert all(o.ok for o in orderings), [o.as_dict() for o in orderings if not o.ok]
