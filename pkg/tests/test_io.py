import json

import numpy as np
import pytest
from pydantic import ValidationError

from robin_nls.config import DEFAULT_TOLERANCES, RunConfig, load_tolerances
from robin_nls.errors import ProfileFormatError, ValidationFailure
from robin_nls.models import ComparisonReport
from robin_nls.scattering import InitialProfile
from robin_nls.serialization import (
    TABLE_HEADER,
    format_csv,
    load_config_profile,
    parse_profile,
    profile_document,
    profile_from_document,
    read_csv,
    read_json,
    read_profile,
    read_spectrum,
    read_table,
    write_csv,
    write_json,
    write_spectrum,
    write_table,
)
from robin_nls.solitons import SolitonParams, soliton_profile
from robin_nls.zeros import DiscreteSpectrum


def test_sampled_profile_round_trip(tmp_path, focusing_profile):
    path = write_json(tmp_path / "u0.json", profile_document(focusing_profile))
    profile = read_profile(path)
    assert profile.N == focusing_profile.N
    assert profile.h == focusing_profile.h
    assert profile.q == focusing_profile.q
    assert np.array_equal(profile.samples, focusing_profile.samples)
    assert "lambda" in json.loads(path.read_text())
    assert json.loads(path.read_text())["grid"]["N"] == focusing_profile.N
    assert profile.L == focusing_profile.L


def test_grid_counts_intervals():
    text = json.dumps({"lambda": 1, "q": -1.0, "grid": {"h": 0.5, "N": 3},
                       "data": [[0.3, 0.0], [0.1, 0.0], [0.02, 0.0], [0.0, 0.0]]})
    profile = profile_from_document(parse_profile(text))
    assert profile.N == 3
    assert profile.L == 1.5


def test_empty_data_is_rejected():
    text = json.dumps({"lambda": 1, "q": -1.0, "grid": {"h": 0.1, "N": 2}, "data": []})
    with pytest.raises(ProfileFormatError):
        parse_profile(text)


def test_json_syntax_error_reports_line_and_column():
    with pytest.raises(ProfileFormatError) as info:
        parse_profile('{\n  "lambda": 1,\n  "q": ,\n}', source="u0.json")
    assert info.value.location.startswith("u0.json:3:")
    assert "u0.json:3:" in str(info.value)


def test_schema_error_reports_the_field():
    text = json.dumps({"lambda": 1, "q": 1.0, "grid": {"h": 0.1, "N": 2}, "data": [[0, 0], [0, "x"], [0, 0]]})
    with pytest.raises(ProfileFormatError) as info:
        parse_profile(text, source="u0.json")
    assert info.value.location == "u0.json:data.1.1"


def test_row_count_must_match_grid():
    text = json.dumps({"lambda": 1, "q": 1.0, "grid": {"h": 0.1, "N": 3}, "data": [[0, 0], [0, 0]]})
    with pytest.raises(ProfileFormatError):
        parse_profile(text)


def test_missing_file_is_a_format_error(tmp_path):
    with pytest.raises(ProfileFormatError):
        read_profile(tmp_path / "missing.json")


def test_generator_document_matches_closed_form():
    document = parse_profile(json.dumps({"generator": "focusing_soliton", "omega": 1.0, "phi": 0.5}))
    profile = profile_from_document(document)
    expected = soliton_profile(SolitonParams(lam=-1, omega=1.0, phi=0.5), profile.x)
    assert np.max(np.abs(profile.samples - expected)) <= 1e-15
    assert profile.h == 2.0 ** -7


def test_unknown_generator():
    with pytest.raises(ValidationFailure):
        profile_from_document(parse_profile(json.dumps({"generator": "sawtooth"})))


def test_csv_round_trip_is_exact(tmp_path, rng):
    rows = rng.standard_normal((10_000, 3)) * 10.0 ** rng.integers(-12, 12, size=(10_000, 3))
    header = ["x", "Re u", "Im u"]
    path = write_csv(tmp_path / "big.csv", header, rows)
    read_header, values = read_csv(path)
    assert read_header == header
    assert np.array_equal(values, rows)
    assert format_csv(read_header, values) == path.read_text(encoding="utf-8")


def test_csv_reports_bad_cells(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1.0,2.0\n3.0,oops\n", encoding="utf-8")
    with pytest.raises(ProfileFormatError) as info:
        read_csv(path)
    assert info.value.location.endswith(":3:y")


def test_table_file_round_trip(tmp_path, gaussian_table):
    path = write_table(tmp_path / "table.csv", gaussian_table)
    assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(TABLE_HEADER)
    columns = read_table(path)
    assert np.array_equal(columns["k"], gaussian_table.k_grid)
    assert np.array_equal(columns["a"], gaussian_table.a)
    assert np.array_equal(columns["r"], gaussian_table.r)


def test_spectrum_round_trip(tmp_path):
    spectrum = DiscreteSpectrum(lam=-1, q=0.46, xi=(0.5j, -0.3 + 0.2j), c=(-0.6j, 0.1 + 0.2j), dropped=(0.23j,))
    path = write_spectrum(tmp_path / "spectrum.json", spectrum)
    raw = json.loads(path.read_text())
    assert raw["M"] == 2
    assert raw["zeros"][0]["xi"] == [0.0, 0.5]
    back = read_spectrum(path)
    assert back.xi == spectrum.xi
    assert back.c == spectrum.c
    assert back.dropped == spectrum.dropped


def test_spectrum_count_must_match(tmp_path):
    path = tmp_path / "spectrum.json"
    path.write_text(json.dumps({"M": 2, "zeros": [{"xi": [0.0, 0.5]}], "lambda": 1, "q": 1.0}))
    with pytest.raises(ProfileFormatError):
        read_spectrum(path)


def test_report_round_trip(tmp_path):
    report = ComparisonReport(
        regime="defocusing_qneg", lam=1, q=-1.0, t_values=[16.0, 32.0], errors=[0.1 / 3, 1e-17],
        exponent=0.731, threshold=1e-3, passed=True,
    )
    path = write_json(tmp_path / "comparison_report.json", report)
    assert ComparisonReport.model_validate(read_json(path)) == report


def test_tolerance_overrides(tmp_path):
    path = tmp_path / "tol.json"
    path.write_text(json.dumps({"tail_tol": 1e-8, "max_refinements": 6}))
    tol = load_tolerances(path)
    assert tol.tail_tol == 1e-8
    assert tol.max_refinements == 6
    assert tol.unit_tol == DEFAULT_TOLERANCES.unit_tol
    assert load_tolerances(None) is DEFAULT_TOLERANCES


@pytest.mark.parametrize("payload", [{"tail_tl": 1e-8}, {"tail_tol": -1.0}, [1, 2]])
def test_bad_tolerance_files(tmp_path, payload):
    path = tmp_path / "tol.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(ProfileFormatError):
        load_tolerances(path)


def test_run_config_needs_one_source(tmp_path):
    with pytest.raises(ValidationError):
        RunConfig(subcommand="scatter")
    with pytest.raises(ValidationError):
        RunConfig(subcommand="scatter", profile_path=tmp_path / "u0.json", generator="gaussian")
    assert RunConfig(subcommand="soliton").threads == 1


def test_config_profile_from_generator():
    config = RunConfig(
        subcommand="scatter", generator="gaussian",
        generator_params={"amplitude": 0.3, "lambda": 1, "q": -1.0},
    )
    profile = load_config_profile(config)
    assert isinstance(profile, InitialProfile)
    assert profile.lam == 1
    assert profile.q == -1.0
