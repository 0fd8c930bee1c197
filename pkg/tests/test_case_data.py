import copy
import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptlhen.case_data import (
    COLD,
    CS,
    HOT,
    CaseError,
    ParamModel,
    case_from_dict,
    load_case,
    mean_heating_value,
    minimal_case,
    read_stream_csv,
    reference_case_path,
    save_case,
    stream_parameter_at,
    validate_case,
)
from ptlhen.pwl_fit import DomainError


@pytest.fixture
def ref_doc():
    return json.loads(reference_case_path().read_text())


class TestLoadCase:
    def test_reference_counts(self, ref_case):
        kinds = [s.kind for s in ref_case.streams]
        assert kinds.count(HOT) + kinds.count(COLD) == 19
        assert kinds.count(CS) == 3
        assert ref_case.hen_config.n_stages == 3
        assert ref_case.hen_config.dt_min == 1.0
        assert (ref_case.opvar.lower, ref_case.opvar.upper) == (1.275, 1.305)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="nope.json"):
            load_case(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(CaseError):
            load_case(p)

    def test_pwl_domain_narrower_than_opvar(self, ref_doc):
        c1 = next(s for s in ref_doc["streams"] if s["id"] == "C1")
        c1["f"] = {"pwl": {"breakpoints": [1.28, 1.30], "values": [1.0, 2.0]}}
        with pytest.raises(DomainError, match="C1"):
            case_from_dict(ref_doc)

    def test_duplicate_ids(self, ref_doc):
        ref_doc["streams"].append(copy.deepcopy(ref_doc["streams"][0]))
        with pytest.raises(CaseError, match="H1"):
            case_from_dict(ref_doc)

    def test_free_temperature_on_process_stream_rejected(self, ref_doc):
        ref_doc["streams"][0]["t_out"] = {"free": [30.0, 36.0]}
        with pytest.raises(CaseError):
            case_from_dict(ref_doc)

    def test_schema_error_names_field(self, ref_doc):
        del ref_doc["economics"]["c_el"]
        with pytest.raises(CaseError, match="c_el"):
            case_from_dict(ref_doc)

    def test_round_trip(self, ref_case, tmp_path):
        p = tmp_path / "case.json"
        save_case(ref_case, p)
        again = load_case(p)
        assert again.to_dict() == ref_case.to_dict()

    def test_minimal_case(self):
        c = minimal_case([("H1", 150, 50, 1.0)], [("C1", 20, 120, 1.0)])
        assert [s.id for s in c.hot] == ["H1"] and [s.id for s in c.cold] == ["C1"]
        assert validate_case(c) == []

    def test_stream_csv_matches_case(self, ref_case):
        rows = read_stream_csv(reference_case_path().with_name("reference_streams.csv"))
        by_id = {s.id: s for s in rows}
        for s in ref_case.streams:
            if s.kind == CS:
                continue
            r = by_id[s.id]
            for u in (1.275, 1.305):
                assert r.t_in.at(u) == pytest.approx(s.t_in.at(u))
                assert r.f.at(u) == pytest.approx(s.f.at(u))


class TestStreamParameterAt:
    def test_h8_constant_temperatures(self, ref_case):
        h8 = ref_case.stream("H8")
        for u in np.linspace(1.275, 1.305, 5):
            t_in, t_out, _ = stream_parameter_at(h8, u)
            assert (t_in, t_out) == pytest.approx((138.9, 137.9))

    @pytest.mark.parametrize("u,t_in", [(1.305, 825.5), (1.275, 805.2)])
    def test_h9_endpoints(self, ref_case, u, t_in):
        assert stream_parameter_at(ref_case.stream("H9"), u)[0] == pytest.approx(t_in)

    def test_constant_stream_independent_of_u(self):
        c = minimal_case([("H1", 150, 50, 2.0)], [("C1", 20, 120, 1.0)])
        assert stream_parameter_at(c.stream("H1"), 0.1) == stream_parameter_at(c.stream("H1"), 0.9)

    def test_outside_range(self, ref_case):
        with pytest.raises(DomainError):
            stream_parameter_at(ref_case.stream("H9"), 1.31, ref_case.opvar)

    def test_free_parameters_rejected(self, ref_case):
        with pytest.raises(CaseError):
            stream_parameter_at(ref_case.stream("CS1"), 1.29)

    @settings(max_examples=100, deadline=None)
    @given(u=st.floats(1.275, 1.305))
    def test_direction_invariant(self, ref_case, u):
        for s in ref_case.streams:
            if s.kind == CS:
                continue
            t_in, t_out, f = stream_parameter_at(s, u)
            assert f > 0
            assert (t_in > t_out) if s.kind == HOT else (t_in < t_out)


class TestValidateCase:
    def test_reference_clean(self, ref_case):
        assert validate_case(ref_case) == []

    def test_hot_stream_reversed(self, ref_case):
        h = ref_case.stream("H1")
        bad = dataclasses.replace(h, t_out=ParamModel.const(60.0))
        c = dataclasses.replace(ref_case, streams=(bad,) + ref_case.streams[1:])
        diags = validate_case(c)
        assert diags and "H1" in diags[0]

    def test_beta_out_of_range(self, ref_case):
        e = dataclasses.replace(ref_case.economics, beta=1.2)
        diags = validate_case(dataclasses.replace(ref_case, economics=e))
        assert any("cost exponent out of (0,1]" in d for d in diags)


def test_mean_heating_value(ref_case):
    prods = ref_case.products
    hv = [p.h_prod for p in prods]
    assert mean_heating_value(prods) == pytest.approx(np.mean(hv))
    w = np.arange(1, len(prods) + 1, dtype=float)
    assert mean_heating_value(prods, w) == pytest.approx(np.dot(w, hv) / w.sum())
