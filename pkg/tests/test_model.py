from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lbbd.generate import LCG, GeneratorParams, random_instance
from lbbd.model import (
    Assignment,
    Facility,
    Instance,
    InstanceFormatError,
    Job,
    LinearCut,
    Mvar,
    X,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    save_instance,
    validate,
)


def two_jobs() -> Instance:
    return Instance(
        (Job(1, 0, 6, (2, 3), (1, 1), (4, 5)), Job(2, 1, 9, (4, 1), (2, 1), (3, 3))),
        (Facility(1, 2), Facility(2, 1)),
        "makespan",
    )


def test_valid_instance_has_no_diagnostics():
    assert validate(two_jobs()) == []


def test_zero_capacity_reported():
    inst = Instance((Job(1, 0, 5, (1,), (1,), (1,)),), (Facility(1, 0),), "makespan")
    diags = validate(inst)
    assert any("facility 1 capacity < 1" in d for d in diags)


def test_demand_over_capacity_is_diagnostic_not_error():
    jobs = tuple(Job(j, 0, 9, (1,), (2 if j == 3 else 1,), (1,)) for j in (1, 2, 3))
    inst = Instance(jobs, (Facility(1, 1),), "makespan")
    diags = validate(inst)
    assert len(diags) == 1 and "job 3 unassignable to facility 1" in diags[0]
    assert not inst.assignable(1, 3)


def test_save_load_roundtrip(tmp_path):
    inst = two_jobs()
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    assert load_instance(path) == inst


def test_missing_capacity_names_field(tmp_path):
    data = instance_to_dict(two_jobs())
    del data["facilities"][0]["capacity"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(InstanceFormatError) as err:
        load_instance(path)
    assert "capacity" in str(err.value)
    assert err.value.locus == "facilities[0].capacity"


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "facilities": [,]\n}')
    with pytest.raises(InstanceFormatError) as err:
        load_instance(path)
    assert err.value.locus.startswith("line 2:")


def test_negative_release_loads_then_validates(tmp_path):
    data = instance_to_dict(two_jobs())
    data["jobs"][0]["release"] = -1
    inst = instance_from_dict(data)
    assert any("job 1" in d and "release" in d for d in validate(inst))


def test_assignment_partitions_jobs():
    a = Assignment({1: 2, 2: 1, 3: 2})
    parts = a.partition([1, 2])
    assert parts == {1: [2], 2: [1, 3]}
    assert sorted(sum(parts.values(), [])) == [1, 2, 3]


def test_cut_bound_on():
    cut = LinearCut({Mvar(0): 1, X(0, 1): -3}, 2, "t", 0)
    assert cut.bound_on(Mvar(0), {X(0, 1): 1}) == 5
    assert cut.bound_on(Mvar(0), {}) == 2


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from(["makespan", "cost", "tardiness"]))
def test_roundtrip_random(seed, objective):
    inst = random_instance(LCG(seed), objective, GeneratorParams(max_horizon=None))
    assert instance_from_dict(json.loads(json.dumps(instance_to_dict(inst)))) == inst
