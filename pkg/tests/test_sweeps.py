import json
import math
import os

import numpy as np
import pytest

from pulse_dicke import (EmptyPayloadError, NoMinimumError,
                         OutputError, SweepGrid, SweepRecord,
                         default_upsilon_grid, entropy_map, find_ustar,
                         negativity_trace, read_records, sweep_fidelity,
                         write_results)
from pulse_dicke.sweeps import (ENTROPY_COLUMNS, FIDELITY_COLUMNS,
                                NEGATIVITY_COLUMNS)

FIDELITY_HEADER = ("n_attackers,upsilon,n_max_used,fidelity_final,"
                   "entropy_final,entropy_max,truncation_tail,norm_drift")


@pytest.fixture(scope="module")
def small_records():
    grid = SweepGrid(n_values=(1,), upsilon_values=np.array([1.0, 3.0]))
    return sweep_fidelity(grid, samples=21, n_max_start=16)


def test_default_grid_shape():
    g = default_upsilon_grid()
    assert len(g) == 60
    assert abs(g[0] - 0.05) < 1e-12 and abs(g[-1] - 5.0) < 1e-12
    assert np.all(np.diff(g) > 0)
    step = g[1:] / g[:-1]
    assert np.allclose(step, step[0])


def test_grid_validation():
    with pytest.raises(ValueError):
        SweepGrid(n_values=(), upsilon_values=np.array([1.0]))
    with pytest.raises(ValueError):
        SweepGrid(n_values=(1,), upsilon_values=np.array([2.0, 1.0]))
    with pytest.raises(ValueError):
        SweepGrid(n_values=(1,), upsilon_values=np.array([0.5]), nbar=-1.0)


def test_sweep_records_are_ordered_and_stamped(small_records):
    assert [r.upsilon for r in small_records] == [1.0, 3.0]
    for r in small_records:
        assert r.status == "OK"
        assert 0.0 <= r.fidelity_final <= 1.0
        assert r.entropy_max >= r.entropy_final >= 0.0
        assert r.n_max_used >= 16
        assert r.truncation_tail < 1e-8
        assert r.kappa is None


def test_csv_header_is_pinned(small_records, tmp_path):
    path = tmp_path / "fid.csv"
    write_results(small_records, str(path))
    first = path.read_text().splitlines()[0]
    assert first == FIDELITY_HEADER
    assert FIDELITY_COLUMNS == tuple(FIDELITY_HEADER.split(","))


def test_csv_roundtrip_field_for_field(small_records, tmp_path):
    path = tmp_path / "fid.csv"
    write_results(small_records, str(path))
    back = read_records(str(path))
    assert back == small_records


def test_write_overwrites_idempotently(small_records, tmp_path):
    path = tmp_path / "fid.csv"
    write_results(small_records, str(path))
    first = path.read_bytes()
    write_results(small_records, str(path))
    assert path.read_bytes() == first


def test_empty_payload_rejected(tmp_path):
    path = tmp_path / "never.csv"
    with pytest.raises(EmptyPayloadError):
        write_results([], str(path))
    assert not path.exists()


def test_unwritable_path_leaves_no_partial_file(small_records, tmp_path):
    missing = tmp_path / "no_such_dir" / "out.csv"
    with pytest.raises(OutputError):
        write_results(small_records, str(missing))
    assert not missing.exists()
    assert not os.path.exists(str(missing) + ".tmp")


def test_json_output_mirrors_records(small_records, tmp_path):
    path = tmp_path / "fid.json"
    write_results(small_records, str(path), fmt="json")
    body = json.loads(path.read_text())
    assert body["kind"] == "sweep_records"
    assert len(body["records"]) == len(small_records)
    rec = body["records"][0]
    assert rec["n_attackers"] == 1
    assert rec["upsilon"] == 1.0
    assert rec["status"] == "OK"
    assert math.isclose(rec["fidelity_final"], small_records[0].fidelity_final)


def test_failed_point_recorded_not_raised():
    grid = SweepGrid(n_values=(3,), upsilon_values=np.array([0.25, 5.0]))
    records = sweep_fidelity(grid, samples=21, n_max_start=16, n_max_ceiling=16)
    assert len(records) == 2
    assert records[0].status.startswith("FAILED")
    assert math.isnan(records[0].fidelity_final)
    assert records[1].status == "OK"


def test_find_ustar_requires_interior_minimum():
    with pytest.raises(NoMinimumError):
        find_ustar(1, bracket=(1.0, 5.0), coarse_points=8, n_max_start=16)


def test_entropy_map_table_layout():
    u = np.array([1.0, 2.0])
    table = entropy_map(2, u, samples_per_trajectory=9, n_max_start=16)
    assert table.n_attackers == 2
    assert table.rows.shape == (18, 4)
    assert np.allclose(np.unique(table.rows[:, 0]), u)
    assert np.all(table.rows[:, 3] >= 0.0)
    assert len(table.per_upsilon_max) == 2
    assert abs(table.per_upsilon_max[0]
               - table.rows[table.rows[:, 0] == 1.0][:, 3].max()) < 1e-15
    assert ENTROPY_COLUMNS == ("n_attackers", "upsilon", "time", "lam",
                               "entropy")


def test_entropy_map_csv(tmp_path):
    table = entropy_map(2, np.array([2.0]), samples_per_trajectory=5,
                        n_max_start=16)
    path = tmp_path / "ent.csv"
    write_results(table, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "n_attackers,upsilon,time,lam,entropy"
    assert len(lines) == 6
    assert lines[1].split(",")[0] == "2"


def test_negativity_trace_layout_and_csv(tmp_path):
    trace = negativity_trace(1, 1.0, kappa_values=(0.0, 0.1), samples=5,
                             n_max=16)
    assert trace.rows.shape == (10, 7)
    assert list(trace.rows[:5, 0]) == [0.0] * 5
    assert list(trace.rows[5:, 0]) == [0.1] * 5
    assert np.all(np.abs(trace.rows[:, 6] - 1.0) < 1e-6)
    path = tmp_path / "neg.csv"
    write_results(trace, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(NEGATIVITY_COLUMNS)
    assert len(lines) == 11


def test_float_formatting_shortest_roundtrip(tmp_path):
    rec = SweepRecord(n_attackers=1, upsilon=0.1, n_max_used=16,
                      fidelity_final=1.0 / 3.0, entropy_final=0.0,
                      entropy_max=float("nan"), truncation_tail=1e-300,
                      norm_drift=2.0 ** -52)
    path = tmp_path / "fmt.csv"
    write_results([rec], str(path))
    row = path.read_text().splitlines()[1].split(",")
    assert row[1] == "0.1"
    assert float(row[3]) == 1.0 / 3.0
    assert math.isnan(float(row[5]))
    assert float(row[6]) == 1e-300
    assert float(row[7]) == 2.0 ** -52
