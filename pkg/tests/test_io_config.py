import json

import numpy as np
import pytest

from chartomo import dataio
from chartomo.config import (BUNDLED, SCHEMA, ConfigError, config_hash, load, load_bundled, resolve, validate,
                             with_overrides)
from chartomo.dispfock import PopulationVector, synthesize_rabi_trace
from chartomo.recon import GridSpec, complete_by_symmetry, noiseless_grid, simulate_records
from chartomo.states import make_state

CAT = make_state("cat", r=0.5, alpha=1.5)
SMALL = {"state": {"family": "cat", "params": {"r": 0.5, "re_alpha": 1.5}},
         "grid": {"kind": "half_plane", "extent": 1.0, "spacing": 0.25}}


def test_records_round_trip(tmp_path):
    recs = simulate_records(CAT, GridSpec("half_plane", 1.0, 0.25), 50, 0.01, seed=4)
    dataio.write_records_csv(tmp_path / "r.csv", recs, {"seed": 4})
    header, back = dataio.read_records_csv(tmp_path / "r.csv")
    assert back == recs
    assert header["seed"] == "4" and header["format"] == "chartomo/1"
    dataio.write_records_json(tmp_path / "r.json", recs, {"seed": 4})
    data = json.loads((tmp_path / "r.json").read_text())
    assert len(data["records"]) == len(recs) and data["header"]["seed"] == 4


def test_chi_round_trip(tmp_path):
    grid = complete_by_symmetry(noiseless_grid(CAT, GridSpec("half_plane", 1.0, 0.25)))
    dataio.write_chi_csv(tmp_path / "c.csv", grid, {"spacing": 0.25})
    _, back = dataio.read_chi_csv(tmp_path / "c.csv")
    assert np.array_equal(back.beta, grid.beta) and np.array_equal(back.value, grid.value)
    assert list(back.provenance) == list(grid.provenance)


def test_matrix_round_trip(tmp_path):
    mat = np.arange(6.0).reshape(2, 3) / 7
    dataio.write_matrix(tmp_path / "m.dat", mat, [0, 1, 2], [0, 1], {})
    back, xs, ys = dataio.read_matrix(tmp_path / "m.dat")
    assert np.array_equal(back, mat) and list(xs) == [0, 1, 2] and list(ys) == [0, 1]
    with pytest.raises(ValueError):
        dataio.write_matrix(tmp_path / "bad.dat", mat, [0, 1], [0, 1], {})


def test_fock_tables(tmp_path):
    pops = PopulationVector(np.array([0.5, 0.3, 0.2]), 0.5j)
    dataio.write_populations_csv(tmp_path / "p.csv", pops, {})
    dataio.write_rabi_csv(tmp_path / "t.csv", synthesize_rabi_trace(pops), {})
    header, rows = dataio.read_table(tmp_path / "p.csv")
    assert [float(r["p"]) for r in rows] == [0.5, 0.3, 0.2] and header["im_gamma"] == "0.5"
    assert dataio.read_table(tmp_path / "t.csv")[1]


def test_empty_table_rejected(tmp_path):
    (tmp_path / "e.csv").write_text("# only: header\n")
    with pytest.raises(ValueError):
        dataio.read_table(tmp_path / "e.csv")


def test_defaults_filled():
    cfg = validate(SMALL)
    assert cfg["shots"] == 200 and cfg["pipeline"]["pad_factor"] == 4.0 and cfg["pipeline"]["mirror"] == "auto"


@pytest.mark.parametrize("bad", [
    {**SMALL, "colour": "blue"},
    {**SMALL, "shots": 0},
    {**SMALL, "bias": 0.5},
    {**SMALL, "state": {"family": "unicorn"}},
    {**SMALL, "grid": {"kind": "full_square", "extent": 1.0}},
    {**SMALL, "pipeline": {"fit": {"model": "cat", "free": ["re_l"]}}},
    {**SMALL, "state": {"family": "custom", "params": {}}},
])
def test_schema_rejections(bad):
    with pytest.raises(ConfigError):
        validate(bad)


def test_load_errors(tmp_path):
    (tmp_path / "x.json").write_text("{not json")
    with pytest.raises(ConfigError):
        load(tmp_path / "x.json")
    (tmp_path / "y.json").write_text("[1]")
    with pytest.raises(ConfigError):
        load(tmp_path / "y.json")
    with pytest.raises(ConfigError):
        load_bundled("fig9")


def test_hash_stability():
    a = validate(SMALL)
    b = validate(json.loads(json.dumps(SMALL)))
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) == config_hash(with_overrides(a, output_dir="elsewhere"))
    assert config_hash(a) != config_hash(with_overrides(a, seed=1))
    assert config_hash(a) != config_hash(with_overrides(a, pad_factor=2))
    # key order does not matter
    c = validate(dict(reversed(list(SMALL.items()))))
    assert config_hash(a) == config_hash(c)


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_configs_validate(name):
    cfg = resolve(name)
    assert cfg["name"] == name and "fit" in cfg["pipeline"]


def test_schema_document_in_sync():
    from pathlib import Path
    doc = Path(__file__).resolve().parents[1] / "docs" / "config.schema.json"
    assert json.loads(doc.read_text()) == SCHEMA
