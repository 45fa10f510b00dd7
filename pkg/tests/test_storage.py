import numpy as np
import pytest

from vortexlab.core import ParticleCloud, SimulationState
from vortexlab.configlab import recentre
from vortexlab import example_configuration
from vortexlab.errors import SnapshotFormatError
from vortexlab.patches import RunConfig, initial_state
from vortexlab.storage import (
    read_checkpoint,
    read_snapshot_csv,
    run_config_from_dict,
    run_config_to_dict,
    system_from_dict,
    system_to_dict,
    write_bootstrap_csv,
    write_checkpoint,
    write_snapshot_csv,
)


@pytest.fixture
def config():
    return RunConfig(reference=recentre(example_configuration()), t0=100.0,
                     t_end=110.0, particles_per_patch=23, dt=0.5)


@pytest.fixture
def state(config):
    return initial_state(config)


def test_snapshot_roundtrip_bit_exact(tmp_path, state):
    path = tmp_path / "snap.csv"
    write_snapshot_csv(state, path)
    back = read_snapshot_csv(path)
    assert back.time == state.time
    for a, b in zip(back.clouds, state.clouds):
        assert np.array_equal(a.positions, b.positions)
        assert np.array_equal(a.strengths, b.strengths)
        assert a.blob_radius == b.blob_radius
        assert a.sign == b.sign


def test_snapshot_missing_file(tmp_path):
    with pytest.raises(SnapshotFormatError):
        read_snapshot_csv(tmp_path / "nope.csv")


def test_snapshot_missing_metadata(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("cloud_id,gamma,x,y\n0,1,0,0\n")
    with pytest.raises(SnapshotFormatError):
        read_snapshot_csv(p)


def test_snapshot_wrong_version(tmp_path, state):
    p = tmp_path / "v99.csv"
    write_snapshot_csv(state, p)
    text = p.read_text().replace("format_version=1", "format_version=99")
    p.write_text(text)
    with pytest.raises(SnapshotFormatError):
        read_snapshot_csv(p)


def test_snapshot_corrupt_metadata(tmp_path):
    p = tmp_path / "corrupt.csv"
    p.write_text("# format_version=1 time=oops blob_radius=0.1 signs=1,1,1\n"
                 "cloud_id,gamma,x,y\n")
    with pytest.raises(SnapshotFormatError):
        read_snapshot_csv(p)


def test_snapshot_missing_cloud(tmp_path):
    p = tmp_path / "partial.csv"
    p.write_text("# format_version=1 time=0 blob_radius=0.1 signs=1,1,1\n"
                 "cloud_id,gamma,x,y\n0,1,0,0\n1,1,2,0\n")
    with pytest.raises(SnapshotFormatError):
        read_snapshot_csv(p)


def test_system_dict_roundtrip():
    s = recentre(example_configuration())
    back = system_from_dict(system_to_dict(s))
    assert np.array_equal(back.positions, s.positions)
    assert np.array_equal(back.circulations, s.circulations)


def test_run_config_dict_roundtrip(config):
    back = run_config_from_dict(run_config_to_dict(config))
    assert back.t0 == config.t0
    assert back.dt == config.dt
    assert back.particles_per_patch == config.particles_per_patch
    assert back.tree_params == config.tree_params
    assert np.array_equal(back.reference.positions, config.reference.positions)


def test_run_config_bad_schema(config):
    d = run_config_to_dict(config)
    d["schema_version"] = 0
    with pytest.raises(SnapshotFormatError):
        run_config_from_dict(d)


def test_checkpoint_roundtrip(tmp_path, state, config):
    write_checkpoint(state, config, tmp_path / "ckpt")
    back_state, back_config = read_checkpoint(tmp_path / "ckpt")
    assert back_state.time == state.time
    assert np.array_equal(back_state.all_positions(), state.all_positions())
    assert back_config.t_end == config.t_end


def test_checkpoint_missing(tmp_path):
    with pytest.raises(SnapshotFormatError):
        read_checkpoint(tmp_path / "void")


def test_bootstrap_csv(tmp_path):
    rows = [{"t": 1.0, "a": 0.1}, {"t": 2.0, "a": 0.2}]
    path = tmp_path / "table.csv"
    write_bootstrap_csv(rows, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,a"
    assert len(lines) == 3


def test_bootstrap_csv_empty(tmp_path):
    with pytest.raises(SnapshotFormatError):
        write_bootstrap_csv([], tmp_path / "empty.csv")
