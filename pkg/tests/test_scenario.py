from pathlib import Path

import pytest
import yaml

from fsolatency.orbital import ConstellationSpec
from fsolatency.studio import ScenarioError, default_scenario, dump_scenario, load_scenario, parse_scenario

DATA = Path(__file__).parent / "data"

MINIMAL = """
sites:
  - {name: Alpha, latitude_deg: 10, longitude_deg: 20}
  - {name: Beta, latitude_deg: -5, longitude_deg: 40}
connections:
  - [Alpha, Beta]
"""


def write(tmp_path, text, name="s.yaml"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_default_scenario_contents():
    sc = default_scenario()
    assert len(sc.sites) == 10
    assert {s.name for s in sc.sites} == {
        "New York", "London", "Cairo", "Tokyo", "Sao Paulo", "Istanbul", "Cape Town", "Sydney",
        "Mexico City", "Shanghai",
    }
    assert set(sc.connections) == {
        ("New York", "London"), ("Mexico City", "Shanghai"), ("Sao Paulo", "Istanbul"),
        ("Cape Town", "Sydney"), ("Cairo", "Tokyo"),
    }
    assert sc.lisl_ranges_km == (1575, 1731, 2000, 2500, 3000, 3500, 4000, 4500, 5016)
    assert sc.power_limits_w == (None, 0.5, 0.3, 0.1)
    assert sc.slot_count == 100 and sc.slot_interval_s == 1.0
    assert sc.constellation == ConstellationSpec()
    assert all(s.altitude_km == 0.1 for s in sc.sites)
    assert load_scenario("default") == sc


def test_minimal_file_gets_defaults(tmp_path):
    sc = load_scenario(write(tmp_path, MINIMAL))
    assert [s.name for s in sc.sites] == ["Alpha", "Beta"]
    assert sc.connections == (("Alpha", "Beta"),)
    d = default_scenario()
    assert sc.lisl_ranges_km == d.lisl_ranges_km
    assert sc.power_limits_w == d.power_limits_w
    assert sc.slot_count == 100 and sc.solver == "auto"
    assert sc.node_delay_ms == 10.0 and sc.node_degree_cap == 4


def test_empty_file_is_default(tmp_path):
    assert load_scenario(write(tmp_path, "")) == default_scenario()


def test_reduced_fixture_loads():
    sc = load_scenario(DATA / "small.yaml")
    assert sc.constellation.total == 192


@pytest.mark.parametrize("text,needle", [
    (MINIMAL + "connections: [[Alpha, Gamma]]\n", "Gamma"),
    (MINIMAL + "bogus: 1\n", "bogus"),
    (MINIMAL + "constellation: {planes: 3}\n", "constellation"),
    (MINIMAL + "lisl_ranges_km: [1000, 6000]\n", "lisl_ranges_km[1]"),
    (MINIMAL + "lisl_ranges_km: [0]\n", "lisl_ranges_km[0]"),
    (MINIMAL + "slot_count: 0\n", "slot_count"),
    (MINIMAL + "slot_count: 2.5\n", "slot_count"),
    (MINIMAL + "solver: cplex\n", "solver"),
    (MINIMAL + "power_limits_w: [-1]\n", "power_limits_w[0]"),
    (MINIMAL + "schema_version: 2\n", "schema_version"),
    (MINIMAL + "connections: [[Alpha, Alpha]]\n", "connections[0]"),
    (MINIMAL.replace("latitude_deg: 10", "latitude_deg: 95"), "sites[0]"),
    (MINIMAL.replace("latitude_deg: 10", "latitude_deg: ten"), "sites[0].latitude_deg"),
    (MINIMAL.replace("Beta, latitude", "Alpha, latitude").replace("[Alpha, Beta]", "[Alpha, Alpha]"), "duplicate"),
    (MINIMAL + "constellation: {phasing_factor: 80}\n", "constellation"),
    (MINIMAL + "optics: {eta_t: 2.0}\n", "optics"),
    (MINIMAL + "atmosphere: {fog: 1}\n", "atmosphere"),
    ("- just\n- a list\n", "mapping"),
])
def test_validation_errors_name_the_field(tmp_path, text, needle):
    with pytest.raises(ScenarioError) as err:
        load_scenario(write(tmp_path, text))
    assert needle in str(err.value)


def test_parse_error_reports_position(tmp_path):
    with pytest.raises(ScenarioError) as err:
        load_scenario(write(tmp_path, "sites: [\n  {name: x\n"))
    assert "line" in str(err.value) and "column" in str(err.value)


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "nope.yaml")


def test_round_trip_through_yaml():
    sc = load_scenario(DATA / "small.yaml")
    assert parse_scenario(yaml.safe_load(dump_scenario(sc))) == sc


def test_hash_tracks_content_only(tmp_path):
    a = load_scenario(write(tmp_path, MINIMAL, "a.yaml"))
    b = load_scenario(write(tmp_path, MINIMAL + "output_dir: elsewhere\n", "b.yaml"))
    c = load_scenario(write(tmp_path, MINIMAL + "slot_count: 99\n", "c.yaml"))
    d = load_scenario(write(tmp_path, MINIMAL.replace("longitude_deg: 40", "longitude_deg: 40.001"), "d.yaml"))
    assert a.content_hash() == b.content_hash()
    assert len({a.content_hash(), c.content_hash(), d.content_hash()}) == 3


def test_overrides_reach_models(tmp_path):
    sc = load_scenario(write(tmp_path, MINIMAL + "optics: {receiver_diameter_mm: 120}\natmosphere: {particle_size_coeff: 1.3}\n"))
    assert sc.optics.receiver_diameter_mm == 120.0
    assert sc.atmosphere.particle_size_coeff == 1.3
    assert sc.optics.eta_t == 0.8
