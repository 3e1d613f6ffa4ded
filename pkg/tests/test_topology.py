"""Topology catalogue and route checks."""

import pytest

from owcfog.errors import ConfigError
from owcfog.topology import (
    MOBILE_ROUTE_EFFICIENCY_W_PER_MBPS,
    NetworkDevice,
    ProcessingNode,
    Route,
    TopologyConfig,
    build_reference_topology,
    derive_route_efficiency,
    route_capacity,
    topology_from_document,
    topology_to_document,
    validate_topology,
)


@pytest.fixture()
def topo():
    return build_reference_topology()


def test_reference_nodes_carry_catalogue_values(topo):
    want = {
        "ccloud": (144000.0, 0.000796),
        "metrofog": (73440.0, 0.00129),
        "campfog": (35160.0, 0.0027),
        "buildfog": (34200.0, 0.0028),
        "roomfog": (6200.0, 0.003),
    }
    for node_id, (cap, eff) in want.items():
        n = topo.node(node_id)
        assert n.capacity_mips == cap
        assert n.efficiency_w_per_mips == eff
    mobiles = topo.mobiles()
    assert len(mobiles) == 8
    for m in mobiles:
        assert m.capacity_mips == 1500.0
        assert m.efficiency_w_per_mips == 0.004


def test_route_efficiencies_match_catalogue(topo):
    want = {"ccloud": 0.128, "metrofog": 0.0713, "campfog": 0.0475,
            "buildfog": 0.0238, "roomfog": 0.0015}
    for node_id, psi in want.items():
        assert topo.route_to(node_id).efficiency_w_per_mbps == psi
    # default wavelength cycle: red, yellow, green, blue, red, ...
    psis = [topo.route_to(m.node_id).efficiency_w_per_mbps
            for m in topo.mobiles()]
    assert psis[:4] == [0.00222, 0.00195, 0.00177, 0.00177]
    assert psis[4:] == psis[:4]


def test_room_route_is_988_percent_better_than_cloud(topo):
    room = topo.route_to("roomfog").efficiency_w_per_mbps
    cloud = topo.route_to("ccloud").efficiency_w_per_mbps
    assert 1 - room / cloud == pytest.approx(0.9883, abs=5e-4)


def test_route_capacities(topo):
    assert route_capacity(topo.route_to("roomfog")) == 10_000.0
    assert route_capacity(topo.route_to("buildfog")) == 10_000.0
    assert route_capacity(topo.route_to("campfog")) == 10_000.0
    assert route_capacity(topo.route_to("metrofog")) == 200_000.0
    assert route_capacity(topo.route_to("ccloud")) == 200_000.0
    for m in topo.mobiles():
        assert route_capacity(topo.route_to(m.node_id)) == 10_000.0


def test_mobile_route_capped_by_owc_rate():
    t = build_reference_topology(
        mobile_rates_mbps=[3100.0, 4500.0] + [10_000.0] * 6)
    assert route_capacity(t.route_to("mobile_0")) == 3100.0
    assert route_capacity(t.route_to("mobile_1")) == 4500.0
    # rates above the feeding ONU are clamped by it
    t2 = build_reference_topology(mobile_rates_mbps=[12_000.0] * 8)
    assert route_capacity(t2.route_to("mobile_0")) == 10_000.0


def test_missing_wavelength_tag_rejected():
    with pytest.raises(ConfigError):
        build_reference_topology(mobile_wavelengths=["red"] * 7 + ["uv"])
    with pytest.raises(ConfigError):
        build_reference_topology(mobile_wavelengths=["red"] * 7 + [None])


def test_derive_route_efficiency_onu_anchor(topo):
    # the one chain pinned down by the catalogue: a lone ONU feeding the room
    onu = topo.device("ONU")
    assert derive_route_efficiency([onu]) == pytest.approx(0.0015)
    assert topo.route_to("roomfog").efficiency_w_per_mbps == \
        pytest.approx(derive_route_efficiency([onu]))
    olt = topo.device("OLT")
    assert derive_route_efficiency([olt]) == pytest.approx(0.00125)
    with pytest.raises(ConfigError):
        derive_route_efficiency([])


def test_orderings_hold(topo):
    assert validate_topology(topo) == []


def test_validator_catches_broken_ordering(topo):
    nodes = []
    for n in topo.nodes:
        if n.node_id == "ccloud":
            # make the cloud server *less* efficient than the metro one
            nodes.append(ProcessingNode(n.node_id, n.kind, n.capacity_mips,
                                        0.005))
        else:
            nodes.append(n)
    broken = TopologyConfig(tuple(nodes), topo.routes, topo.devices)
    assert any("processing efficiency" in p for p in validate_topology(broken))


def test_document_round_trip(topo):
    doc = topology_to_document(topo)
    assert {d["name"] for d in doc["network_devices"]} >= {"OLT", "ONU"}
    again = topology_from_document(doc)
    assert again == topo
    assert validate_topology(again) == []
    doc["routes"][0].pop("capacity_mbps")
    with pytest.raises(ConfigError):
        topology_from_document(doc)


def test_topology_structural_validation(topo):
    with pytest.raises(ConfigError):
        TopologyConfig(topo.nodes, topo.routes[:-1])  # a node without a route
    with pytest.raises(ConfigError):
        extra = topo.routes + (Route("ghost", ("ONU",), 1.0, 1.0),)
        TopologyConfig(topo.nodes, extra)
    with pytest.raises(ConfigError):
        NetworkDevice("x", "y", -1.0, 10.0)
    with pytest.raises(ConfigError):
        ProcessingNode("roomfog", "RoomFog", 100.0, 0.001, wavelength="red")
