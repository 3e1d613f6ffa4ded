"""Cloud/fog processing hierarchy: nodes, network devices, and routes.

The reference build mirrors the measured hardware catalogue: five fixed
processing locations (room, building, campus, metro, central cloud) plus
eight wavelength-tagged mobile units pooled as a mobile fog layer.  Every
processing location is reached from the OLT by exactly one route with a
fixed power-per-throughput efficiency; routes to mobile units additionally
depend on the optical wireless wavelength serving that unit.

All types here are frozen: a topology is built once and then shared freely
(the placement sweep reads it from many cells).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .channel import WAVELENGTHS
from .errors import ConfigError

MOBILE_KIND = "MobileUnit"
FOG_KINDS = ("RoomFog", "BuildFog", "CampFog", "MetroFog", "CCloud")
NODE_KINDS = (MOBILE_KIND,) + FOG_KINDS

# ---------------------------------------------------------------------------
# hardware catalogue (vendor datasheet figures)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NetworkDevice:
    """A network element with its rated power draw and line capacity."""

    name: str
    model: str
    power_w: float
    capacity_gbps: float

    def __post_init__(self) -> None:
        if self.power_w < 0:
            raise ConfigError(f"device {self.name}: negative power")
        if not self.capacity_gbps > 0:
            raise ConfigError(f"device {self.name}: capacity must be > 0")

    @property
    def efficiency_w_per_mbps(self) -> float:
        return self.power_w / (self.capacity_gbps * 1e3)


REFERENCE_DEVICES: Tuple[NetworkDevice, ...] = (
    NetworkDevice("OLT", "Tellabs 1134", 400.0, 320.0),
    NetworkDevice("ONU", "FTE7502 10G", 15.0, 10.0),
    NetworkDevice("Central cloud switch", "Cisco 6509", 3800.0, 320.0),
    NetworkDevice("Central cloud router", "Juniper MX-960", 5100.0, 660.0),
    NetworkDevice("Core router", "Cisco CRS-1 16-slots", 13200.0, 1200.0),
    NetworkDevice("Transponder", "ONS 15454", 50.0, 10.0),
    NetworkDevice("Optical switch", "Cisco SG220", 63.2, 100.0),
    NetworkDevice("Edge router", "Cisco 12816", 4200.0, 200.0),
    NetworkDevice("Aggregation switch", "Cisco 6880", 3800.0, 160.0),
    NetworkDevice("Ethernet switch", "Cisco 6880", 3800.0, 160.0),
)

# server capacity (MIPS) and processing efficiency (W/MIPS) per location
_NODE_SPECS: Dict[str, Tuple[float, float]] = {
    "CCloud": (144_000.0, 0.000796),
    "MetroFog": (73_440.0, 0.00129),
    "CampFog": (35_160.0, 0.0027),
    "BuildFog": (34_200.0, 0.0028),
    "RoomFog": (6_200.0, 0.003),
    MOBILE_KIND: (1_500.0, 0.004),
}

# route power-per-throughput (W/Mbps) from the OLT to each fixed location
ROUTE_EFFICIENCY_W_PER_MBPS: Dict[str, float] = {
    "CCloud": 0.128,
    "MetroFog": 0.0713,
    "CampFog": 0.0475,
    "BuildFog": 0.0238,
    "RoomFog": 0.0015,
}

# ... and per downlink wavelength for routes ending at a mobile unit
MOBILE_ROUTE_EFFICIENCY_W_PER_MBPS: Dict[str, float] = {
    "red": 0.00222,
    "yellow": 0.00195,
    "green": 0.00177,
    "blue": 0.00177,
}

# the building/campus Ethernet LAN cannot carry more than this
ETHERNET_LAN_CAP_MBPS = 10_000.0
DEFAULT_MOBILE_COUNT = 8

# descriptive device chains (from the OLT); used by the re-derivation
# diagnostic, never as the source of the route efficiencies above
_ROUTE_CHAINS: Dict[str, Tuple[str, ...]] = {
    "RoomFog": ("ONU",),
    "BuildFog": ("Ethernet switch",),
    "CampFog": ("Ethernet switch", "Aggregation switch"),
    "MetroFog": ("Edge router",),
    "CCloud": ("Edge router", "Core router", "Central cloud switch",
               "Central cloud router"),
    MOBILE_KIND: ("ONU",),
}


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProcessingNode:
    """A compute location: capacity in MIPS, efficiency in W/MIPS."""

    node_id: str
    kind: str
    capacity_mips: float
    efficiency_w_per_mips: float
    wavelength: Optional[str] = None  # mobile units only

    def __post_init__(self) -> None:
        if self.kind not in NODE_KINDS:
            raise ConfigError(f"unknown node kind {self.kind!r}")
        if not self.capacity_mips > 0:
            raise ConfigError(f"node {self.node_id}: capacity must be > 0")
        if not self.efficiency_w_per_mips > 0:
            raise ConfigError(f"node {self.node_id}: efficiency must be > 0")
        if self.kind == MOBILE_KIND:
            if self.wavelength not in WAVELENGTHS:
                raise ConfigError(
                    f"mobile node {self.node_id} needs a wavelength tag, "
                    f"got {self.wavelength!r}")
        elif self.wavelength is not None:
            raise ConfigError(
                f"node {self.node_id}: only mobile units carry a wavelength")

    @property
    def is_mobile(self) -> bool:
        return self.kind == MOBILE_KIND


@dataclass(frozen=True)
class Route:
    """The single path from the OLT to one processing node."""

    destination: str
    devices: Tuple[str, ...]
    capacity_mbps: float
    efficiency_w_per_mbps: float

    def __post_init__(self) -> None:
        if not self.capacity_mbps > 0:
            raise ConfigError(
                f"route to {self.destination}: capacity must be > 0")
        if not self.efficiency_w_per_mbps > 0:
            raise ConfigError(
                f"route to {self.destination}: efficiency must be > 0")


@dataclass(frozen=True)
class TopologyConfig:
    """Immutable node + route collection for the placement model."""

    nodes: Tuple[ProcessingNode, ...]
    routes: Tuple[Route, ...]
    devices: Tuple[NetworkDevice, ...] = REFERENCE_DEVICES

    def __post_init__(self) -> None:
        ids = [n.node_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate node ids in topology")
        by_dest: Dict[str, int] = {}
        for r in self.routes:
            by_dest[r.destination] = by_dest.get(r.destination, 0) + 1
        for n in self.nodes:
            if by_dest.get(n.node_id, 0) != 1:
                raise ConfigError(
                    f"node {n.node_id} must have exactly one route, "
                    f"found {by_dest.get(n.node_id, 0)}")
        extra = set(by_dest) - set(ids)
        if extra:
            raise ConfigError(f"routes to unknown nodes: {sorted(extra)}")
        non_mobile_kinds = [n.kind for n in self.nodes if not n.is_mobile]
        if len(set(non_mobile_kinds)) != len(non_mobile_kinds):
            raise ConfigError("at most one node per fixed fog kind")

    def node(self, node_id: str) -> ProcessingNode:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise ConfigError(f"no node {node_id!r} in topology")

    def route_to(self, node_id: str) -> Route:
        for r in self.routes:
            if r.destination == node_id:
                return r
        raise ConfigError(f"no route to {node_id!r}")

    def mobiles(self) -> List[ProcessingNode]:
        return [n for n in self.nodes if n.is_mobile]

    def device(self, name: str) -> NetworkDevice:
        for d in self.devices:
            if d.name == name:
                return d
        raise ConfigError(f"no device named {name!r}")


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _chain_capacity_mbps(devices: Sequence[NetworkDevice]) -> float:
    return min(d.capacity_gbps for d in devices) * 1e3


def build_reference_topology(
        mobile_wavelengths: Optional[Sequence[str]] = None,
        mobile_rates_mbps: Optional[Sequence[float]] = None,
) -> TopologyConfig:
    """Build the standard five-location + eight-mobile topology.

    ``mobile_wavelengths[i]`` tags mobile unit ``i``; ``mobile_rates_mbps[i]``
    is its optical wireless downlink rate, which caps the route to that unit.
    Defaults describe the ideal scenario: the four colours cycled over eight
    units, every downlink at the full 10 Gbit/s the ONU can feed.  Passing
    an explicit wavelength list builds the same fixed backbone around any
    number of mobile units (solved scenarios bring however many users the
    point process produced).
    """
    if mobile_wavelengths is None:
        mobile_wavelengths = [WAVELENGTHS[i % len(WAVELENGTHS)]
                              for i in range(DEFAULT_MOBILE_COUNT)]
    if mobile_rates_mbps is None:
        mobile_rates_mbps = [10_000.0] * len(mobile_wavelengths)
    if len(mobile_rates_mbps) != len(mobile_wavelengths):
        raise ConfigError("one downlink rate per mobile unit required")

    catalogue = {d.name: d for d in REFERENCE_DEVICES}
    nodes: List[ProcessingNode] = []
    routes: List[Route] = []

    for kind in ("RoomFog", "BuildFog", "CampFog", "MetroFog", "CCloud"):
        cap, eff = _NODE_SPECS[kind]
        node_id = kind.lower()
        nodes.append(ProcessingNode(node_id, kind, cap, eff))
        chain = _ROUTE_CHAINS[kind]
        link = _chain_capacity_mbps([catalogue[c] for c in chain])
        if kind in ("BuildFog", "CampFog"):
            # the local Ethernet LAN is the stated bottleneck on these paths
            link = min(link, ETHERNET_LAN_CAP_MBPS)
        routes.append(Route(node_id, chain, link,
                            ROUTE_EFFICIENCY_W_PER_MBPS[kind]))

    cap, eff = _NODE_SPECS[MOBILE_KIND]
    onu_mbps = catalogue["ONU"].capacity_gbps * 1e3
    for i, (wl, rate) in enumerate(zip(mobile_wavelengths, mobile_rates_mbps)):
        if wl not in WAVELENGTHS:
            raise ConfigError(
                f"mobile unit {i}: missing or unknown wavelength tag {wl!r}")
        if not rate > 0:
            raise ConfigError(f"mobile unit {i}: downlink rate must be > 0")
        node_id = f"mobile_{i}"
        nodes.append(ProcessingNode(node_id, MOBILE_KIND, cap, eff,
                                    wavelength=wl))
        routes.append(Route(
            node_id, _ROUTE_CHAINS[MOBILE_KIND],
            min(float(rate), onu_mbps),
            MOBILE_ROUTE_EFFICIENCY_W_PER_MBPS[wl]))

    return TopologyConfig(tuple(nodes), tuple(routes))


def route_capacity(route: Route) -> float:
    """Traffic bound of a route in Mbit/s (min link on the path)."""
    return route.capacity_mbps


def derive_route_efficiency(chain: Sequence[NetworkDevice]) -> float:
    """Re-derive a route's W/Mbit/s as the sum of device power/capacity.

    Diagnostic only: the published per-route efficiencies are authoritative
    because the exact device chain behind each is not disclosed; this lets a
    test confirm the one chain that *is* pinned down (a lone ONU feeding the
    room server) and document what the others would imply.
    """
    if not chain:
        raise ConfigError("empty device chain")
    return sum(d.efficiency_w_per_mbps for d in chain)


# ---------------------------------------------------------------------------
# document round-trip + consistency checks
# ---------------------------------------------------------------------------


def topology_to_document(topology: TopologyConfig) -> Dict:
    """Plain-dict form mirroring the hardware tables field for field."""
    doc: Dict = {
        "processing_nodes": [
            {
                "id": n.node_id,
                "kind": n.kind,
                "capacity_mips": n.capacity_mips,
                "efficiency_w_per_mips": n.efficiency_w_per_mips,
                **({"wavelength": n.wavelength} if n.is_mobile else {}),
            }
            for n in topology.nodes
        ],
        "network_devices": [
            {
                "name": d.name,
                "model": d.model,
                "power_w": d.power_w,
                "capacity_gbps": d.capacity_gbps,
            }
            for d in topology.devices
        ],
        "routes": [
            {
                "destination": r.destination,
                "devices": list(r.devices),
                "capacity_mbps": r.capacity_mbps,
                "efficiency_w_per_mbps": r.efficiency_w_per_mbps,
            }
            for r in topology.routes
        ],
    }
    return doc


def topology_from_document(doc: Mapping) -> TopologyConfig:
    """Inverse of :func:`topology_to_document` (strict about keys)."""
    try:
        nodes = tuple(
            ProcessingNode(
                node_id=item["id"], kind=item["kind"],
                capacity_mips=float(item["capacity_mips"]),
                efficiency_w_per_mips=float(item["efficiency_w_per_mips"]),
                wavelength=item.get("wavelength"))
            for item in doc["processing_nodes"])
        devices = tuple(
            NetworkDevice(item["name"], item["model"],
                          float(item["power_w"]), float(item["capacity_gbps"]))
            for item in doc["network_devices"])
        routes = tuple(
            Route(item["destination"], tuple(item["devices"]),
                  float(item["capacity_mbps"]),
                  float(item["efficiency_w_per_mbps"]))
            for item in doc["routes"])
    except KeyError as exc:
        raise ConfigError(f"topology document missing field {exc}") from None
    return TopologyConfig(nodes, routes, devices)


def validate_topology(topology: TopologyConfig) -> List[str]:
    """Re-derive the consistency claims; returns a list of violations.

    An empty list means the topology is internally consistent: processing
    efficiency strictly improves towards the core (CCloud best, mobiles
    worst) while route efficiency strictly improves towards the room, with
    the green and blue mobile routes tied.
    """
    problems: List[str] = []
    by_kind: Dict[str, List[ProcessingNode]] = {}
    for n in topology.nodes:
        by_kind.setdefault(n.kind, []).append(n)

    def eff(kind: str) -> Optional[float]:
        entries = by_kind.get(kind)
        return entries[0].efficiency_w_per_mips if entries else None

    order = ("CCloud", "MetroFog", "CampFog", "BuildFog", "RoomFog",
             MOBILE_KIND)
    effs = list(zip(order, [eff(k) for k in order]))
    if all(e is not None for _, e in effs):
        for (ka, ea), (kb, eb) in zip(effs, effs[1:]):
            if not ea < eb:
                problems.append(
                    f"processing efficiency ordering violated: "
                    f"E[{ka}]={ea} !< E[{kb}]={eb}")

    def psi(kind: str) -> Optional[float]:
        entries = by_kind.get(kind)
        if not entries:
            return None
        return topology.route_to(entries[0].node_id).efficiency_w_per_mbps

    mobile_psis = [topology.route_to(m.node_id).efficiency_w_per_mbps
                   for m in topology.mobiles()]
    if mobile_psis and all(psi(k) is not None for k in FOG_KINDS):
        room, build, camp, metro, cloud = (psi(k) for k in FOG_KINDS)
        if not room < min(mobile_psis):
            problems.append("route efficiency: room route must beat every "
                            "mobile route")
        if not max(mobile_psis) < build:
            problems.append("route efficiency: every mobile route must beat "
                            "the building route")
        for name, lo, hi in (("building<campus", build, camp),
                             ("campus<metro", camp, metro),
                             ("metro<cloud", metro, cloud)):
            if not lo < hi:
                problems.append(f"route efficiency ordering violated: {name}")

    greens = [topology.route_to(m.node_id).efficiency_w_per_mbps
              for m in topology.mobiles() if m.wavelength == "green"]
    blues = [topology.route_to(m.node_id).efficiency_w_per_mbps
             for m in topology.mobiles() if m.wavelength == "blue"]
    if greens and blues and set(greens) != set(blues):
        problems.append("green and blue mobile routes must share one "
                        "efficiency")

    for r in topology.routes:
        if not (r.capacity_mbps > 0 and r.capacity_mbps < float("inf")):
            problems.append(f"route to {r.destination}: capacity not finite "
                            f"and positive")
    return problems
