"""Indoor optical wireless channel simulation.

Ray-traces the impulse response between ceiling-mounted optical access points
and a photodetector on the user plane: the direct line-of-sight ray plus first-
and second-order diffuse reflections off discretized wall/ceiling/floor
elements. From the binned response it derives the channel metrics the rest of
the pipeline consumes: DC gain, RMS delay spread, 3-dB bandwidth, and the
OOK data rate the link can support.

Conventions:
    - SI units throughout (metres, seconds, watts, hertz).
    - Access points point straight down, receivers straight up.
    - Surfaces re-emit as ideal (order 1) Lambertian sources scaled by a
      per-surface, per-wavelength reflectivity.
    - An impulse response holds received *optical* power per time bin; the
      sum of the bins divided by the transmit power is the DC gain h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from owcfog.errors import ConfigError, InfeasibleError, ResourceLimitError

SPEED_OF_LIGHT_M_S = 299_792_458.0

#: Wavelength identifiers, in fixed canonical order.
WAVELENGTHS = ("red", "yellow", "green", "blue")

# OOK rate adjustment: links whose electrical SINR sits inside the coding
# window carry a 10% forward-error-correction overhead; below the window the
# link cannot run at all.
FEC_MIN_SINR_DB = 14.0
FEC_FREE_SINR_DB = 15.6
FEC_RATE_FACTOR = 0.9

# Rows per chunk for the second-order element-to-element pass; keeps the
# transient (chunk x n_elements) matrices around a few tens of MB.
_CHUNK_TARGET = 2_000_000


# =====================================================================
# Configuration types
# =====================================================================

@dataclass
class AccessPoint:
    """A ceiling light unit acting as an optical transmitter.

    Args:
        ap_id: stable identifier used in records and CSV output.
        position_m: (x, y, z) of the emitter.
        half_power_semiangle_deg: Lambertian half-power semiangle, in (0, 90).
        tx_power_w: transmit optical power per wavelength, watts.
    """

    ap_id: int
    position_m: Tuple[float, float, float]
    half_power_semiangle_deg: float = 60.0
    tx_power_w: Dict[str, float] = field(
        default_factory=lambda: {w: 1.8 for w in WAVELENGTHS}
    )

    @property
    def lambertian_order(self) -> float:
        return lambertian_order(self.half_power_semiangle_deg)


@dataclass
class ReceiverSpec:
    """Photodetector and front-end parameters shared by all users.

    ``rate_factor`` maps 3-dB channel bandwidth to OOK bit rate (1 bit per Hz
    of usable bandwidth by default).
    """

    area_m2: float = 1.0e-4
    fov_deg: float = 40.0
    bandwidth_hz: float = 5.0e9
    responsivity_a_per_w: float = 0.4
    rate_factor: float = 1.0


@dataclass
class RoomConfig:
    """Room geometry, surface properties, and simulation discretization.

    Reflectivity is a mapping ``wavelength -> {"walls": r, "ceiling": r,
    "floor": r}``; a flat ``{"walls": ..., ...}`` mapping is accepted and
    applied to every wavelength.
    """

    length_m: float = 8.0
    width_m: float = 4.0
    height_m: float = 3.0
    reflectivity: Dict = field(
        default_factory=lambda: {"walls": 0.8, "ceiling": 0.8, "floor": 0.3}
    )
    element_edge_m: float = 0.1
    max_elements: int = 200_000
    time_bin_s: float = 1.0e-11
    receiver_plane_m: float = 1.0
    grid_nx: int = 16
    grid_ny: int = 8
    aps: List[AccessPoint] = field(default_factory=list)

    def __post_init__(self):
        if min(self.length_m, self.width_m, self.height_m) <= 0:
            raise ConfigError("room dimensions must be positive")
        if self.element_edge_m <= 0:
            raise ConfigError("element edge must be positive")
        if self.time_bin_s <= 0:
            raise ConfigError("time bin must be positive")
        if not self.aps:
            self.aps = default_ap_grid(self.length_m, self.width_m, self.height_m)
        seen = set()
        for ap in self.aps:
            if ap.ap_id in seen:
                raise ConfigError(f"duplicate ap_id {ap.ap_id}")
            seen.add(ap.ap_id)

    def reflectivity_for(self, wavelength: str) -> Dict[str, float]:
        """Per-surface reflectivity map for one wavelength."""
        table = self.reflectivity
        if all(k in ("walls", "ceiling", "floor") for k in table):
            out = dict(table)
        else:
            if wavelength not in table:
                raise ConfigError(f"no reflectivity entry for wavelength {wavelength!r}")
            out = dict(table[wavelength])
        for key in ("walls", "ceiling", "floor"):
            if key not in out:
                raise ConfigError(f"reflectivity map missing {key!r}")
            if not 0.0 <= out[key] < 1.0:
                raise ConfigError(f"reflectivity[{key}] must be in [0, 1)")
        return out


def default_ap_grid(length_m: float = 8.0, width_m: float = 4.0,
                    height_m: float = 3.0, nx: int = 4, ny: int = 2,
                    tx_power_w: Optional[Dict[str, float]] = None) -> List[AccessPoint]:
    """Evenly spaced ceiling AP grid (nx along the length, ny along the width)."""
    aps = []
    ap_id = 0
    for j in range(ny):
        for i in range(nx):
            x = (i + 0.5) * length_m / nx
            y = (j + 0.5) * width_m / ny
            aps.append(AccessPoint(
                ap_id=ap_id,
                position_m=(x, y, height_m),
                tx_power_w=dict(tx_power_w) if tx_power_w else {w: 1.8 for w in WAVELENGTHS},
            ))
            ap_id += 1
    return aps


def grid_positions(room: RoomConfig) -> List[Tuple[float, float]]:
    """Cell-center user grid on the receiver plane (grid_nx x grid_ny points)."""
    out = []
    for j in range(room.grid_ny):
        for i in range(room.grid_nx):
            out.append(((i + 0.5) * room.length_m / room.grid_nx,
                        (j + 0.5) * room.width_m / room.grid_ny))
    return out


# =====================================================================
# Elementary link geometry
# =====================================================================

def lambertian_order(half_power_semiangle_deg: float) -> float:
    """Lambertian mode number m = -ln 2 / ln(cos(phi_half)).

    Args:
        half_power_semiangle_deg: half-power semiangle in degrees, in (0, 90).

    Returns:
        Mode number m (1.0 for a 60 degree semiangle).
    """
    if not 0.0 < half_power_semiangle_deg < 90.0:
        raise ConfigError(
            f"half-power semiangle must be in (0, 90) deg, got {half_power_semiangle_deg}"
        )
    return -math.log(2.0) / math.log(math.cos(math.radians(half_power_semiangle_deg)))


def los_gain(ap: AccessPoint, receiver: ReceiverSpec,
             position_m: Tuple[float, float, float]) -> float:
    """Line-of-sight channel DC gain from an AP to a receiver location.

    gain = (m+1) A / (2 pi d^2) * cos^m(phi) * cos(theta), zero whenever the
    incidence angle theta exceeds the receiver field of view or the geometry
    faces away.

    Raises:
        ConfigError: if the receiver sits exactly at the AP (degenerate d = 0).
    """
    ax, ay, az = ap.position_m
    rx, ry, rz = position_m
    dx, dy, dz = rx - ax, ry - ay, rz - az
    d2 = dx * dx + dy * dy + dz * dz
    if d2 <= 0.0:
        raise ConfigError("receiver coincides with AP; LOS distance is zero")
    d = math.sqrt(d2)
    # AP normal is (0,0,-1); receiver normal is (0,0,+1).
    cos_phi = -dz / d
    cos_theta = -dz / d
    if cos_phi <= 0.0 or cos_theta <= 0.0:
        return 0.0
    if cos_theta < math.cos(math.radians(receiver.fov_deg)):
        return 0.0
    m = ap.lambertian_order
    return (m + 1.0) * receiver.area_m2 / (2.0 * math.pi * d2) \
        * cos_phi ** m * cos_theta


# =====================================================================
# Surface discretization
# =====================================================================

def _face_grid(c0, c1, u_len, v_len, make_point, normal, rho):
    """Mesh one rectangular face into <= edge-sized cells.

    Returns (centers, normals, areas, rhos) arrays for the face.
    """
    nu = max(1, math.ceil(u_len / c0))
    nv = max(1, math.ceil(v_len / c1))
    du, dv = u_len / nu, v_len / nv
    us = (np.arange(nu) + 0.5) * du
    vs = (np.arange(nv) + 0.5) * dv
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    pts = make_point(uu.ravel(), vv.ravel())
    n = pts.shape[0]
    normals = np.tile(np.asarray(normal, dtype=float), (n, 1))
    areas = np.full(n, du * dv)
    rhos = np.full(n, rho)
    return pts, normals, areas, rhos


def surface_elements(room: RoomConfig, wavelength: str):
    """Discretize the six room faces into Lambertian reflector elements.

    Returns:
        (centers, normals, areas, rhos) numpy arrays of shape (N, 3)/(N,)/...

    Raises:
        ResourceLimitError: when the mesh would exceed ``room.max_elements``.
    """
    refl = room.reflectivity_for(wavelength)
    L, W, H = room.length_m, room.width_m, room.height_m
    e = room.element_edge_m
    faces = []

    def face(u_len, v_len, maker, normal, rho):
        faces.append(_face_grid(e, e, u_len, v_len, maker, normal, rho))

    # Floor (z=0, normal up) and ceiling (z=H, normal down).
    face(L, W, lambda u, v: np.column_stack([u, v, np.zeros_like(u)]),
         (0, 0, 1), refl["floor"])
    face(L, W, lambda u, v: np.column_stack([u, v, np.full_like(u, H)]),
         (0, 0, -1), refl["ceiling"])
    # Four walls.
    face(L, H, lambda u, v: np.column_stack([u, np.zeros_like(u), v]),
         (0, 1, 0), refl["walls"])
    face(L, H, lambda u, v: np.column_stack([u, np.full_like(u, W), v]),
         (0, -1, 0), refl["walls"])
    face(W, H, lambda u, v: np.column_stack([np.zeros_like(u), u, v]),
         (1, 0, 0), refl["walls"])
    face(W, H, lambda u, v: np.column_stack([np.full_like(u, L), u, v]),
         (-1, 0, 0), refl["walls"])

    centers = np.vstack([f[0] for f in faces])
    normals = np.vstack([f[1] for f in faces])
    areas = np.concatenate([f[2] for f in faces])
    rhos = np.concatenate([f[3] for f in faces])
    if centers.shape[0] > room.max_elements:
        raise ResourceLimitError(
            f"{centers.shape[0]} surface elements exceed cap {room.max_elements}; "
            f"raise max_elements or coarsen element_edge_m"
        )
    return centers, normals, areas, rhos


# =====================================================================
# Impulse response
# =====================================================================

@dataclass
class ImpulseResponse:
    """Binned received optical power over time.

    Attributes:
        bin_width_s: time quantization of the histogram.
        powers_w: received power per bin (W); bin i covers
            [i*bin, (i+1)*bin) seconds after emission.
        order_powers_w: total received power split by reflection order
            {0: LOS, 1: first bounce, 2: second bounce}.
    """

    bin_width_s: float
    powers_w: np.ndarray
    order_powers_w: Dict[int, float]

    @property
    def total_power_w(self) -> float:
        return float(self.powers_w.sum())

    def bin_times_s(self) -> np.ndarray:
        """Bin-center arrival times."""
        return (np.arange(self.powers_w.size) + 0.5) * self.bin_width_s


def _emit_cos(vec, d, normal):
    # cosine between a unit direction and a surface normal
    return np.einsum("ij,j->i", vec, np.asarray(normal, float)) / d


def trace_impulse_response(room: RoomConfig, ap: AccessPoint,
                           receiver: ReceiverSpec,
                           rx_position_m: Tuple[float, float, float],
                           wavelength: str,
                           max_order: int = 2) -> ImpulseResponse:
    """Trace the optical impulse response from one AP to one receiver spot.

    Direct ray plus up to ``max_order`` diffuse bounces over the discretized
    room surfaces. Each surface element collects power from the previous hop
    and re-emits it as an ideal Lambertian source scaled by its reflectivity.

    Args:
        room: geometry, reflectivities, element mesh, and time quantization.
        ap: transmitting access point.
        receiver: detector parameters (area and field of view matter here).
        rx_position_m: (x, y, z) of the detector, facing straight up.
        wavelength: one of WAVELENGTHS (chooses tx power and reflectivity).
        max_order: 0 (LOS only), 1, or 2.

    Returns:
        ImpulseResponse with absolute received power per time bin.
    """
    if max_order not in (0, 1, 2):
        raise ConfigError(f"max_order must be 0, 1 or 2, got {max_order}")
    if wavelength not in ap.tx_power_w:
        raise ConfigError(f"AP {ap.ap_id} has no tx power for {wavelength!r}")
    po = float(ap.tx_power_w[wavelength])
    if po < 0:
        raise ConfigError("transmit power must be non-negative")

    hist, nbins = _alloc_bins(room, max_order)
    order_powers = {k: 0.0 for k in range(max_order + 1)}

    # ---- direct ray -------------------------------------------------
    g = los_gain(ap, receiver, rx_position_m)
    if g > 0.0:
        d = math.dist(ap.position_m, rx_position_m)
        idx = int(d / SPEED_OF_LIGHT_M_S / room.time_bin_s)
        hist[idx] += po * g
        order_powers[0] = po * g

    if max_order >= 1 and po > 0.0:
        centers, normals, areas, rhos = surface_elements(room, wavelength)
        apv = np.asarray(ap.position_m, float)
        rxv = np.asarray(rx_position_m, float)
        m = ap.lambertian_order
        cos_fov = math.cos(math.radians(receiver.fov_deg))

        # AP -> element transfer: power collected by each element.
        v1 = centers - apv
        d1 = np.linalg.norm(v1, axis=1)
        d1 = np.where(d1 <= 0, np.inf, d1)
        cos_phi1 = _emit_cos(v1, d1, (0.0, 0.0, -1.0))
        cos_inc1 = -np.einsum("ij,ij->i", v1, normals) / d1
        ok1 = (cos_phi1 > 0) & (cos_inc1 > 0)
        p_elem = np.zeros_like(d1)
        p_elem[ok1] = (po * (m + 1.0) / (2.0 * math.pi * d1[ok1] ** 2)
                       * cos_phi1[ok1] ** m * cos_inc1[ok1] * areas[ok1])
        t_elem = d1 / SPEED_OF_LIGHT_M_S

        # element -> receiver transfer: per-unit-power gain of each element
        # acting as an order-1 Lambertian emitter, with the FOV cut applied.
        v2 = rxv - centers
        d2 = np.linalg.norm(v2, axis=1)
        d2 = np.where(d2 <= 0, np.inf, d2)
        cos_emit2 = np.einsum("ij,ij->i", v2, normals) / d2
        cos_inc2 = -v2[:, 2] / d2  # receiver normal is +z
        ok2 = (cos_emit2 > 0) & (cos_inc2 >= cos_fov)
        g_rx = np.zeros_like(d2)
        g_rx[ok2] = (cos_emit2[ok2] * cos_inc2[ok2] * receiver.area_m2
                     / (math.pi * d2[ok2] ** 2))
        t_rx = d2 / SPEED_OF_LIGHT_M_S

        # ---- first order --------------------------------------------
        contrib = rhos * p_elem * g_rx
        live = contrib > 0
        if np.any(live):
            idx = ((t_elem[live] + t_rx[live]) / room.time_bin_s).astype(np.int64)
            np.add.at(hist, idx, contrib[live])
            order_powers[1] = float(contrib[live].sum())

        # ---- second order -------------------------------------------
        if max_order >= 2:
            order_powers[2] = _second_order_pass(
                hist, room, centers, normals, areas, rhos,
                p_elem, t_elem, g_rx, t_rx)

    return ImpulseResponse(room.time_bin_s, _trim(hist), order_powers)


def _alloc_bins(room: RoomConfig, max_order: int):
    diag = math.sqrt(room.length_m ** 2 + room.width_m ** 2 + room.height_m ** 2)
    max_path = (max_order + 1) * diag
    nbins = int(max_path / SPEED_OF_LIGHT_M_S / room.time_bin_s) + 2
    return np.zeros(nbins), nbins


def _trim(hist: np.ndarray) -> np.ndarray:
    nz = np.nonzero(hist)[0]
    if nz.size == 0:
        return hist[:1].copy()
    return hist[: nz[-1] + 1].copy()


def _second_order_pass(hist, room, centers, normals, areas, rhos,
                       p_elem, t_elem, g_rx, t_rx) -> float:
    """Accumulate AP->i->j->receiver contributions into ``hist``.

    Chunked over source elements i so the pairwise matrices stay bounded.
    Returns the total second-order power added.
    """
    n = centers.shape[0]
    src_power = rhos * p_elem            # power re-emitted by each i
    sink_gain = rhos * g_rx              # j's reflect+deliver gain
    src_idx = np.nonzero(src_power > 0)[0]
    if src_idx.size == 0:
        return 0.0
    nbins = hist.size
    inv_bin = 1.0 / room.time_bin_s
    total = 0.0
    chunk = max(1, _CHUNK_TARGET // max(n, 1))
    for k0 in range(0, src_idx.size, chunk):
        rows = src_idx[k0:k0 + chunk]
        vij = centers[None, :, :] - centers[rows, None, :]     # (c, n, 3)
        dij = np.sqrt(np.einsum("cnj,cnj->cn", vij, vij))
        np.maximum(dij, 1e-12, out=dij)
        cos_emit = np.einsum("cnj,cj->cn", vij, normals[rows]) / dij
        cos_inc = -np.einsum("cnj,nj->cn", vij, normals) / dij
        # both ends must face each other; masking the product alone would
        # wrongly admit back-to-back pairs
        trans = np.where((cos_emit > 0) & (cos_inc > 0), cos_emit * cos_inc, 0.0)
        trans *= areas[None, :] / (math.pi * dij ** 2)
        contrib = src_power[rows, None] * trans * sink_gain[None, :]
        live = contrib > 0
        if not np.any(live):
            continue
        tt = (t_elem[rows, None] + dij / SPEED_OF_LIGHT_M_S + t_rx[None, :])
        idx = (tt[live] * inv_bin).astype(np.int64)
        w = contrib[live]
        hist += np.bincount(idx, weights=w, minlength=nbins)
        total += float(w.sum())
    return total


# =====================================================================
# Channel metrics
# =====================================================================

def delay_spread(ir: ImpulseResponse) -> float:
    """RMS delay spread of a binned impulse response, in seconds.

    Zero for an empty or single-impulse response.
    """
    p = ir.powers_w
    total = p.sum()
    if total <= 0.0 or np.count_nonzero(p) <= 1:
        return 0.0
    t = ir.bin_times_s()
    mean = float((p * t).sum() / total)
    var = float((p * (t - mean) ** 2).sum() / total)
    return math.sqrt(max(var, 0.0))


def bandwidth_3db(ir: ImpulseResponse, pad_factor: int = 8,
                  min_fft: int = 16384) -> float:
    """3-dB (half-power-magnitude) bandwidth of the channel, in Hz.

    DFT of the zero-padded bin histogram; the first frequency where
    |H(f)| / |H(0)| falls below 1/sqrt(2), linearly interpolated between DFT
    samples. A response that never crosses within the representable band
    (e.g. a single impulse: perfectly flat |H|) reports the Nyquist limit
    1 / (2 * bin width).

    Raises:
        InfeasibleError: for an all-zero response (no received power).
    """
    p = ir.powers_w
    if p.sum() <= 0.0:
        raise InfeasibleError("no received power; 3-dB bandwidth undefined",
                              report={"kind": "empty_impulse_response"})
    n = max(min_fft, 1 << (int(p.size * max(1, pad_factor)) - 1).bit_length())
    mag = np.abs(np.fft.rfft(p, n=n))
    mag /= mag[0]
    freqs = np.fft.rfftfreq(n, d=ir.bin_width_s)
    target = 1.0 / math.sqrt(2.0)
    below = np.nonzero(mag < target)[0]
    nyquist = 1.0 / (2.0 * ir.bin_width_s)
    if below.size == 0:
        return nyquist
    k = int(below[0])
    if k == 0:  # numerically impossible (mag[0] == 1) but stay safe
        return 0.0
    # linear interpolation of the crossing between samples k-1 and k
    m0, m1 = mag[k - 1], mag[k]
    f0, f1 = freqs[k - 1], freqs[k]
    if m1 == m0:
        return float(f1)
    f_cross = f0 + (m0 - target) / (m0 - m1) * (f1 - f0)
    return float(min(f_cross, nyquist))


def supported_data_rate(bw_3db_hz: float, receiver_bandwidth_hz: float,
                        sinr_db: float, rate_factor: float = 1.0) -> float:
    """OOK data rate a link sustains, in bit/s.

    rate = rate_factor * min(channel 3-dB bandwidth, receiver bandwidth),
    reduced by 10% when the SINR needs the stronger FEC (14 dB <= SINR <
    15.6 dB).

    Raises:
        InfeasibleError: when sinr_db is below the 14 dB operating floor.
    """
    if sinr_db < FEC_MIN_SINR_DB:
        raise InfeasibleError(
            f"SINR {sinr_db:.2f} dB below the {FEC_MIN_SINR_DB} dB floor",
            report={"kind": "sinr_floor", "sinr_db": sinr_db,
                    "floor_db": FEC_MIN_SINR_DB})
    rate = rate_factor * min(bw_3db_hz, receiver_bandwidth_hz)
    if sinr_db < FEC_FREE_SINR_DB:
        rate *= FEC_RATE_FACTOR
    return rate


# =====================================================================
# Per-link records
# =====================================================================

@dataclass
class ChannelRecord:
    """Channel metrics for one (user position, AP, wavelength) triple."""

    user: int
    user_x: float
    user_y: float
    ap_id: int
    wavelength: str
    h: float
    rx_power_w: float
    delay_spread_s: float
    bw_3db_hz: float
    rate_bps: float


def compute_channel_records(room: RoomConfig, receiver: ReceiverSpec,
                            positions: Sequence[Tuple[float, float]],
                            wavelengths: Iterable[str] = WAVELENGTHS,
                            max_order: int = 2) -> List[ChannelRecord]:
    """Trace every (user, AP, wavelength) link and tabulate its metrics.

    Positions are (x, y) on the receiver plane. When several wavelengths share
    a reflectivity map the trace is reused across them (the response scales
    linearly with transmit power), which is the common case.

    The tabulated ``rate_bps`` is the raw channel-supported rate
    rate_factor * min(bw_3db, receiver bandwidth); FEC de-rating happens later
    once an assignment fixes each user's SINR.
    """
    wavelengths = list(wavelengths)
    records: List[ChannelRecord] = []
    z = room.receiver_plane_m
    for u, (x, y) in enumerate(positions):
        if not (0 <= x <= room.length_m and 0 <= y <= room.width_m):
            raise ConfigError(f"user {u} at ({x}, {y}) lies outside the room")
        for ap in room.aps:
            traced: Dict[Tuple, ImpulseResponse] = {}
            for wl in wavelengths:
                key = tuple(sorted(room.reflectivity_for(wl).items()))
                if key not in traced:
                    unit_ap = AccessPoint(
                        ap_id=ap.ap_id, position_m=ap.position_m,
                        half_power_semiangle_deg=ap.half_power_semiangle_deg,
                        tx_power_w={wl: 1.0},
                    )
                    traced[key] = trace_impulse_response(
                        room, unit_ap, receiver, (x, y, z), wl, max_order)
                unit_ir = traced[key]
                po = float(ap.tx_power_w.get(wl, 0.0))
                h = unit_ir.total_power_w  # unit transmit power -> gain
                ds = delay_spread(unit_ir)
                try:
                    bw = bandwidth_3db(unit_ir)
                except InfeasibleError:
                    bw = 0.0
                rate = receiver.rate_factor * min(bw, receiver.bandwidth_hz)
                records.append(ChannelRecord(
                    user=u, user_x=x, user_y=y, ap_id=ap.ap_id, wavelength=wl,
                    h=h, rx_power_w=po * h, delay_spread_s=ds,
                    bw_3db_hz=bw, rate_bps=rate))
    return records
