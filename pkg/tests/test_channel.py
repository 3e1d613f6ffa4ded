"""Channel simulation tests.

The ray tracer is checked against a deliberately naive, loop-based path
enumerator written directly from the Lambertian link geometry; the two share
no code beyond the public API.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from owcfog.channel import (
    AccessPoint,
    ChannelRecord,
    ImpulseResponse,
    ReceiverSpec,
    RoomConfig,
    SPEED_OF_LIGHT_M_S,
    bandwidth_3db,
    compute_channel_records,
    delay_spread,
    grid_positions,
    lambertian_order,
    los_gain,
    supported_data_rate,
    trace_impulse_response,
)
from owcfog.errors import ConfigError, InfeasibleError, ResourceLimitError

C = SPEED_OF_LIGHT_M_S

# Frozen expectations (independent arithmetic, computed by hand/REPL first):
#   -ln 2 / ln cos 30deg
M_30DEG = 4.81884167930642
#   (m+1) A / (2 pi d^2) with m=1, A=1e-4, d=2
LOS_BELOW_2M = 7.957747154594767e-06
#   rms spread of powers [1,2,1] spaced 1 ns apart
DS_THREE_BIN = 7.071067811865477e-10


# =====================================================================
# elementary gains
# =====================================================================

def test_lambertian_order_half_power_definition():
    # cos(phi_half)^m must equal exactly 1/2
    for ang in (15.0, 30.0, 45.0, 60.0, 80.0):
        m = lambertian_order(ang)
        assert math.cos(math.radians(ang)) ** m == pytest.approx(0.5, rel=1e-12)
    assert lambertian_order(60.0) == pytest.approx(1.0, rel=1e-12)
    assert lambertian_order(30.0) == pytest.approx(M_30DEG, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, 90.0, -5.0, 120.0])
def test_lambertian_order_rejects_out_of_range(bad):
    with pytest.raises(ConfigError):
        lambertian_order(bad)


def test_los_gain_directly_below():
    ap = AccessPoint(0, (0.0, 0.0, 2.0), 60.0, {"red": 1.0})
    rec = ReceiverSpec(area_m2=1e-4, fov_deg=40.0)
    assert los_gain(ap, rec, (0.0, 0.0, 0.0)) == pytest.approx(
        LOS_BELOW_2M, rel=1e-12)


def test_los_gain_fov_rejection():
    ap = AccessPoint(0, (0.0, 0.0, 2.0), 60.0, {"red": 1.0})
    rec = ReceiverSpec(fov_deg=40.0)
    # incidence angle 45 deg > 40 deg FOV -> hard zero
    assert los_gain(ap, rec, (2.0, 0.0, 0.0)) == 0.0
    # same geometry admitted by a wider FOV
    assert los_gain(ap, ReceiverSpec(fov_deg=50.0), (2.0, 0.0, 0.0)) > 0.0


def test_los_gain_degenerate_distance():
    ap = AccessPoint(0, (1.0, 1.0, 2.0), 60.0, {"red": 1.0})
    with pytest.raises(ConfigError):
        los_gain(ap, ReceiverSpec(), (1.0, 1.0, 2.0))


@given(st.floats(min_value=1.0, max_value=85.0),
       st.floats(min_value=1.5, max_value=89.0))
def test_lambertian_order_decreases_with_beamwidth(a, b):
    lo, hi = sorted((a, b))
    if hi - lo < 1e-6:
        return
    assert lambertian_order(lo) >= lambertian_order(hi)


# =====================================================================
# tracer vs naive path enumeration
# =====================================================================

def _cube_case():
    room = RoomConfig(
        length_m=2.0, width_m=2.0, height_m=2.0,
        element_edge_m=0.5, time_bin_s=1e-11, receiver_plane_m=0.5,
        aps=[AccessPoint(0, (1.0, 1.0, 2.0), 60.0, {"red": 1.0})])
    rec = ReceiverSpec(area_m2=1e-4, fov_deg=85.0)
    return room, rec, (0.7, 1.2, 0.5)


def _naive_cube_mesh(edge, dim, refl):
    """Hand-rolled mesh of a dim x dim x dim cube: centers/normals/areas/rho."""
    n = round(dim / edge)
    cells = [(i + 0.5) * edge for i in range(n)]
    elems = []
    for u in cells:
        for v in cells:
            elems.append(((u, v, 0.0), (0, 0, 1), refl["floor"]))
            elems.append(((u, v, dim), (0, 0, -1), refl["ceiling"]))
            elems.append(((u, 0.0, v), (0, 1, 0), refl["walls"]))
            elems.append(((u, dim, v), (0, -1, 0), refl["walls"]))
            elems.append(((0.0, u, v), (1, 0, 0), refl["walls"]))
            elems.append(((dim, u, v), (-1, 0, 0), refl["walls"]))
    return elems, edge * edge


def _naive_trace(room, ap, rec, rxp, max_order):
    """Plain-loop enumeration of LOS + 1st + 2nd order arrival list."""
    m = -math.log(2.0) / math.log(math.cos(math.radians(ap.half_power_semiangle_deg)))
    po = ap.tx_power_w["red"]
    cfov = math.cos(math.radians(rec.fov_deg))
    elems, cell_area = _naive_cube_mesh(room.element_edge_m, room.length_m,
                                        room.reflectivity_for("red"))

    def sub(p, q):
        return (p[0] - q[0], p[1] - q[1], p[2] - q[2])

    def dot(p, q):
        return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]

    arrivals = []
    v = sub(rxp, ap.position_m)
    d = math.sqrt(dot(v, v))
    if -v[2] / d > 0 and -v[2] / d >= cfov:
        g = (m + 1) * rec.area_m2 / (2 * math.pi * d * d) * (-v[2] / d) ** (m + 1)
        arrivals.append((d / C, po * g, 0))

    # stage tables: power landing on each element, and each element's
    # lambertian gain toward the receiver
    landing, t_in, toward, t_out = [], [], [], []
    for center, normal, rho in elems:
        v1 = sub(center, ap.position_m)
        d1 = math.sqrt(dot(v1, v1))
        ce = -v1[2] / d1
        ci = -dot(v1, normal) / d1
        landing.append(po * (m + 1) / (2 * math.pi * d1 * d1) * ce ** m * ci * cell_area
                       if ce > 0 and ci > 0 else 0.0)
        t_in.append(d1 / C)
        v2 = sub(rxp, center)
        d2 = math.sqrt(dot(v2, v2))
        ce2 = dot(v2, normal) / d2
        ci2 = (center[2] - rxp[2]) / d2
        toward.append(ce2 * ci2 * rec.area_m2 / (math.pi * d2 * d2)
                      if ce2 > 0 and ci2 >= cfov else 0.0)
        t_out.append(d2 / C)

    if max_order >= 1:
        for i, (center, normal, rho) in enumerate(elems):
            p = rho * landing[i] * toward[i]
            if p > 0:
                arrivals.append((t_in[i] + t_out[i], p, 1))
    if max_order >= 2:
        for i, (ci_c, ci_n, ci_r) in enumerate(elems):
            if landing[i] <= 0:
                continue
            emitted = ci_r * landing[i]
            for j, (cj_c, cj_n, cj_r) in enumerate(elems):
                if toward[j] <= 0:
                    continue
                vij = sub(cj_c, ci_c)
                dij = math.sqrt(dot(vij, vij))
                if dij <= 1e-12:
                    continue
                ce = dot(vij, ci_n) / dij
                ci = -dot(vij, cj_n) / dij
                if ce <= 0 or ci <= 0:
                    continue
                p = emitted * ce * ci * cell_area / (math.pi * dij * dij) \
                    * cj_r * toward[j]
                arrivals.append((t_in[i] + dij / C + t_out[j], p, 2))
    return arrivals


def test_trace_matches_naive_enumeration():
    room, rec, rxp = _cube_case()
    ir = trace_impulse_response(room, room.aps[0], rec, rxp, "red", max_order=2)
    arrivals = _naive_trace(room, room.aps[0], rec, rxp, 2)

    for order in (0, 1, 2):
        want = sum(p for _, p, o in arrivals if o == order)
        assert ir.order_powers_w[order] == pytest.approx(want, rel=1e-12)

    hist = np.zeros(ir.powers_w.size + 8)
    for t, p, _ in arrivals:
        hist[int(t / room.time_bin_s)] += p
    assert hist[ir.powers_w.size:].sum() == 0.0
    np.testing.assert_allclose(ir.powers_w, hist[:ir.powers_w.size],
                               rtol=1e-12, atol=ir.total_power_w * 1e-15)


def test_trace_energy_grows_with_order():
    room, rec, rxp = _cube_case()
    totals = [trace_impulse_response(room, room.aps[0], rec, rxp, "red", k).total_power_w
              for k in (0, 1, 2)]
    assert totals[0] < totals[1] < totals[2]


def test_trace_gain_is_power_normalized():
    room, rec, rxp = _cube_case()
    unit = trace_impulse_response(room, room.aps[0], rec, rxp, "red", 2)
    ap = AccessPoint(0, (1.0, 1.0, 2.0), 60.0, {"red": 2.5})
    scaled = trace_impulse_response(room, ap, rec, rxp, "red", 2)
    # h = sum(bins)/PO is invariant under transmit power
    assert scaled.total_power_w / 2.5 == pytest.approx(unit.total_power_w, rel=1e-12)
    np.testing.assert_allclose(scaled.powers_w, 2.5 * unit.powers_w, rtol=1e-12)


def test_trace_element_cap():
    room, rec, rxp = _cube_case()
    room.max_elements = 10
    with pytest.raises(ResourceLimitError):
        trace_impulse_response(room, room.aps[0], rec, rxp, "red", 1)


@pytest.mark.slow
def test_second_order_power_converges_when_halving_elements():
    # halving the mesh edge onto the default (0.2 m -> 0.1 m) moves the total
    # second-order power by well under 5% in the reference room
    rec = ReceiverSpec()
    vals = []
    for edge in (0.2, 0.1):
        room = RoomConfig(element_edge_m=edge)
        ir = trace_impulse_response(room, room.aps[0], rec, (1.0, 1.0, 1.0),
                                    "red", 2)
        vals.append(ir.order_powers_w[2])
    assert abs(vals[1] - vals[0]) / vals[0] < 0.05


# =====================================================================
# metrics
# =====================================================================

def _ir(powers, bin_s=1e-11):
    p = np.asarray(powers, dtype=float)
    return ImpulseResponse(bin_s, p, {0: float(p.sum())})


def test_delay_spread_degenerate_cases():
    assert delay_spread(_ir([0.0])) == 0.0
    assert delay_spread(_ir([0, 0, 5e-6, 0])) == 0.0


def test_delay_spread_two_equal_bins():
    # equal powers separated by n bins -> spread is half the separation
    p = np.zeros(41)
    p[0] = p[40] = 1e-6
    assert delay_spread(_ir(p)) == pytest.approx(20e-11, rel=1e-12)


def test_delay_spread_three_bin_frozen():
    p = np.zeros(201)
    p[0], p[100], p[200] = 1.0, 2.0, 1.0  # 1 ns apart at 0.01 ns bins
    assert delay_spread(_ir(p)) == pytest.approx(DS_THREE_BIN, rel=1e-12)


def test_bandwidth_single_impulse_hits_nyquist():
    assert bandwidth_3db(_ir([0, 0, 3e-6])) == pytest.approx(50e9)


def test_bandwidth_two_equal_bins_quarter_rule():
    # |H(f)| = |cos(pi f dt)| crosses 1/sqrt(2) at exactly 1/(4 dt)
    for nsep in (20, 37, 64):
        p = np.zeros(nsep + 1)
        p[0] = p[nsep] = 1.0
        want = 1.0 / (4.0 * nsep * 1e-11)
        assert bandwidth_3db(_ir(p)) == pytest.approx(want, rel=1e-3)


def test_bandwidth_echo_never_raises_bandwidth():
    los = np.zeros(3)
    los[2] = 1e-5
    base = bandwidth_3db(_ir(los))
    echoed = np.zeros(500)
    echoed[2] = 1e-5
    echoed[450] = 2e-6
    assert bandwidth_3db(_ir(echoed)) <= base


def test_bandwidth_requires_power():
    with pytest.raises(InfeasibleError):
        bandwidth_3db(_ir([0.0, 0.0]))


@given(st.floats(min_value=1e-9, max_value=1e3))
@settings(max_examples=25)
def test_delay_spread_scale_invariant(scale):
    p = np.zeros(90)
    p[3], p[40], p[87] = 2.0, 1.0, 0.5
    assert delay_spread(_ir(p * scale)) == pytest.approx(delay_spread(_ir(p)),
                                                         rel=1e-9)


# =====================================================================
# supported rate
# =====================================================================

def test_supported_rate_plain():
    assert supported_data_rate(5e9, 5e9, 20.0) == pytest.approx(5e9)
    # channel narrower than the receiver
    assert supported_data_rate(3.2e9, 5e9, 20.0) == pytest.approx(3.2e9)
    # receiver narrower than the channel
    assert supported_data_rate(50e9, 5e9, 20.0) == pytest.approx(5e9)
    assert supported_data_rate(5e9, 5e9, 20.0, rate_factor=0.5) == pytest.approx(2.5e9)


def test_supported_rate_fec_window():
    assert supported_data_rate(5e9, 5e9, 14.5) == pytest.approx(4.5e9)
    assert supported_data_rate(5e9, 5e9, 14.0) == pytest.approx(4.5e9)
    # the penalty ends exactly at 15.6 dB
    assert supported_data_rate(5e9, 5e9, 15.6) == pytest.approx(5e9)
    assert supported_data_rate(5e9, 5e9, 15.5999) == pytest.approx(4.5e9)


def test_supported_rate_floor():
    with pytest.raises(InfeasibleError):
        supported_data_rate(5e9, 5e9, 13.999)


# =====================================================================
# records and grid behaviour
# =====================================================================

def _coarse_room():
    return RoomConfig(element_edge_m=0.5)


def test_grid_positions_cover_room():
    room = _coarse_room()
    pts = grid_positions(room)
    assert len(pts) == 128
    xs = sorted({p[0] for p in pts})
    ys = sorted({p[1] for p in pts})
    assert xs[0] == pytest.approx(0.25) and xs[-1] == pytest.approx(7.75)
    assert ys[0] == pytest.approx(0.25) and ys[-1] == pytest.approx(3.75)


def test_records_rate_and_power_consistency():
    room = _coarse_room()
    rec = ReceiverSpec()
    records = compute_channel_records(room, rec, [(1.0, 1.0)], ["red", "blue"])
    assert len(records) == 2 * len(room.aps)
    for r in records:
        assert r.rx_power_w == pytest.approx(1.8 * r.h, rel=1e-12)
        assert r.rate_bps == pytest.approx(
            rec.rate_factor * min(r.bw_3db_hz, rec.bandwidth_hz), rel=1e-12)
    # same reflectivity for red/blue -> identical geometry metrics
    red = [r for r in records if r.wavelength == "red"]
    blue = [r for r in records if r.wavelength == "blue"]
    for a, b in zip(red, blue):
        assert a.h == b.h and a.bw_3db_hz == b.bw_3db_hz


def test_records_reject_outside_room():
    room = _coarse_room()
    with pytest.raises(ConfigError):
        compute_channel_records(room, ReceiverSpec(), [(9.0, 1.0)], ["red"])


def test_fov_narrowing_never_hurts_bandwidth_sampled():
    room = _coarse_room()
    pts = grid_positions(room)[::17]  # a spread of locations
    for (x, y) in pts:
        best = max(room.aps,
                   key=lambda ap: los_gain(ap, ReceiverSpec(fov_deg=60.0),
                                           (x, y, 1.0)))
        narrow = trace_impulse_response(room, best, ReceiverSpec(fov_deg=40.0),
                                        (x, y, 1.0), "red", 2)
        wide = trace_impulse_response(room, best, ReceiverSpec(fov_deg=60.0),
                                      (x, y, 1.0), "red", 2)
        assert delay_spread(narrow) <= delay_spread(wide) + 1e-15
        assert bandwidth_3db(narrow) >= bandwidth_3db(wide) - 1e-3
