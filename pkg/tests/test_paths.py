import numpy as np
import pytest

from isacsim.doppler import MicroMotion, path_doppler_arrays
from isacsim.paths import PathSet, empty_path_set


def simple_set(n, link_id="l", kind="target", micro=None):
    ps = empty_path_set(link_id, kind)
    ps.delay = np.linspace(1e-6, 2e-6, n)
    ps.amp = np.ones(n)
    ps.phase = np.zeros(n)
    ps.pol = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
    for name in ("aod", "zod", "aoa", "zoa", "inc_theta", "inc_phi", "sca_theta", "sca_phi"):
        setattr(ps, name, np.zeros(n))
    ps.seg1_dist = np.ones(n)
    ps.seg2_dist = np.ones(n)
    ps.spst_idx = np.zeros(n, dtype=int)
    ps.ray1_idx = np.arange(n)
    ps.ray2_idx = np.arange(n)
    ps.r_tx = np.tile([1.0, 0, 0], (n, 1))
    ps.r_rx = np.tile([1.0, 0, 0], (n, 1))
    ps.r_sp_tx = np.tile([0.0, 1.0, 0], (n, 1))
    ps.r_sp_rx = np.tile([0.0, 1.0, 0], (n, 1))
    ps.v_anchor = np.zeros((n, 3))
    ps.alpha_tx = np.zeros(n)
    ps.alpha_rx = np.zeros(n)
    ps.d_tx = np.zeros(n)
    ps.d_rx = np.zeros(n)
    if micro is not None:
        ps.micro_groups = [micro]
        ps.micro_group = np.zeros(n, dtype=int)
    else:
        ps.micro_group = np.full(n, -1, dtype=int)
    return ps


def test_select_scaled_and_sort():
    ps = simple_set(4)
    ps.amp = np.array([1.0, 2.0, 3.0, 4.0])
    sub = ps.select(ps.amp > 2.0)
    assert len(sub) == 2 and np.array_equal(sub.amp, [3.0, 4.0])
    doubled = ps.scaled(2.0)
    assert np.array_equal(doubled.amp, [2.0, 4.0, 6.0, 8.0])
    assert np.array_equal(ps.amp, [1.0, 2.0, 3.0, 4.0])  # original untouched
    shuffled = ps.select(np.array([2, 0, 3, 1]))
    assert np.all(np.diff(shuffled.sorted_by_delay().delay) >= 0)


def test_concatenate_rebases_micro_groups():
    arm = MicroMotion("arm", 0.3, 1.0, axis=(0.0, 1.0, 0.0))
    rotor = MicroMotion("rotor", 0.05, 30.0, axis=(0.0, 1.0, 0.0))
    a = simple_set(2, micro=(arm,))
    b = simple_set(3, micro=(rotor,))
    c = simple_set(1)  # no micro motion
    merged = PathSet.concatenate([a, b, c], link_id="m")
    assert len(merged) == 6
    assert merged.micro_groups == [(arm,), (rotor,)]
    assert list(merged.micro_group) == [0, 0, 1, 1, 1, -1]
    # Doppler at t=0: group velocities differ by part frequency.
    lam = 0.05
    fd = path_doppler_arrays(merged, lam, np.zeros(3), np.zeros(3), t=0.0)
    v_arm = 2 * np.pi * 1.0 * 0.3
    v_rotor = 2 * np.pi * 30.0 * 0.05
    assert fd[0] == pytest.approx(2 * v_arm / lam, rel=1e-12)
    assert fd[2] == pytest.approx(2 * v_rotor / lam, rel=1e-12)
    assert fd[5] == 0.0


def test_concatenate_empty_and_single():
    e = PathSet.concatenate([], link_id="x")
    assert len(e) == 0 and e.link_id == "x"
    a = simple_set(2, link_id="orig")
    same = PathSet.concatenate([a], link_id="renamed")
    assert same.link_id == "renamed" and len(same) == 2


def test_power_db():
    ps = simple_set(2)
    ps.amp = np.array([1.0, 0.1])
    assert np.allclose(ps.power_db(), [0.0, -20.0])
