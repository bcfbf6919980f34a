import math

import numpy as np
import pytest

from qfpc import forces
from qfpc.forces import (
    PRESETS,
    AtomPolarizability,
    AtomPreset,
    f_channel,
    f_channels,
    force_si,
    loglog_slope,
    sweep,
    thread_count,
    z_of,
)
from qfpc.kernels import CHANNELS, Channel, Kinematics, ThermalGeometry
from qfpc.quadrature import NonConvergenceError, QuadratureConfig

HBAR_C = 1.054571817e-34 * 2.99792458e8
K_B = 1.380649e-23


def test_z_of_examples():
    assert z_of(10e-9, 16100.0) == pytest.approx(HBAR_C / (2 * 10e-9 * K_B * 16100), rel=1e-14)
    assert z_of(10e-9, 16100.0) == pytest.approx(7.11, abs=0.005)
    assert z_of(1e-9, 16100.0) == pytest.approx(71.1, abs=0.05)
    assert z_of(20e-9, 300.0) == pytest.approx(z_of(10e-9, 300.0) / 2, rel=1e-15)
    with pytest.raises(ValueError):
        z_of(-1.0, 300.0)


def test_atom_types():
    cs = PRESETS["Cs"]
    assert 0 < cs.T1_K < cs.Ti_K
    assert cs.polarizability.is_isotropic
    assert cs.polarizability.alpha_xx == pytest.approx(59.3e-30)
    atom = AtomPolarizability.from_A3(1.0, 2.0, 3.0)
    assert atom.pair(Channel.XZ) == pytest.approx(3e-60)
    with pytest.raises(ValueError):
        atom.pair(Channel.ISO)
    with pytest.raises(ValueError):
        AtomPolarizability(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        AtomPreset(cs.polarizability, 5.0, 4.0)


def test_zero_velocity_is_exactly_zero():
    res = f_channels(CHANNELS, Kinematics(0.0), 2.0)
    assert all(r.value == 0.0 for r in res.values())


def test_channel_signs_and_iso_sum():
    res = f_channels(CHANNELS, Kinematics(0.4), 3.0)
    vals = {c: r.value for c, r in res.items()}
    assert vals[Channel.XX] < 0 and vals[Channel.YY] < 0 and vals[Channel.ZZ] < 0
    assert 0 < vals[Channel.XZ] < abs(vals[Channel.ZZ])
    iso = f_channel(Channel.ISO, Kinematics(0.4), 3.0).value
    assert iso == pytest.approx(math.fsum(vals.values()), rel=1e-12)
    assert all(r.rel_err_est <= 1e-8 for r in res.values())


def test_shared_pass_matches_single_channel():
    kin = Kinematics(0.3)
    together = f_channels(CHANNELS, kin, 1.0)
    for ch in CHANNELS:
        assert f_channel(ch, kin, 1.0).value == pytest.approx(together[ch].value, rel=1e-10)


def test_tighter_tolerance_agrees():
    kin = Kinematics(0.7)
    a = f_channels(CHANNELS, kin, 0.5)
    b = f_channels(CHANNELS, kin, 0.5, QuadratureConfig(rel_tol=1e-11))
    for ch in CHANNELS:
        assert a[ch].value == pytest.approx(b[ch].value, rel=1e-8)


def test_force_assembly_by_hand():
    atom = AtomPolarizability.from_A3(40.0, 50.0, 60.0)
    kin, geom = Kinematics(0.5), ThermalGeometry(10e-9, 5000.0)
    b = force_si(atom, kin, geom)
    pref = HBAR_C / (32 * math.pi**3 * (2 * geom.a) ** 8)
    alpha = {"xx": 40e-30, "yy": 50e-30, "zz": 60e-30}
    assert b.F_xx_N == pytest.approx(pref * alpha["xx"] ** 2 * b.f_xx, rel=1e-14)
    assert b.F_yy_N == pytest.approx(pref * alpha["yy"] ** 2 * b.f_yy, rel=1e-14)
    assert b.F_zz_N == pytest.approx(pref * alpha["zz"] ** 2 * b.f_zz, rel=1e-14)
    assert b.F_xz_N == pytest.approx(pref * alpha["xx"] * alpha["zz"] * b.f_xz, rel=1e-14)
    assert b.F_total_N == pytest.approx(b.F_xx_N + b.F_yy_N + b.F_zz_N + b.F_xz_N, rel=1e-14)
    assert math.isnan(b.F_iso_N)
    assert b.f_iso == pytest.approx(b.f_xx + b.f_yy + b.f_zz + b.f_xz, rel=1e-12)
    with pytest.raises(ValueError):
        force_si(atom, kin, geom, [Channel.ISO])


def test_iso_force_and_sign():
    cs = PRESETS["Cs"]
    b = force_si(cs.polarizability, Kinematics(0.3), ThermalGeometry(10e-9, 10000.0), [Channel.ISO])
    assert b.F_total_N == b.F_iso_N
    assert math.copysign(1, b.F_total_N) == math.copysign(1, b.f_iso) == -1


def test_subset_of_channels_leaves_nan():
    cs = PRESETS["Cs"]
    b = force_si(cs.polarizability, Kinematics(0.3), ThermalGeometry(10e-9, 10000.0), [Channel.XZ])
    assert math.isnan(b.f_xx) and math.isnan(b.f_iso)
    assert b.F_total_N == b.F_xz_N > 0


def test_regime_note_above_T1():
    cs = PRESETS["Cs"]
    hot = force_si(cs.polarizability, Kinematics(0.3), ThermalGeometry(10e-9, 20000.0), preset=cs)
    cold = force_si(cs.polarizability, Kinematics(0.3), ThermalGeometry(10e-9, 10000.0), preset=cs)
    assert any("static-limit" in n for n in hot.regime_notes)
    assert cold.regime_notes == ()


def test_sweep_order_threads_and_failures(monkeypatch):
    cs = PRESETS["Cs"].polarizability
    grid = [(0.1, 10e-9, 5000.0), (0.5, 10e-9, 5000.0), (0.3, 20e-9, 8000.0)]
    serial = sweep(grid, cs, threads=1)
    threaded = sweep(grid, cs, threads=3)
    assert [r.v for r in serial] == [0.1, 0.5, 0.3]
    assert [r.F_total_N for r in serial] == [r.F_total_N for r in threaded]

    real = forces.f_channels

    def flaky(chans, kin, z, cfg):
        if kin.v == 0.5:
            raise NonConvergenceError(f"at v={kin.v:g}, z={z:g}: forced")
        return real(chans, kin, z, cfg)

    monkeypatch.setattr(forces, "f_channels", flaky)
    rows = sweep(grid, cs, threads=2)
    assert rows[0].ok and rows[2].ok
    assert not rows[1].ok and "v=0.5" in rows[1].error
    assert math.isnan(rows[1].F_total_N)
    assert rows[0].F_total_N == serial[0].F_total_N


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("QFPC_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("QFPC_THREADS", "0")
    with pytest.raises(ValueError):
        thread_count()


def test_loglog_slope():
    xs = np.geomspace(1, 100, 7)
    assert loglog_slope(xs, -3 * xs**8) == pytest.approx(8, rel=1e-12)
