"""End-to-end acceptance checks.

Each test prints one ``criterion NN: PASS|FAIL`` line (also collected in
the terminal summary) before asserting, so a failing criterion still
reports the measured numbers.
"""

import io
import math

import numpy as np
import pytest

from conftest import BAND, F0, record_criterion
from monoground.analytic import (MediumParams, MonopoleParams, ObservationPoint,
                                 field_components, induced_emf_dipole, pattern_from_kh)
from monoground.experiment import (FrequencyPlan, Scenario, SweepPlan, run_scenario, run_sweep,
                                   trend_check)
from monoground.experiment.fixtures import check_fixtures
from monoground.fab import (STANDARD_SPHERE_REFERENCE, SkinDepthQuery, plating_current,
                            skin_depth)
from monoground.fom import (FrequencyResponse, co_cross_split, directivity_integral, far_field,
                            lobe_count, pattern_cut, peak_gain, radiated_power, resonances,
                            s11_db)
from monoground.geometry import (CoaxModel, Planar, SlottedSphere, Sphere, export_stl,
                                 generate, read_stl)

COAX = CoaxModel()


def rel(a, b):
    return abs(a - b) / abs(b)


def test_c01_analytic_farfield_vs_exact():
    m = MediumParams.from_frequency(F0)
    h = m.wavelength / 4
    mono = MonopoleParams(h)
    theta = np.linspace(90 / 20, 90, 20)
    errs, closed = [], []
    for t in theta:
        obs = ObservationPoint(1000 * h, math.radians(t))
        ff = abs(field_components(m, mono, obs, "farfield").e_total)
        ex = abs(field_components(m, mono, obs, "exact").e_total)
        errs.append(rel(ff, ex))
        # the same far field written out in closed form
        form = m.eta * m.wavenumber * h * math.sin(obs.theta) / (4 * math.pi * obs.r) \
            * 2 * abs(math.cos(m.wavenumber * h * math.cos(obs.theta)))
        closed.append(rel(ff, form))
    errs = np.array(errs)
    worst = theta[np.argmax(errs)]
    ok = errs.max() <= 0.005 and max(closed) < 1e-12
    record_criterion(1, ok, f"max rel err {errs.max():.2e} at theta={worst:g} deg "
                            f"({np.sum(errs > 0.005)}/20 angles over 0.5%); "
                            f"above 5 deg max {errs[theta >= 5].max():.2e}")
    assert ok


def test_c02_s11_arithmetic():
    a = s11_db(45.2 + 26.3j)
    b = s11_db(46.7 - 15.8j)
    ok = abs(a - -11.0) <= 1 and abs(b - -15.0) <= 1 and abs(a + 11.3) < 0.1 \
        and abs(b + 15.7) < 0.1
    record_criterion(2, ok, f"{a:.2f} dB (table -11), {b:.2f} dB (table -15)")
    assert ok


def test_c03_dipole_oracle(dipole_coarse, dipole_fine):
    oracle = induced_emf_dipole(0.5, 0.001)
    z = dipole_fine.zin
    drift = rel(dipole_fine.zin, dipole_coarse.zin)
    ok_r = rel(z.real, oracle.real) <= 0.10
    ok_x = abs(z.imag - oracle.imag) <= 15
    ok = ok_r and ok_x and drift < 0.03
    record_criterion(3, ok, f"Zin {z.real:.1f}{z.imag:+.1f}j vs oracle "
                            f"{oracle.real:.1f}{oracle.imag:+.1f}j (R off "
                            f"{100 * rel(z.real, oracle.real):.1f}%, X off "
                            f"{abs(z.imag - oracle.imag):.1f} ohm), mesh drift "
                            f"{100 * drift:.2f}%")
    assert ok


def test_c04_image_monopole(image_monopole, dipole_coarse):
    sol, pat = image_monopole
    th = np.degrees(pat.theta)
    sel = (th >= 5 - 1e-9) & (th <= 90 + 1e-9)
    e_db = pat.gain_dbi[sel, 0] - pat.gain_dbi[sel, 0].max()
    ref = pattern_from_kh(math.pi / 2, pat.theta[sel]).db
    dev = np.abs(e_db - ref).max()
    # same cut against the sinusoidal-current quarter-wave pattern
    t = pat.theta[sel]
    sinus = 20 * np.log10(np.abs(np.cos(math.pi / 2 * np.cos(t)) / np.sin(t)))
    dev_sin = np.abs(e_db - (sinus - sinus.max())).max()
    below = pat.theta > math.pi / 2 + 1e-9
    zero_below = bool(np.all(pat.e_theta[below] == 0) and np.all(pat.e_phi[below] == 0))
    g = peak_gain(pat)
    zr = rel(sol.zin, dipole_coarse.zin / 2)
    parts = {"a": dev <= 1.0, "b": zero_below, "c": abs(g - 5.16) <= 0.3, "d": zr <= 0.10}
    ok = all(parts.values())
    record_criterion(4, ok, f"(a) max dev {dev:.2f} dB [{'ok' if parts['a'] else 'fail'}; "
                            f"vs sinusoidal current {dev_sin:.2f} dB] (b) zero below: "
                            f"{zero_below} (c) peak {g:.2f} dBi (d) Zin {sol.zin:.1f} vs "
                            f"dipole/2 off {100 * zr:.1f}%")
    assert ok


def test_c05_power_balance(dipole_coarse, image_monopole, planar_run, sphere_run):
    ratios = {
        "dipole": radiated_power(dipole_coarse) / dipole_coarse.input_power,
        "image": radiated_power(image_monopole[0]) / image_monopole[0].input_power,
    }
    for name, run in (("planar", planar_run), ("sphere", sphere_run)):
        ratios[name] = run.pattern.p_rad / run.pattern.metadata["p_in"]
    ok = all(abs(r - 1) <= 0.05 for r in ratios.values())
    record_criterion(5, ok, ", ".join(f"{k} {v:.4f}" for k, v in ratios.items()))
    assert ok


def test_c06_planar_baseline(planar_run):
    rep = planar_run.report
    f = rep.best_frequency
    g = planar_run.row.gain_dbi
    pat = planar_run.pattern
    below = pat.theta > math.pi / 2 + 1e-9
    back = float(pat.gain_dbi[below].max())
    ok_f = abs(f / F0 - 1) <= 0.05
    ok_g = abs(g - 3.8) <= 1.0
    ok_b = back > -40
    ok = ok_f and ok_g and ok_b
    record_criterion(6, ok, f"S11 min {rep.best_s11_db:.2f} dB at {f / 1e9:.4f} GHz "
                            f"({100 * (f / F0 - 1):+.1f}%), peak gain {g:.2f} dBi "
                            f"(target 3.8 +/- 1), max gain below horizon {back:.1f} dBi")
    assert ok


def test_c07_sphere_vs_planar(planar_run, sphere_run):
    bw_p = planar_run.row.bandwidth_pct or 0.0
    bw_s = sphere_run.row.bandwidth_pct
    lobes = lobe_count(pattern_cut(sphere_run.pattern, "E"))
    lobes_p = lobe_count(pattern_cut(planar_run.pattern, "E"))
    ok = bw_s is not None and bw_s >= 2 * bw_p and bw_s > 0 and lobes == 2
    shown = "none" if bw_s is None else f"{bw_s:.2f}%"
    record_criterion(7, ok, f"sphere bandwidth {shown} ({sphere_run.row.status}) vs planar "
                            f"{bw_p:.2f}% ({planar_run.row.status}); "
                            f"sphere E-plane lobes {lobes}, planar {lobes_p}")
    assert ok


def test_c08_sphere_radius_trend():
    base = Scenario(Sphere(), plan=FrequencyPlan(1.2e9, 1.4e9, 5), edge_mm=16.0,
                    name="sphere-radius")
    res = run_sweep(SweepPlan(base, "geometry.radius", (28.75, 57.5, 86.25, 115.0)),
                    workers=1, persist=False)
    trend = trend_check(res.rows[1:], "gain", "non-increasing", 0.5)
    fx = check_fixtures()
    dbl = [e for e in fx.expectations if e[0].startswith("double_resonance")]
    ok = trend.ok and bool(dbl) and all(e[1] for e in dbl)
    gains = ", ".join(f"{r.value:g} mm {r.gain_dbi:.2f} dBi" for r in res.rows)
    record_criterion(8, ok, f"gains {gains}; trend from 57.5 mm {'ok' if trend.ok else 'broken'}"
                            f"; fixture double resonance: {dbl[0][2] if dbl else 'missing'}; "
                            "3/4 wavelength solve skipped (mesh over budget)")
    assert ok


def test_c09_edge_mount_asymmetry(edge_pattern, sphere_run):
    h = pattern_cut(edge_pattern, "H")
    n = len(h.gain_dbi)
    asym = float(np.abs(h.gain_dbi - np.roll(h.gain_dbi, n // 2)).max())
    ptp = float(np.ptp(pattern_cut(sphere_run.pattern, "H").gain_dbi))
    ok = asym > 1.0 and ptp < 0.5
    record_criterion(9, ok, f"edge-mounted front/back {asym:.2f} dB, centred H-plane "
                            f"ripple {ptp:.3f} dB")
    assert ok


def test_c10_geometry():
    a = COAX.hole_radius
    cap = 2 * np.pi * 57.5 * (57.5 - np.sqrt(57.5 ** 2 - a ** 2))
    sph = generate(Sphere(), COAX, 12.0, with_element=False)
    e_s = rel(sph.surface_area(), 4 * np.pi * 57.5 ** 2 - cap)
    pl = generate(Planar(), COAX, 12.0, with_element=False)
    e_p = rel(pl.surface_area(), 115.0 ** 2 - np.pi * a ** 2)
    full = generate(Sphere(), COAX, 12.0)
    # the element closes the feed hole
    chi = full.euler_characteristic()
    stl = pytest.importorskip("stl.mesh")
    other = stl.Mesh.from_file("s.stl", fh=io.BytesIO(export_stl(full)))
    rt = len(other.vectors) == full.n_triangles and \
        np.allclose(other.vectors, full.vertices[full.triangles], atol=1e-4) and \
        np.allclose(read_stl(export_stl(full)), other.vectors)
    s = SlottedSphere()
    sl = generate(s, COAX, 12.0, with_element=False)
    slots = s.slot_count * s.slot_length * s.slot_width
    e_sl = rel(sl.surface_area("metal"), 4 * np.pi * s.radius ** 2 - cap - slots)
    ok = e_s < 0.01 and e_p < 0.01 and chi == 2 and rt and e_sl < 0.02
    record_criterion(10, ok, f"sphere area err {100 * e_s:.2f}%, plate {100 * e_p:.3f}%, "
                             f"euler {chi}, STL round trip {rt}, slotted metal "
                             f"{100 * e_sl:.2f}%")
    assert ok


def test_c11_figures_of_merit(dipole_coarse):
    pat = far_field(dipole_coarse)
    norm = directivity_integral(pat)
    f = np.linspace(1.0, 1.6, 61)
    s = np.minimum(-20 + 10 * ((f - 1.3) / 0.1) ** 2, -0.1)
    bw = resonances(FrequencyResponse.from_s11(f * 1e9, s)).resonances[0].bandwidth_pct
    co, cr = co_cross_split(pat)
    tot = np.abs(pat.e_theta) ** 2 + np.abs(pat.e_phi) ** 2
    clo = float(np.max(np.abs(np.abs(co) ** 2 + np.abs(cr) ** 2 - tot)) / tot.max())
    ok = abs(norm - 1) <= 0.02 and round(bw, 1) == 15.4 and clo <= 1e-9
    record_criterion(11, ok, f"closed-surface D integral / 4pi = {norm:.4f}, synthetic "
                             f"bandwidth {bw:.2f}%, co/cross closure {clo:.1e}")
    assert ok


def test_c12_fab_tools():
    d = skin_depth(SkinDepthQuery(1.3e9))
    ref = STANDARD_SPHERE_REFERENCE
    small = plating_current(4 * np.pi * 28.75 ** 2, ref, 2.0)
    large = plating_current(4 * np.pi * 86.25 ** 2, ref, 4.0)
    lin = plating_current(2000.0, ref, 3.0) == 2 * plating_current(1000.0, ref, 3.0) and \
        plating_current(1000.0, ref, 6.0) < plating_current(1000.0, ref, 3.0)
    ok = rel(d, 1.83e-3) <= 0.02 and rel(small, 0.5) <= 0.3 and rel(large, 2.2) <= 0.3 and lin
    record_criterion(12, ok, f"skin depth {d:.4e} mm, 1/8 sphere {small:.2f} A (chose 0.5), "
                             f"3/8 sphere {large:.2f} A (chose 2.2), scaling exact {lin}")
    assert ok


def _blobs(files):
    return {p.name: p.read_bytes() for p in files}


def test_c13_determinism(tmp_path):
    plan = FrequencyPlan(1.2e9, 1.4e9, 3)
    sc = Scenario(Planar(), plan=plan, edge_mm=20.0, name="det")
    runs = []
    for i, workers in enumerate((1, 1, 2)):
        out = tmp_path / f"s{i}"
        runs.append(_blobs(run_scenario(Scenario(**{**sc.__dict__, "output_dir": str(out)}),
                                        workers=workers).files))
    sweep = SweepPlan(Scenario(Sphere(), plan=plan, edge_mm=20.0), "geometry.radius",
                      (28.75, 57.5))
    sweeps = [_blobs(run_sweep(sweep, workers=w, output_dir=str(tmp_path / f"w{i}")).files)
              for i, w in enumerate((1, 1, 2))]
    ok = all(r == runs[0] for r in runs) and all(s == sweeps[0] for s in sweeps)
    record_criterion(13, ok, f"scenario files {sorted(runs[0])} and sweep files "
                             f"{sorted(sweeps[0])} identical over 3 runs (workers 1, 1, 2)")
    assert ok


def test_c14_fixture_integrity():
    rep = check_fixtures()
    ids = {f.id for f in rep.findings}
    must = {"standard_sphere_sim.bandwidth", "planar_dish_sim.gain"}
    ok = rep.ok and must <= ids
    record_criterion(14, ok, rep.lines()[-1] + f"; required conflicts flagged: {must <= ids}")
    assert ok
