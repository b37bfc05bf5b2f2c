"""Compare the compiled and numpy kernel backends.

Times the three hot kernels on blocks taken from a real sphere mesh, then a
full impedance-matrix assembly with each backend, and checks that the two
backends agree.

    python3 benchmarks/bench_kernels.py [--edge-mm 12] [--repeat 3]
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np
from scipy import constants

from monoground.efie import Assembler, build_basis, kernels
from monoground.efie import _kernels_py
from monoground.geometry import Sphere, generate

NAMES = ("potential_integrals", "regular_slot_block", "near_slot_block")


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def max_rel(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def kernel_cases(asm, k, c_a, c_phi):
    block = asm.blocks[0]
    t, s = asm._near_pairs(block, asm.centroid)
    test, src = asm.verts[t], asm.verts[s]
    obs = np.einsum("nk,pkd->pnd", asm.out_bary, test).reshape(-1, 3)
    tri = np.repeat(src, len(asm.out_w), axis=0)
    return {
        "potential_integrals": (obs, tri),
        "regular_slot_block": (asm.reg_pts[block], asm.reg_w, asm.verts[block], asm.reg_pts,
                               asm.reg_w, asm.verts, k, c_a, c_phi),
        "near_slot_block": (test, src, asm.out_bary, asm.out_w, asm.in_bary, asm.in_w,
                            k, c_a, c_phi),
    }


def assemble_with(impl, asm, frequency):
    saved = {n: getattr(kernels, n) for n in NAMES}
    try:
        for n in NAMES:
            setattr(kernels, n, getattr(impl, n))
        return asm.matrix(frequency).z
    finally:
        for n, f in saved.items():
            setattr(kernels, n, f)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--edge-mm", type=float, default=12.0)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--freq-hz", type=float, default=1.3e9)
    args = ap.parse_args(argv)

    try:
        compiled = importlib.import_module("monoground.efie._kernels")
    except ImportError:
        print("compiled extension not built; only the numpy backend is available")
        return 1

    mesh = generate(Sphere(), edge_mm=args.edge_mm)
    basis = build_basis(mesh)
    asm = Assembler(basis)
    omega = 2 * np.pi * args.freq_hz
    k = omega / constants.c
    c_a = 1j * omega * constants.mu_0 / 4.0
    c_phi = 1.0 / (1j * omega * constants.epsilon_0)
    print(f"sphere mesh: {mesh.n_triangles} triangles, {basis.n} unknowns")
    print(f"{'kernel':<22}{'numpy (ms)':>12}{'compiled (ms)':>15}{'speedup':>9}{'max rel diff':>14}")

    for name, call_args in kernel_cases(asm, k, c_a, c_phi).items():
        tp, ref = best_of(lambda: getattr(_kernels_py, name)(*call_args), args.repeat)
        tc, out = best_of(lambda: getattr(compiled, name)(*call_args), args.repeat)
        if isinstance(ref, tuple):
            diff = max(max_rel(o, r) for o, r in zip(out, ref))
        else:
            diff = max_rel(out, ref)
        print(f"{name:<22}{tp * 1e3:>12.2f}{tc * 1e3:>15.2f}{tp / tc:>9.1f}{diff:>14.1e}")

    tp, zp = best_of(lambda: assemble_with(_kernels_py, asm, args.freq_hz), 1)
    tc, zc = best_of(lambda: assemble_with(compiled, asm, args.freq_hz), 1)
    print(f"{'full assembly':<22}{tp * 1e3:>12.0f}{tc * 1e3:>15.0f}{tp / tc:>9.1f}"
          f"{max_rel(zc, zp):>14.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
