#!/usr/bin/env python3
"""Tour of the gDoF calculators: closed forms, the exact corner-point
solver for symmetric 2x2 exponents, and the grid solver for general ones.

Run:
    python demos/gdof_tour.py
"""

import numpy as np

from noncohmimo import (
    LinkExponents,
    gdof_2x2_sym,
    gdof_gaussian_codebook,
    gdof_miso,
    gdof_parallel,
    gdof_simo,
    gdof_siso,
    gdof_training,
    solve_p8_grid,
    solve_p9_corners,
)


def closed_forms():
    print("=== closed forms (per-symbol gDoF) ===")
    print(f"SISO  gamma=1, T=2           -> {gdof_siso(1.0, 2):.4f}")
    print(f"2-branch parallel, T=2       -> {gdof_parallel([1.0, 1.0], 2):.4f}")
    print(f"SIMO  gammas=(1, 0.5), T=2   -> {gdof_simo([1.0, 0.5], 2):.4f}")
    print(f"SIMO  any gammas,     T=1    -> {gdof_simo([1.0, 0.5], 1):.4f}")
    print(f"MISO  gammas=(1,.6,.2), T=4  -> {gdof_miso([1.0, 0.6, 0.2], 4):.4f}")
    print()


def symmetric_2x2():
    print("=== symmetric 2x2: exact corner solver vs closed form ===")
    print(f"{'gd':>4} {'gcl':>5} {'T':>3} {'corners':>9} {'closed':>8}  argmax")
    for gd, gcl in [(1.0, 0.5), (1.0, 0.25), (2.0, 2.0)]:
        for t in (2, 3, 4, 8):
            sol = solve_p9_corners(gd, gcl, t)
            closed = gdof_2x2_sym(gd, gcl, t)
            argmax = (sol.gamma_a, sol.gamma_b, sol.gamma_c)
            print(
                f"{gd:4.2f} {gcl:5.2f} {t:3d} {sol.per_symbol:9.5f} "
                f"{closed:8.5f}  {argmax}"
            )
    print()
    print("T=2 needs both antennas: a single antenna caps at gd/2 =",
          gdof_simo([1.0, 1.0], 2))
    print()


def weak_crosslinks_beat_training():
    print("=== weaker crosslinks vs per-antenna training (M x M) ===")
    gd, gcl = 1.0, 0.5
    for m, t in [(2, 4), (3, 6), (4, 8)]:
        code = gdof_gaussian_codebook(m, gd, gcl, t)
        train = gdof_training(m, gd, t)
        print(
            f"M={m} T={t}:  gaussian codebooks {code:.4f}   "
            f"training ceiling {train:.4f}   gain {code - train:.4f}"
        )
    print()


def general_exponents():
    print("=== general exponents: grid solver ===")
    exps = LinkExponents.from_matrix([[1.0, 0.3], [0.6, 0.9]])
    for t in (2, 3, 5):
        sol = solve_p8_grid(exps, t)
        print(
            f"T={t}: per-symbol {sol.per_symbol:.5f} at "
            f"({sol.gamma_a:.4f}, {sol.gamma_b:.4f}, {sol.gamma_c:.4f})"
        )
    # decoupled links reduce to parallel channels
    diag = solve_p8_grid(LinkExponents.from_matrix([[1.0, 0.0], [0.0, 1.0]]), 2)
    print(f"decoupled links, T=2: {diag.per_symbol:.5f} "
          f"(parallel closed form {gdof_parallel([1.0, 1.0], 2):.5f})")
    print()


if __name__ == "__main__":
    closed_forms()
    symmetric_2x2()
    weak_crosslinks_beat_training()
    general_exponents()
