#!/usr/bin/env python3
"""Reference values for the acceptance catalog.

Each value is computed from a closed form and cross-checked by an independent
numerical route. Writes crates/core/data/oracles.csv (or --out).
"""
import argparse
import csv
import math
import sys
from pathlib import Path

import mpmath as mp
import numpy as np
from scipy import integrate

mp.mp.dps = 30


def square_torsion_series(b, h, tol=1e-16):
    """J_t of a b x h rectangle (b >= h) by the single-series solution."""
    s, n = mp.mpf(0), 1
    while True:
        term = mp.tanh(n * mp.pi * b / (2 * h)) / mp.mpf(n) ** 5
        s += term
        if term < tol:
            break
        n += 2
    return float(mp.mpf(h) ** 3 * b / 3 * (1 - 192 * h / (mp.pi**5 * b) * s))


def square_torsion_double_series(a, terms=400):
    """Same quantity from the double Fourier series of the Prandtl function."""
    m = np.arange(1, 2 * terms, 2, dtype=float)
    M, N = np.meshgrid(m, m)
    return float(256 * a**4 / np.pi**6 * np.sum(1.0 / (M**2 * N**2 * (M**2 + N**2))))


def circle_flexure_chi(nu):
    c = nu / (1 + nu)
    alpha = (3 - c) / 8
    gamma = 1 - 2 * alpha
    beta = (3 * alpha - 1) / alpha
    inertia = math.pi / 4

    def s(r, t):
        x, y = r * math.cos(t), r * math.sin(t)
        return -gamma / inertia * x * y, alpha / inertia * (1 - y * y - beta * x * x)

    energy = integrate.dblquad(lambda r, t: r * sum(v * v for v in s(r, t)), 0, 2 * math.pi, 0, 1, epsabs=1e-14)[0]
    force = integrate.dblquad(lambda r, t: r * s(r, t)[1], 0, 2 * math.pi, 0, 1, epsabs=1e-14)[0]
    return math.pi * energy / force**2


def circle_flexure_chi_closed(nu):
    return (7 + 14 * nu + 8 * nu * nu) / (6 * (1 + nu) ** 2)


def ellipse_torsion(a, b):
    k = a * a * b * b / (a * a + b * b)

    def s(y, x):
        return -2 * k * y / (b * b), 2 * k * x / (a * a)

    def over(f):
        return integrate.dblquad(
            f, -a, a, lambda x: -b * math.sqrt(max(0.0, 1 - x * x / (a * a))),
            lambda x: b * math.sqrt(max(0.0, 1 - x * x / (a * a))), epsabs=1e-13)[0]

    energy = over(lambda y, x: sum(v * v for v in s(y, x)))
    moment = over(lambda y, x: x * s(y, x)[1] - y * s(y, x)[0])
    jo = math.pi * a * b * (a * a + b * b) / 4
    return jo * energy / moment**2, moment


def rectangle_flexure_chi(b, h):
    inertia = b * h**3 / 12
    profile = lambda y: (h * h / 4 - y * y) / (2 * inertia)
    energy = b * integrate.quad(lambda y: profile(y) ** 2, -h / 2, h / 2, epsabs=1e-15)[0]
    force = b * integrate.quad(profile, -h / 2, h / 2, epsabs=1e-15)[0]
    return b * h * energy / force**2


def check(name, a, b, tol):
    if abs(a - b) > tol * max(1.0, abs(a)):
        sys.exit(f"oracle cross-check failed for {name}: {a!r} vs {b!r}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=Path(__file__).resolve().parent.parent / "crates/core/data/oracles.csv")
    args = parser.parse_args()

    rows = []
    add = lambda sec, q, nu, v, tol, d: rows.append((sec, q, nu, repr(float(v)), tol, d))

    add("circle", "A", "", math.pi, "0.005", "pi R^2")
    add("circle", "Jo", "", math.pi / 2, "0.005", "pi R^4 / 2")
    add("circle", "Jt", "", math.pi / 2, "0.005", "radial Prandtl function (R^2 - r^2)/2")
    add("circle", "chi_t", "", 1.0, "0.005", "Jo / Jt with Jt = Jo")
    for nu in (0.0, 0.15, 0.3, 0.45):
        closed = circle_flexure_chi_closed(nu)
        check(f"circle chi_s nu={nu}", closed, circle_flexure_chi(nu), 1e-10)
        add("circle", "chi_s", repr(nu), closed, "0.01", "polar quadrature of classical circular flexure stresses")

    ro, ri = 1.0, 0.5
    add("annulus", "Jt", "", math.pi / 2 * (ro**4 - ri**4), "0.01", "axisymmetric Prandtl function")
    add("annulus", "chi_t", "", 1.0, "0.01", "Jo / Jt with Jt = Jo")
    add("annulus", "hole_constant", "", (ro * ro - ri * ri) / 2, "0.01", "(Ro^2 - Ri^2)/2")

    a, b = 2.0, 1.0
    chi, moment = ellipse_torsion(a, b)
    jt = math.pi * a**3 * b**3 / (a * a + b * b)
    closed = (a * a + b * b) ** 2 / (4 * a * a * b * b)
    check("ellipse chi_t", closed, chi, 1e-9)
    check("ellipse Jt", jt, moment, 1e-9)
    add("ellipse", "Jt", "", jt, "0.01", "elliptic Prandtl function, numerically integrated")
    add("ellipse", "chi_t", "", closed, "0.01", "(a^2+b^2)^2/(4a^2b^2), numerically integrated")

    jt = square_torsion_series(1.0, 1.0)
    check("square Jt", jt, square_torsion_double_series(1.0), 1e-7)
    add("square", "Jt", "", jt, "0.005", "single series, cross-checked by double Fourier series")
    add("square", "chi_t", "", (1.0 / 6.0) / jt, "0.01", "Jo / Jt with Jo = 1/6")

    for aspect in (1, 2, 5):
        chi = rectangle_flexure_chi(float(aspect), 1.0)
        check(f"rectangle {aspect}", 1.2, chi, 1e-12)
        add(f"rectangle_{aspect}", "chi_s", "0.0", 1.2, "0.01", "parabolic profile integrated exactly")

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["section_id", "quantity", "nu", "value", "tolerance", "derivation"])
        w.writerows(rows)
    print(f"wrote {len(rows)} entries to {args.out}")


if __name__ == "__main__":
    main()
