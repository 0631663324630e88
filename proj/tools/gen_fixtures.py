#!/usr/bin/env python3
"""Regenerates the frozen spectrum and material fixtures under data/.

The outputs are committed; this script only documents how they were made.

Spectrum: unfiltered Kramers bremsstrahlung for a 130 kVp tungsten anode,
3.0 mm Al filtration, tungsten K lines (Ka2 57.98, Ka1 59.32, Kb1 67.24,
Kb2 69.10 keV) adding 10% of the continuum photon count, binned into eleven
10 keV bins centred at 25..125 keV and normalized to unit sum.

Materials: ICRU-44 mass attenuation coefficients (adipose, soft tissue,
cortical bone) resampled log-log onto 10..150 keV in 5 keV steps and scaled
so the 70 keV values equal 0.1782, 0.2033 and 0.4948 cm^-1. Air is zero.
"""

import math
import os
import sys

import numpy as np

TABLE_KEV = np.array([10, 15, 20, 30, 40, 50, 60, 80, 100, 150.0])
ADIPOSE = np.array([3.268, 1.083, 0.5677, 0.3070, 0.2397, 0.2127, 0.1984, 0.1823, 0.1719, 0.1534])
SOFT_TISSUE = np.array([5.379, 1.700, 0.8205, 0.3790, 0.2688, 0.2264, 0.2048, 0.1823, 0.1693, 0.1492])
CORTICAL_BONE = np.array([28.51, 9.032, 4.001, 1.331, 0.6655, 0.4242, 0.3148, 0.2229, 0.1855, 0.1480])
ALUMINIUM = np.array([26.23, 7.955, 3.441, 1.128, 0.5685, 0.3681, 0.2778, 0.2018, 0.1704, 0.1378])
ALUMINIUM_DENSITY = 2.699

ANCHORS_70KEV = {
    "adipose": 0.1782,
    "soft_tissue": 0.2033,
    "cortical_bone": 0.4948,
}


def loglog(energies, table):
    return np.exp(np.interp(np.log(energies), np.log(TABLE_KEV), np.log(table)))


def spectrum(kvp=130.0, al_mm=3.0, k_fraction=0.10):
    fine = np.arange(10.0, kvp + 0.5, 0.5)
    phi = np.clip(kvp - fine, 0.0, None) / fine
    mu_al = loglog(fine, ALUMINIUM) * ALUMINIUM_DENSITY
    phi = phi * np.exp(-mu_al * al_mm / 10.0)
    total = phi.sum()
    lines = [(57.98, 58.0), (59.32, 100.0), (67.24, 22.0), (69.10, 8.0)]
    rel_total = sum(r for _, r in lines)
    for energy, rel in lines:
        att = math.exp(-loglog(np.array([energy]), ALUMINIUM)[0] * ALUMINIUM_DENSITY * al_mm / 10.0)
        phi[np.argmin(np.abs(fine - energy))] += k_fraction * total * rel / rel_total * att
    centers = np.arange(25.0, 126.0, 10.0)
    weights = np.array([phi[(fine >= c - 5.0) & (fine < c + 5.0)].sum() for c in centers])
    return centers, weights / weights.sum()


def main(root):
    data = os.path.join(root, "data")
    os.makedirs(os.path.join(data, "spectra"), exist_ok=True)
    os.makedirs(os.path.join(data, "materials"), exist_ok=True)

    centers, weights = spectrum()
    with open(os.path.join(data, "spectra", "tungsten_130kvp_11bin.csv"), "w") as f:
        f.write("# 130 kVp tungsten, 3.0 mm Al, 11 bins of 10 keV; weights sum to 1\n")
        f.write("energy_kev,weight\n")
        for e, w in zip(centers, weights):
            f.write(f"{e:.17g},{w:.17g}\n")

    grid = np.arange(10.0, 151.0, 5.0)
    curves = {"air": np.zeros_like(grid)}
    for name, table in (("adipose", ADIPOSE), ("soft_tissue", SOFT_TISSUE), ("cortical_bone", CORTICAL_BONE)):
        values = loglog(grid, table)
        values *= ANCHORS_70KEV[name] / values[grid == 70.0][0]
        values[grid == 70.0] = ANCHORS_70KEV[name]
        curves[name] = values

    order = ["air", "adipose", "soft_tissue", "cortical_bone"]
    for name in order:
        with open(os.path.join(data, "materials", f"{name}.csv"), "w") as f:
            f.write(f"# {name}; linear attenuation, 70 keV anchored\n")
            f.write("energy_kev,lac_per_cm\n")
            for e, v in zip(grid, curves[name]):
                f.write(f"{e:.17g},{v:.17g}\n")
    with open(os.path.join(data, "materials", "manifest.txt"), "w") as f:
        f.write("# material files in ascending 70 keV attenuation order\n")
        for name in order:
            f.write(f"{name}.csv\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), ".."))
