#!/usr/bin/env python3
"""Regenerate the synthetic fixture data under data/.

Element tables use a three-process model of the mass attenuation coefficient:
Klein-Nishina Compton scattering per electron, a photoelectric term
C Z^4 / (A E0^3) (E0 / E)^m(Z) anchored at E0 = 30 keV, and a
coherent-scattering term K Z^2.5 / (A E^2). The photoelectric energy exponent
m(Z) = 3.3 - 0.03 Z flattens with atomic number as in tabulated data, which
gives each element its own spectral shape. No absorption edges fall inside the 30-160 keV band for
these elements, so the smooth model is adequate for a desk-scale study.

Usage: tools/make_synthetic_data.py [data_dir]
"""

import math
import sys
from pathlib import Path

N_A = 6.02214076e23
R_E = 2.8179403262e-13  # classical electron radius, cm
ME_C2 = 510.99895  # keV
PHOTO_C = 18.0  # cm^2 g^-1 keV^3, tuned so water is close to tabulated values
PHOTO_E0 = 30.0  # keV
COHERENT_K = 2.5  # cm^2 g^-1 keV^2

# symbol: (Z, A, density g/cm^3)
ELEMENTS = {
    "H": (1, 1.008, 8.375e-05),
    "C": (6, 12.011, 2.0),
    "N": (7, 14.007, 1.165e-03),
    "O": (8, 15.999, 1.332e-03),
    "Na": (11, 22.990, 0.971),
    "Al": (13, 26.982, 2.699),
    "S": (16, 32.06, 2.0),
    "Cl": (17, 35.45, 2.995e-03),
    "K": (19, 39.098, 0.862),
    "Ca": (20, 40.078, 1.55),
}
AIR = {"N": 0.7553, "O": 0.2447}
AIR_DENSITY = 1.205e-03


def klein_nishina(e_kev):
    """Total Klein-Nishina cross section per electron, cm^2."""
    k = e_kev / ME_C2
    a = (1 + k) / k**2 * (2 * (1 + k) / (1 + 2 * k) - math.log(1 + 2 * k) / k)
    b = math.log(1 + 2 * k) / (2 * k)
    c = (1 + 3 * k) / (1 + 2 * k) ** 2
    return 2 * math.pi * R_E**2 * (a + b - c)


def mass_attenuation(symbol, e_kev):
    z, a, _ = ELEMENTS[symbol]
    compton = N_A * z / a * klein_nishina(e_kev)
    photo = PHOTO_C * z**4 / (a * PHOTO_E0**3) * (PHOTO_E0 / e_kev) ** (3.3 - 0.03 * z)
    coherent = COHERENT_K * z**2.5 / (a * e_kev**2)
    return compton + photo + coherent


def energies():
    # 81 log-spaced samples on [1, 200] keV.
    return [10 ** (math.log10(1.0) + i * (math.log10(200.0) - math.log10(1.0)) / 80) for i in range(81)]


def write_element(path, symbol, density, values):
    lines = [f"# symbol={symbol} density_g_cm3={density!r}", "energy_keV,mu_over_rho_cm2_g"]
    lines += [f"{e!r},{v!r}" for e, v in values]
    path.write_text("\n".join(lines) + "\n")


def write_elements(out):
    out.mkdir(parents=True, exist_ok=True)
    for symbol, (_, _, density) in ELEMENTS.items():
        write_element(out / f"{symbol}.csv", symbol, density,
                      [(e, mass_attenuation(symbol, e)) for e in energies()])
    air = [(e, sum(w * mass_attenuation(s, e) for s, w in AIR.items())) for e in energies()]
    write_element(out / "Air.csv", "Air", AIR_DENSITY, air)


def write_spectrum(path, kvp=160.0, al_mm=2.5):
    """Kramers photon spectrum (kvp - E) / E behind an aluminium filter."""
    lines = ["# Kramers 160 kVp tungsten-like spectrum, 2.5 mm Al filtration", "energy_keV,intensity"]
    rho_al = ELEMENTS["Al"][2]
    for i in range(10, 161):
        e = float(i)
        s = max(kvp - e, 0.0) / e * math.exp(-mass_attenuation("Al", e) * rho_al * al_mm / 10.0)
        lines.append(f"{e!r},{s!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


# name, class, density mean, density std, [(element, w_mean, w_std)]
MATERIALS = [
    ("water", "non_threat", 1.00, 0.03, [("H", 0.1119, 0.008), ("O", 0.8881, 0.008)]),
    ("polyethylene", "non_threat", 0.94, 0.03, [("H", 0.1437, 0.012), ("C", 0.8563, 0.012)]),
    ("milk", "non_threat", 1.03, 0.03,
     [("H", 0.108, 0.008), ("C", 0.070, 0.016), ("N", 0.006, 0.004), ("O", 0.812, 0.016),
      ("Ca", 0.002, 0.002), ("K", 0.002, 0.002)]),
    ("toothpaste", "non_threat", 1.45, 0.05,
     [("H", 0.05, 0.012), ("C", 0.10, 0.02), ("O", 0.56, 0.02), ("Na", 0.04, 0.008), ("Ca", 0.25, 0.02)]),
    ("sugar", "non_threat", 1.20, 0.05, [("H", 0.0648, 0.004), ("C", 0.4211, 0.012), ("O", 0.5141, 0.012)]),
    ("ammonium_nitrate", "threat", 1.10, 0.05, [("H", 0.0504, 0.004), ("N", 0.3500, 0.012), ("O", 0.5996, 0.012)]),
    ("hydrogen_peroxide_30", "threat", 1.11, 0.03, [("H", 0.0961, 0.008), ("O", 0.9039, 0.008)]),
    ("black_powder", "threat", 1.70, 0.05,
     [("K", 0.290, 0.02), ("N", 0.104, 0.012), ("O", 0.356, 0.02), ("C", 0.150, 0.02), ("S", 0.100, 0.016)]),
]


def write_library(path):
    out = ["# Synthetic material library: 5 non-threat and 3 threat materials.",
           "# Weight fractions are nominal stoichiometries; std values are illustrative.", ""]
    for name, cls, rho, rho_sd, comps in MATERIALS:
        total = sum(w for _, w, _ in comps)
        assert abs(total - 1.0) < 1e-9, (name, total)
        out += ["material {", f"  name = {name}", f"  class = {cls}",
                f"  density_mean = {rho!r}", f"  density_std = {rho_sd!r}"]
        for el, w, sd in comps:
            out += ["  component {", f"    element = {el}", f"    w_mean = {w!r}", f"    w_std = {sd!r}", "  }"]
        out += ["}", ""]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out))


CONFIG = """\
# Default study: 160 bag pairs of 10-pixel objects, 4 items per vial.
scenario {
  n_pixels = 10
  length_min_cm = 0.5
  length_max_cm = 20
  items_per_vial = 4
  n_bag_pairs = 160
  bins = 1, 2, 3
  n0 = 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9
  variants = shot_only, material_only, combined
  corr_modes = correlated, uncorrelated
  decorrelation = flux
  threat_prior = 0.5
  exposure_time = 1
  n_realizations = 1000
  seed = 20190601
  grid_min_kev = 30
  grid_max_kev = 160
  grid_samples = 180
  library = ../materials/synthetic_library.txt
  spectrum = ../spectra/kramers_160kvp.csv
  elements = ../elements
}
"""


def main():
    data = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    write_elements(data / "elements")
    write_spectrum(data / "spectra" / "kramers_160kvp.csv")
    write_library(data / "materials" / "synthetic_library.txt")
    (data / "config").mkdir(parents=True, exist_ok=True)
    (data / "config" / "default.txt").write_text(CONFIG)


if __name__ == "__main__":
    main()
