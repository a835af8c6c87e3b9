#!/usr/bin/env python3
"""Generate the NASA-7 thermo database for the methane corpus mechanism.

Each species is specified by its standard enthalpy of formation, standard
entropy, and heat-capacity samples over 300-2500 K. Two-range NASA-7
polynomials are fit with cp, h, s continuity enforced at T_mid = 1000 K,
so the emitted database always satisfies the parser's continuity checks.
"""

import numpy as np
from scipy.interpolate import PchipInterpolator

R = 8.314462618  # J/mol/K

# name -> (composition, dHf298 [kJ/mol], S298 [J/mol/K],
#          cp [J/mol/K] at T = 300, 500, 1000, 1500, 2000, 2500 K)
SPECIES = {
    "H2":      ({"H": 2},            0.0,   130.68, [28.85, 29.26, 30.20, 32.30, 34.28, 35.84]),
    "H":       ({"H": 1},          218.00,  114.72, [20.79, 20.79, 20.79, 20.79, 20.79, 20.79]),
    "O":       ({"O": 1},          249.18,  161.06, [21.90, 21.26, 20.92, 20.85, 20.83, 20.83]),
    "O2":      ({"O": 2},            0.0,   205.15, [29.39, 31.09, 34.88, 36.56, 37.78, 38.92]),
    "OH":      ({"O": 1, "H": 1},   38.99,  183.74, [29.93, 29.56, 30.68, 32.75, 34.76, 36.06]),
    "H2O":     ({"H": 2, "O": 1}, -241.83,  188.84, [33.60, 35.22, 41.27, 46.99, 51.18, 54.12]),
    "HO2":     ({"H": 1, "O": 2},   12.55,  229.10, [34.92, 38.52, 46.41, 50.55, 53.11, 54.60]),
    "H2O2":    ({"H": 2, "O": 2}, -136.11,  232.95, [43.15, 51.45, 61.93, 68.02, 71.90, 74.40]),
    "C":       ({"C": 1},          716.68,  158.10, [20.84, 20.81, 20.79, 20.84, 21.00, 21.29]),
    "CH":      ({"C": 1, "H": 1},  594.13,  183.04, [29.15, 29.30, 31.60, 34.52, 36.39, 37.62]),
    "CH2":     ({"C": 1, "H": 2},  386.39,  194.93, [34.62, 36.80, 43.25, 48.50, 51.70, 53.60]),
    "CH2(S)":  ({"C": 1, "H": 2},  424.72,  188.72, [33.80, 36.00, 42.50, 48.00, 51.20, 53.20]),
    "CH3":     ({"C": 1, "H": 3},  146.66,  194.17, [38.70, 43.74, 55.17, 63.20, 68.40, 71.80]),
    "CH4":     ({"C": 1, "H": 4},  -74.60,  186.25, [35.76, 46.34, 71.80, 86.56, 94.40, 99.00]),
    "CO":      ({"C": 1, "O": 1}, -110.53,  197.66, [29.14, 29.79, 33.18, 35.22, 36.25, 36.96]),
    "CO2":     ({"C": 1, "O": 2}, -393.52,  213.79, [37.13, 44.63, 54.31, 58.81, 60.42, 61.47]),
    "HCO":     ({"H": 1, "C": 1, "O": 1},  42.30, 224.69, [34.60, 37.40, 44.90, 49.50, 52.10, 53.60]),
    "CH2O":    ({"H": 2, "C": 1, "O": 1}, -108.58, 218.76, [35.39, 43.74, 60.17, 70.40, 76.30, 79.70]),
    "CH2OH":   ({"C": 1, "H": 3, "O": 1}, -17.80,  244.17, [47.40, 57.00, 73.00, 82.00, 87.00, 90.00]),
    "CH3O":    ({"C": 1, "H": 3, "O": 1},  21.00,  234.28, [42.00, 52.00, 72.00, 83.00, 89.00, 92.50]),
    "CH3OH":   ({"C": 1, "H": 4, "O": 1}, -201.00, 239.87, [44.10, 59.50, 89.40, 105.00, 113.50, 118.50]),
    "C2H":     ({"C": 2, "H": 1},  567.37,  207.42, [37.30, 40.50, 46.50, 50.50, 53.20, 54.80]),
    "C2H2":    ({"C": 2, "H": 2},  228.20,  200.93, [44.04, 54.77, 68.60, 76.50, 81.40, 84.40]),
    "C2H3":    ({"C": 2, "H": 3},  296.60,  231.66, [42.00, 52.00, 70.00, 81.00, 87.50, 91.50]),
    "C2H4":    ({"C": 2, "H": 4},   52.50,  219.32, [43.10, 62.48, 93.94, 110.80, 119.60, 124.80]),
    "C2H5":    ({"C": 2, "H": 5},  118.70,  250.00, [50.60, 69.00, 100.00, 117.00, 126.00, 131.00]),
    "C2H6":    ({"C": 2, "H": 6},  -84.00,  229.16, [52.49, 77.94, 117.70, 139.00, 150.00, 156.50]),
    "HCCO":    ({"H": 1, "C": 2, "O": 1}, 177.60, 254.00, [53.00, 59.00, 69.00, 74.50, 77.50, 79.50]),
    "CH2CO":   ({"C": 2, "H": 2, "O": 1}, -47.70, 241.90, [51.80, 62.10, 79.20, 88.60, 93.60, 96.60]),
    "HCCOH":   ({"C": 2, "H": 2, "O": 1},  88.00, 246.00, [52.00, 61.00, 76.00, 84.00, 88.50, 91.50]),
    "N":       ({"N": 1},          472.68,  153.30, [20.79, 20.79, 20.79, 20.79, 20.83, 20.96]),
    "NH":      ({"N": 1, "H": 1},  357.00,  181.22, [29.16, 29.20, 30.58, 32.80, 34.60, 35.90]),
    "NH2":     ({"N": 1, "H": 2},  186.20,  194.71, [33.57, 35.52, 41.50, 46.50, 50.00, 52.20]),
    "NH3":     ({"N": 1, "H": 3},  -45.90,  192.77, [35.65, 42.05, 56.49, 66.60, 72.80, 76.80]),
    "NNH":     ({"N": 2, "H": 1},  245.20,  224.90, [34.70, 38.50, 45.50, 49.80, 52.50, 54.00]),
    "NO":      ({"N": 1, "O": 1},   91.27,  210.76, [29.84, 30.49, 33.88, 35.80, 36.90, 37.60]),
    "NO2":     ({"N": 1, "O": 2},   34.19,  240.04, [37.18, 43.31, 51.90, 55.60, 57.30, 58.30]),
    "N2O":     ({"N": 2, "O": 1},   81.60,  219.96, [38.62, 45.83, 54.90, 58.70, 60.40, 61.50]),
    "HNO":     ({"H": 1, "N": 1, "O": 1}, 102.00, 220.73, [34.20, 37.50, 45.50, 50.60, 53.60, 55.40]),
    "CN":      ({"C": 1, "N": 1},  438.68,  202.64, [29.16, 29.30, 31.90, 34.20, 35.70, 36.60]),
    "HCN":     ({"H": 1, "C": 1, "N": 1}, 135.10, 201.83, [35.86, 41.78, 52.00, 57.80, 61.10, 63.20]),
    "H2CN":    ({"H": 2, "C": 1, "N": 1}, 239.00, 224.60, [39.00, 46.00, 60.00, 69.00, 74.00, 77.00]),
    "HCNN":    ({"H": 1, "C": 1, "N": 2}, 464.00, 256.00, [50.00, 58.00, 70.00, 76.50, 80.00, 82.50]),
    "HCNO":    ({"H": 1, "C": 1, "N": 1, "O": 1}, 171.50, 238.00, [44.00, 53.00, 65.00, 71.00, 74.50, 77.00]),
    "HOCN":    ({"H": 1, "O": 1, "C": 1, "N": 1}, -12.00, 238.00, [45.00, 53.00, 64.00, 70.00, 73.50, 75.50]),
    "HNCO":    ({"H": 1, "N": 1, "C": 1, "O": 1}, -118.10, 238.22, [44.90, 53.40, 64.60, 70.60, 74.00, 76.20]),
    "NCO":     ({"N": 1, "C": 1, "O": 1}, 131.80, 232.20, [40.50, 47.50, 56.50, 60.80, 63.20, 64.70]),
    "N2":      ({"N": 2},            0.0,   191.61, [29.12, 29.58, 32.70, 34.85, 35.97, 36.65]),
    "AR":      ({"AR": 1},           0.0,   154.85, [20.786, 20.786, 20.786, 20.786, 20.786, 20.786]),
    "C3H7":    ({"C": 3, "H": 7},  100.00,  287.00, [71.60, 103.00, 152.00, 178.00, 192.00, 200.00]),
    "C3H8":    ({"C": 3, "H": 8}, -104.70,  270.31, [73.60, 112.60, 174.50, 205.00, 221.00, 230.00]),
    "CH2CHO":  ({"C": 2, "H": 3, "O": 1},  10.50, 259.00, [54.00, 70.00, 98.00, 113.00, 121.00, 126.00]),
    "CH3CHO":  ({"C": 2, "H": 4, "O": 1}, -166.20, 263.84, [55.30, 76.50, 112.70, 132.00, 142.00, 148.00]),
}

T_SAMPLES = np.array([300.0, 500.0, 1000.0, 1500.0, 2000.0, 2500.0])
T_LOW, T_MID, T_HIGH = 300.0, 1000.0, 3500.0


def fit_range(interp, t0, t1, pin=None):
    """Least-squares fit of cp/R = a1 + a2 T + ... + a5 T^4 over [t0, t1].

    pin = (T_pin, value) forces the polynomial through that point."""
    scale = 1000.0
    tg = np.linspace(t0, t1, 80)
    y = interp(tg)
    A = np.vander(tg / scale, 5, increasing=True)
    unscale = scale ** -np.arange(5)
    if pin is None:
        a, *_ = np.linalg.lstsq(A, y, rcond=None)
        return a * unscale
    tp, vp = pin
    c = np.vander([tp / scale], 5, increasing=True)[0]
    # KKT system for equality-constrained least squares
    H = A.T @ A
    g = A.T @ y
    K = np.zeros((6, 6))
    K[:5, :5] = H
    K[:5, 5] = c
    K[5, :5] = c
    rhs = np.concatenate([g, [vp]])
    sol = np.linalg.solve(K, rhs)
    return sol[:5] * unscale


def h_over_r(a, a6, T):
    return sum(a[i] * T ** (i + 1) / (i + 1) for i in range(5)) + a6


def s_over_r(a, a7, T):
    return a[0] * np.log(T) + sum(a[i] * T ** i / i for i in range(1, 5)) + a7


def fit_species(dhf, s298, cps):
    cpr = np.array(cps) / R
    # extend the sample set so the high-range fit stays monotone to 3500 K
    t_ext = np.concatenate([T_SAMPLES, [3000.0, 3500.0]])
    d = cpr[-1] - cpr[-2]
    cpr_ext = np.concatenate([cpr, [cpr[-1] + 0.55 * d, cpr[-1] + 0.9 * d]])
    interp = PchipInterpolator(t_ext, cpr_ext)
    a_hi = fit_range(interp, T_MID, T_HIGH)
    cp_mid = float(np.polyval(a_hi[::-1], T_MID))
    a_lo = fit_range(interp, T_LOW, T_MID, pin=(T_MID, cp_mid))
    t_ref = 298.15
    a6_lo = dhf * 1000.0 / R - h_over_r(a_lo, 0.0, t_ref)
    a7_lo = s298 / R - s_over_r(a_lo, 0.0, t_ref)
    # enforce h, s continuity at T_mid
    a6_hi = h_over_r(a_lo, a6_lo, T_MID) - h_over_r(a_hi, 0.0, T_MID)
    a7_hi = s_over_r(a_lo, a7_lo, T_MID) - s_over_r(a_hi, 0.0, T_MID)
    return list(a_hi) + [a6_hi, a7_hi], list(a_lo) + [a6_lo, a7_lo]


def fmt(x):
    s = "%15.8E" % x
    return s


def cards(name, comp, hi, lo):
    comp_str = ""
    for el, n in list(comp.items())[:4]:
        comp_str += "%-2s%3d" % (el, n)
    comp_str = comp_str.ljust(20)
    l1 = "%-18s%-6s%s%s%10.3f%10.3f%8.2f%6s1" % (
        name, "corpus", comp_str, "G", T_LOW, T_HIGH, T_MID, "")
    co = hi + lo
    l2 = "".join(fmt(c) for c in co[0:5]) + "    2"
    l3 = "".join(fmt(c) for c in co[5:10]) + "    3"
    l4 = "".join(fmt(c) for c in co[10:14]) + " " * 15 + "    4"
    return "\n".join([l1, l2, l3, l4])


def main(out="data/gri30_thermo.dat"):
    lines = ["THERMO ALL", "%10.3f%10.3f%10.3f" % (T_LOW, T_MID, T_HIGH)]
    for name, (comp, dhf, s298, cps) in SPECIES.items():
        hi, lo = fit_species(dhf, s298, cps)
        lines.append(cards(name, comp, hi, lo))
    lines.append("END")
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {out}: {len(SPECIES)} species")


if __name__ == "__main__":
    import sys
    main(*sys.argv[1:])
