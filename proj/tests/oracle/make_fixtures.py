#!/usr/bin/env python3
"""Generate the frozen oracle fixtures consumed by the C++ test suite.

Run from the repository root:  python3 tests/oracle/make_fixtures.py
Outputs are committed under tests/data/ and never regenerated by the build.
"""

import numpy as np
from kinetics_oracle import (parse_mech, Gas, autoignite, ch4_air, P_ATM, RU)


def main():
    mech = parse_mech("data/gri30.inp", "data/gri30_thermo.dat")
    gas = Gas(mech)
    X0 = ch4_air(gas)

    # --- ignition delay fixture (1500 K, 1 atm, phi=1)
    tau, t, y = autoignite(gas, 1500.0, P_ATM, X0, 0.01, rtol=1e-8, atol=1e-14)
    with open("tests/data/oracle_idt_gri.csv", "w") as f:
        f.write("T0,P0,phi,fuel,tau_ig,method\n")
        f.write(f"1500.0,{P_ATM},1.0,CH4,{tau:.10e},scipy-BDF-maxdTdt\n")
    print("tau_ig(1500K) =", tau)

    # --- production rates at a mid-ignition state (T nearest 1800 K)
    k = int(np.argmin(np.abs(y[0] - 1800.0)))
    T, Y = y[0][k], y[1:, k]
    wdot, q, hrr, rho, cp, h = gas.rates(T, P_ATM, Y)
    with open("tests/data/oracle_wdot_gri.csv", "w") as f:
        f.write(f"# state: T={T:.10e} K, P={P_ATM} Pa, hrr={hrr:.10e} W/m3\n")
        f.write("species,Y,wdot\n")
        for i, n in enumerate(mech["names"]):
            f.write(f"{n},{Y[i]:.16e},{wdot[i]:.10e}\n")
    print(f"wdot state: T={T:.1f} K, hrr={hrr:.4e}")

    # --- O2 NASA-7 evaluation at 1000 K (scalar reference path)
    i = mech["names"].index("O2")
    a = gas.hi[i]  # T = 1000 at tmid boundary; use high set like the engine
    T = 1000.0
    cpr = a[0] + a[1]*T + a[2]*T**2 + a[3]*T**3 + a[4]*T**4
    hrt = a[0] + a[1]*T/2 + a[2]*T**2/3 + a[3]*T**3/4 + a[4]*T**4/5 + a[5]/T
    sr = a[0]*np.log(T) + a[1]*T + a[2]*T**2/2 + a[3]*T**3/3 + a[4]*T**4/4 + a[6]
    with open("tests/data/oracle_thermo_o2.csv", "w") as f:
        f.write("T,cp_R,h_RT,s_R\n")
        f.write(f"{T},{cpr:.12e},{hrt:.12e},{sr:.12e}\n")
    print(f"O2 @1000K: cp/R={cpr:.6f} h/RT={hrt:.6f} s/R={sr:.6f}")


if __name__ == "__main__":
    import sys, os
    sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
    main()
