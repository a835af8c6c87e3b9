#!/usr/bin/env python3
"""Independent reference implementation of the kinetics and the autoignition
reactor, used only to generate frozen oracle fixtures for the C++ test suite.

Deliberately shares no code with the C++ engine: its own CHEMKIN parser, its
own NASA-7 / Arrhenius / falloff evaluation (NumPy), and SciPy's BDF stiff
integrator. Fixture CSVs produced here are committed under tests/data/.
"""

import sys
import numpy as np

RU = 8314.462618      # J/kmol/K
P_ATM = 101325.0
CAL = 4.184

ATOMIC_W = {"H": 1.008, "O": 15.999, "C": 12.011, "N": 14.007, "AR": 39.95}


# ---------------------------------------------------------------- parsing

def _strip_comment(line):
    i = line.find("!")
    return line[:i] if i >= 0 else line


def parse_thermo(path):
    lines = [l.rstrip("\n") for l in open(path)]
    species = {}
    i = 0
    while i < len(lines):
        l = lines[i]
        if len(l) >= 80 and l[79] == "1":
            name = l[:18].split()[0]
            comp = {}
            for k in range(4):
                f = l[24 + 5 * k:24 + 5 * k + 5]
                el, n = f[:2].strip(), f[2:].strip()
                if el and n and int(float(n)) > 0:
                    comp[el.upper()] = int(float(n))
            tlo, thi, tmid = float(l[45:55]), float(l[55:65]), float(l[65:73])
            co = []
            for k in range(1, 4):
                row = lines[i + k]
                nc = 5 if k < 3 else 4
                co += [float(row[15 * j:15 * (j + 1)]) for j in range(nc)]
            hi, lo = co[:7], co[7:14]
            w = sum(ATOMIC_W[e] * n for e, n in comp.items())
            species[name] = dict(comp=comp, W=w, lo=lo, hi=hi,
                                 tlo=tlo, tmid=tmid, thi=thi)
            i += 4
        else:
            i += 1
    return species


def parse_mech(mech_path, thermo_path):
    thermo = parse_thermo(thermo_path)
    text = [_strip_comment(l) for l in open(mech_path)]
    elements, names, rxn_lines = [], [], []
    block = None
    for l in text:
        u = l.strip()
        if not u:
            continue
        key = u.split()[0].upper()
        if key in ("ELEMENTS", "ELEM"):
            block = "E"
            u = u[len(u.split()[0]):]
        elif key in ("SPECIES", "SPEC"):
            block = "S"
            u = u[len(u.split()[0]):]
        elif key in ("REACTIONS", "REAC"):
            block = "R"
            continue
        elif key == "END":
            block = None
            continue
        if block == "E":
            elements += u.split()
        elif block == "S":
            names += u.split()
        elif block == "R":
            rxn_lines.append(u)
    idx = {n: i for i, n in enumerate(names)}
    ns = len(names)

    rxns = []
    for l in rxn_lines:
        if "/" in l and "=" not in l or l.upper().startswith(("LOW", "TROE", "DUP")):
            # auxiliary line
            r = rxns[-1]
            u = l.upper()
            if u.startswith("DUP"):
                r["dup"] = True
            elif u.startswith("LOW"):
                v = [float(x) for x in l.split("/")[1].split()]
                r["low"] = v
            elif u.startswith("TROE"):
                v = [float(x) for x in l.split("/")[1].split()]
                r["troe"] = v
            else:
                parts = l.replace("/", " ").split()
                for sp, e in zip(parts[0::2], parts[1::2]):
                    r["eff"][idx[sp]] = float(e)
            continue
        toks = l.split()
        A, b, Ea = float(toks[-3]), float(toks[-2]), float(toks[-1])
        eq = "".join(toks[:-3])
        rev = "=>" not in eq or "<=>" in eq
        lhs, rhs = eq.replace("<=>", "@").replace("=>", "@").replace("=", "@").split("@")

        def side(s):
            out, tb, fo, bath = {}, False, False, None
            up = s.upper()
            if "(+M)" in up:
                fo = True
                k = up.find("(+M)")
                s = s[:k] + s[k + 4:]
            else:
                import re
                m = re.search(r"\(\+([A-Za-z0-9()]+?)\)$", s)
                if m and m.group(1).upper() != "M":
                    fo = True
                    bath = m.group(1)
                    s = s[:m.start()]
            for t in s.split("+"):
                if t.upper() == "M":
                    tb = True
                    continue
                j = 0
                while j < len(t) and t[j].isdigit():
                    j += 1
                n = int(t[:j]) if j else 1
                nm = t[j:]
                out[idx[nm]] = out.get(idx[nm], 0) + n
            return out, tb, fo, bath

        # species names may themselves contain '+'-free parens e.g. CH2(S)
        rs, tb1, fo1, bath1 = side(lhs)
        ps, tb2, fo2, bath2 = side(rhs)
        r = dict(r=rs, p=ps, A=A, b=b, Ea=Ea * CAL, rev=rev,
                 tb=tb1 or tb2, fo=fo1 or fo2, bath=bath1 or bath2,
                 eff=np.ones(ns), low=None, troe=None, dup=False)
        if r["bath"]:
            e = np.zeros(ns)
            e[idx[r["bath"]]] = 1.0
            r["eff"] = e
        rxns.append(r)
    return dict(names=names, elements=elements, thermo=thermo,
                idx=idx, rxns=rxns)


# ---------------------------------------------------------------- kinetics

class Gas:
    def __init__(self, mech):
        self.m = mech
        names = mech["names"]
        th = mech["thermo"]
        self.ns = len(names)
        self.nr = len(mech["rxns"])
        self.W = np.array([th[n]["W"] for n in names])
        self.lo = np.array([th[n]["lo"] for n in names])
        self.hi = np.array([th[n]["hi"] for n in names])
        self.tmid = np.array([th[n]["tmid"] for n in names])
        nup = np.zeros((self.ns, self.nr))
        nur = np.zeros((self.ns, self.nr))
        for j, r in enumerate(mech["rxns"]):
            for i, n in r["r"].items():
                nur[i, j] += n
            for i, n in r["p"].items():
                nup[i, j] += n
        self.nur, self.nup = nur, nup
        self.dnu = (nup - nur).sum(axis=0)
        rx = mech["rxns"]
        self.A = np.array([r["A"] for r in rx])
        self.b = np.array([r["b"] for r in rx])
        self.Ea = np.array([r["Ea"] for r in rx])
        self.rev = np.array([r["rev"] for r in rx])
        self.tb = np.array([r["tb"] for r in rx])
        self.fo = np.array([r["fo"] for r in rx])
        self.eff = np.array([r["eff"] for r in rx])
        order = nur.sum(axis=0)
        conv = 1e-3  # cm3/mol -> m3/kmol
        self.A_si = self.A * conv ** (order - 1 + self.tb.astype(float))
        self.A0_si = np.zeros(self.nr)
        self.b0 = np.zeros(self.nr)
        self.Ea0 = np.zeros(self.nr)
        for j, r in enumerate(rx):
            if r["low"]:
                a0, b0, e0 = r["low"]
                self.A0_si[j] = a0 * conv ** order[j]
                self.b0[j] = b0
                self.Ea0[j] = e0 * CAL
        self.troe = [r["troe"] for r in rx]

    def cp_h_s(self, T):
        a = np.where((T < self.tmid)[:, None], self.lo, self.hi)
        t = T
        cp = a[:, 0] + a[:, 1] * t + a[:, 2] * t**2 + a[:, 3] * t**3 + a[:, 4] * t**4
        h = a[:, 0] + a[:, 1] * t / 2 + a[:, 2] * t**2 / 3 + a[:, 3] * t**3 / 4 \
            + a[:, 4] * t**4 / 5 + a[:, 5] / t
        s = a[:, 0] * np.log(t) + a[:, 1] * t + a[:, 2] * t**2 / 2 \
            + a[:, 3] * t**3 / 3 + a[:, 4] * t**4 / 4 + a[:, 6]
        return cp, h, s  # cp/R, h/RT, s/R

    def rates(self, T, P, Y):
        Yc = np.clip(Y, 0.0, None)
        wbar = 1.0 / np.sum(Yc / self.W)
        rho = P * wbar / (RU * T)
        C = rho * Yc / self.W
        kf = self.A_si * T ** self.b * np.exp(-self.Ea * 1e3 / (RU * T))
        M = self.eff @ C
        # falloff blending
        if self.fo.any():
            j = self.fo
            k0 = self.A0_si[j] * T ** self.b0[j] * np.exp(-self.Ea0[j] * 1e3 / (RU * T))
            pr = k0 * M[j] / np.maximum(kf[j], 1e-300)
            F = np.ones(pr.shape)
            for k, jj in enumerate(np.where(j)[0]):
                tr = self.troe[jj]
                if tr:
                    a = tr[0]
                    fc = (1 - a) * np.exp(-T / tr[1]) + a * np.exp(-T / tr[2])
                    if len(tr) > 3:
                        fc += np.exp(-tr[3] / T)
                    lfc = np.log10(max(fc, 1e-300))
                    c = -0.4 - 0.67 * lfc
                    n = 0.75 - 1.27 * lfc
                    lpr = np.log10(max(pr[k], 1e-300))
                    f1 = (lpr + c) / (n - 0.14 * (lpr + c))
                    F[k] = 10 ** (lfc / (1 + f1**2))
            kf[j] = kf[j] * pr / (1 + pr) * F
        cp, h, s = self.cp_h_s(T)
        g = h - s
        dg = (self.nup - self.nur).T @ g
        Kc = np.exp(-dg) * (P_ATM / (RU * T)) ** self.dnu
        kr = np.where(self.rev, kf / Kc, 0.0)
        lC = np.log(np.maximum(C, 1e-300))
        fwd = kf * np.exp(self.nur.T @ lC)
        fwd = np.where((self.nur.T @ (C <= 0)) > 0, 0.0, fwd)
        bwd = kr * np.exp(self.nup.T @ lC)
        bwd = np.where((self.nup.T @ (C <= 0)) > 0, 0.0, bwd)
        q = fwd - bwd
        q = np.where(self.tb & ~self.fo, q * M, q)
        wdot = (self.nup - self.nur) @ q
        hrr = -np.sum(h * RU * T * wdot)
        return wdot, q, hrr, rho, cp, h

    def rhs(self, T, P, Y):
        T = float(np.clip(T, 250.0, 6000.0)) if np.isfinite(T) else 6000.0
        Y = np.nan_to_num(np.clip(Y, -1.0, 2.0))
        wdot, q, hrr, rho, cp, h = self.rates(T, P, Y)
        wbar = 1.0 / np.sum(np.clip(Y, 0, None) / self.W)
        cpm = np.sum(cp * RU * np.clip(Y, 0, None) / self.W)
        dY = wdot * self.W / rho
        dT = hrr / (rho * cpm)
        return dT, dY


def autoignite(gas, T0, P0, X0, t_end, rtol=1e-9, atol=1e-15):
    from scipy.integrate import solve_ivp
    X = np.zeros(gas.ns)
    for n, v in X0.items():
        X[gas.m["idx"][n]] = v
    X /= X.sum()
    Y0 = X * gas.W / np.sum(X * gas.W)

    def f(t, y):
        dT, dY = gas.rhs(y[0], P0, y[1:])
        return np.concatenate([[dT], dY])

    sol = solve_ivp(f, (0, t_end), np.concatenate([[T0], Y0]),
                    method="BDF", rtol=rtol, atol=atol, dense_output=False)
    t, y = sol.t, sol.y
    dTdt = np.gradient(y[0], t)
    k = int(np.argmax(dTdt))
    if dTdt[k] < 1.0:
        return None, t, y
    # quadratic refinement around the discrete max
    if 0 < k < len(t) - 1:
        t3, v3 = t[k - 1:k + 2], dTdt[k - 1:k + 2]
        d = np.polyfit(t3, v3, 2)
        tau = -d[1] / (2 * d[0]) if d[0] < 0 else t[k]
    else:
        tau = t[k]
    return tau, t, y


def ch4_air(gas, phi=1.0, fuel="CH4"):
    comp = gas.m["thermo"][fuel]["comp"]
    o2_st = comp.get("C", 0) + comp.get("H", 0) / 4.0 - comp.get("O", 0) / 2.0
    o2 = o2_st / phi
    return {fuel: 1.0, "O2": o2, "N2": o2 * 3.76}


if __name__ == "__main__":
    mech = parse_mech(sys.argv[1] if len(sys.argv) > 1 else "data/gri30.inp",
                      sys.argv[2] if len(sys.argv) > 2 else "data/gri30_thermo.dat")
    gas = Gas(mech)
    print(f"parsed: {gas.ns} species, {gas.nr} reactions")
    X0 = ch4_air(gas)
    for T0 in (1500.0, 1000.0, 2000.0):
        tau, t, y = autoignite(gas, T0, P_ATM, X0, 10.0)
        print(f"T0={T0:.0f} K  tau_ig={tau}  T_end={y[0][-1]:.1f}")
