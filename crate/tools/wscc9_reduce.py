"""Kron-reduce the WSCC 3-machine 9-bus network to generator internal nodes.

Writes a model file in the simkit text format: prefault matrix, and one
during-fault matrix per bolted three-phase bus fault. Postfault equals
prefault (successful reclosure). Mechanical powers are set to the prefault
electrical powers at the load-flow internal angles, so the file describes
an exact equilibrium.
"""
import sys
import numpy as np

# (from, to, R, X, B_total)
BRANCHES = [
    (1, 4, 0.0, 0.0576, 0.0),
    (2, 7, 0.0, 0.0625, 0.0),
    (3, 9, 0.0, 0.0586, 0.0),
    (4, 5, 0.010, 0.085, 0.176),
    (4, 6, 0.017, 0.092, 0.158),
    (5, 7, 0.032, 0.161, 0.306),
    (6, 9, 0.039, 0.170, 0.358),
    (7, 8, 0.0085, 0.072, 0.149),
    (8, 9, 0.0119, 0.1008, 0.209),
]
LOADS = {5: (1.25, 0.50), 6: (0.90, 0.30), 8: (1.00, 0.35)}
# load-flow solution: |V|, angle in degrees
VOLT = {
    1: (1.040, 0.0), 2: (1.025, 9.280), 3: (1.025, 4.665),
    4: (1.0258, -2.2168), 5: (0.9956, -3.9888), 6: (1.0127, -3.6874),
    7: (1.0258, 3.7197), 8: (1.0159, 0.7275), 9: (1.0324, 1.9667),
}
GEN_PQ = {1: (0.716, 0.270), 2: (1.630, 0.067), 3: (0.850, -0.109)}
H = [23.64, 6.40, 3.01]
# Inertia scale applied to H so that first-swing instability appears inside
# the 5-10 cycle clearing band. Override with argv[1].
INERTIA_SCALE = 0.25
XD = [0.0608, 0.1198, 0.1813]


def network():
    y = np.zeros((9, 9), dtype=complex)
    for f, t, r, x, b in BRANCHES:
        ys = 1.0 / complex(r, x)
        i, j = f - 1, t - 1
        y[i, i] += ys + 1j * b / 2
        y[j, j] += ys + 1j * b / 2
        y[i, j] -= ys
        y[j, i] -= ys
    for bus, (p, q) in LOADS.items():
        v = VOLT[bus][0]
        y[bus - 1, bus - 1] += complex(p, -q) / v**2
    return y


def augmented(y):
    # nodes 0..2 are internal EMF nodes, 3..11 are buses 1..9
    a = np.zeros((12, 12), dtype=complex)
    a[3:, 3:] = y
    for g in range(3):
        yg = 1.0 / complex(0, XD[g])
        a[g, g] += yg
        a[3 + g, 3 + g] += yg
        a[g, 3 + g] -= yg
        a[3 + g, g] -= yg
    return a


def kron(a, keep, drop):
    return a[np.ix_(keep, keep)] - a[np.ix_(keep, drop)] @ np.linalg.solve(
        a[np.ix_(drop, drop)], a[np.ix_(drop, keep)]
    )


def reduce(a, faulted_bus=None):
    nodes = list(range(12))
    if faulted_bus is not None:
        nodes.remove(2 + faulted_bus)  # bolted fault: bus voltage forced to 0
    keep = [0, 1, 2]
    drop = [n for n in nodes if n not in keep]
    return kron(a, keep, drop)


def emfs():
    e = []
    for g in range(3):
        v = VOLT[g + 1][0] * np.exp(1j * np.deg2rad(VOLT[g + 1][1]))
        p, q = GEN_PQ[g + 1]
        i = np.conj(complex(p, q) / v)
        e.append(v + 1j * XD[g] * i)
    return np.array(e)


def pe(y, mag, ang):
    ev = mag * np.exp(1j * ang)
    return np.real(ev * np.conj(y @ ev))


def fmt_matrix(name, m):
    out = [f"{name} {m.shape[0]}"]
    for row in m:
        out.append("  " + "  ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    return out


def main():
    scale = float(sys.argv[1]) if len(sys.argv) > 1 else INERTIA_SCALE
    a = augmented(network())
    pre = reduce(a)
    pre = 0.5 * (pre + pre.T)
    e = emfs()
    mag, ang = np.abs(e), np.angle(e)
    pm = pe(pre, mag, ang)
    lines = [
        "# WSCC 3-machine 9-bus system, classical model, reduced to internal nodes",
        "# generated by tools/wscc9_reduce.py",
        f"system wscc9_h{scale:g}",
        "base_frequency 60",
        "generators 3",
        "# gen H D xd E Pm",
    ]
    for g in range(3):
        lines.append(f"gen {H[g] * scale!r} 0.0 {XD[g]!r} {float(mag[g])!r} {float(pm[g])!r}")
    lines += fmt_matrix("matrix prefault", pre)
    for bus in [4, 5, 6, 7, 8, 9]:
        f = reduce(a, bus)
        f = 0.5 * (f + f.T)
        lines += fmt_matrix(f"fault bus{bus}", f)
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    print("# angles(deg):", np.rad2deg(ang), file=sys.stderr)


if __name__ == "__main__":
    main()
