"""Independent reference values for the frozen regression constants.

Solves the robustness programs with cvxpy (interior-point backend), which
shares no code with the Rust solver. Run once; the printed values are frozen
into the Rust tests.

    python3 crates/core/tests/oracles/robustness_oracle.py
"""
import itertools

import cvxpy as cp
import numpy as np

I2 = np.eye(2)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def unit(d, i, j):
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1
    return e


def choi(apply, din):
    blocks = [np.kron(unit(din, i, j), apply(unit(din, i, j)))
              for i in range(din) for j in range(din)]
    return sum(blocks)


def r_measurements(a1, a2):
    d = a1[0].shape[0]
    g = {(x, y): cp.Variable((d, d), hermitian=True)
         for x in range(len(a1)) for y in range(len(a2))}
    n1 = [cp.Variable((d, d), hermitian=True) for _ in a1]
    n2 = [cp.Variable((d, d), hermitian=True) for _ in a2]
    r = cp.Variable(nonneg=True)
    cons = [v >> 0 for v in list(g.values()) + n1 + n2]
    for x in range(len(a1)):
        cons.append(a1[x] + n1[x] == sum(g[x, y] for y in range(len(a2))))
    for y in range(len(a2)):
        cons.append(a2[y] + n2[y] == sum(g[x, y] for x in range(len(a1))))
    cons.append(sum(n1) == r * np.eye(d))
    cons.append(sum(n2) == r * np.eye(d))
    p = cp.Problem(cp.Minimize(r), cons)
    p.solve(solver="CLARABEL", tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return r.value


def r_instruments(i1, i2, din, k1, k2):
    """Chois with input factor first; joint output ordered (K1, K2)."""
    dims = [din, k1, k2]
    n = din * k1 * k2
    psi = {(x, y): cp.Variable((n, n), hermitian=True)
           for x in range(len(i1)) for y in range(len(i2))}
    n1 = [cp.Variable((din * k1, din * k1), hermitian=True) for _ in i1]
    n2 = [cp.Variable((din * k2, din * k2), hermitian=True) for _ in i2]
    r = cp.Variable(nonneg=True)
    cons = [v >> 0 for v in list(psi.values()) + n1 + n2]
    for x in range(len(i1)):
        s = sum(cp.partial_trace(psi[x, y], dims, axis=2) for y in range(len(i2)))
        cons.append(i1[x] + n1[x] == s)
    for y in range(len(i2)):
        s = sum(cp.partial_trace(psi[x, y], dims, axis=1) for x in range(len(i1)))
        cons.append(i2[y] + n2[y] == s)
    cons.append(cp.partial_trace(sum(n1), [din, k1], axis=1) == r * np.eye(din))
    cons.append(cp.partial_trace(sum(n2), [din, k2], axis=1) == r * np.eye(din))
    p = cp.Problem(cp.Minimize(r), cons)
    p.solve(solver="CLARABEL", tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return r.value


def postproc_gap(child, parent, din, kp, kc):
    """min t s.t. -tI <= J(child_y) - sum_x J(R^x_y o parent_x) <= tI."""
    nx, ny = len(parent), len(child)
    # Choi of R^x_y on (kp, kc); composition via link product.
    rr = {(x, y): cp.Variable((kp * kc, kp * kc), hermitian=True)
          for x in range(nx) for y in range(ny)}
    t = cp.Variable(nonneg=True)
    cons = [v >> 0 for v in rr.values()]
    for x in range(nx):
        cons.append(cp.partial_trace(sum(rr[x, y] for y in range(ny)), [kp, kc], axis=1)
                    == np.eye(kp))
    for y in range(ny):
        comp = 0
        for x in range(nx):
            comp = comp + link(parent[x], rr[x, y], din, kp, kc)
        delta = child[y] - comp
        m = din * kc
        cons.append(t * np.eye(m) - delta >> 0)
        cons.append(t * np.eye(m) + delta >> 0)
    p = cp.Problem(cp.Minimize(t), cons)
    p.solve(solver="CLARABEL", tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return t.value


def link(j1, j2, din, kmid, kout):
    """Choi of (second o first) from J1 on (din,kmid) and J2 on (kmid,kout)."""
    # J = sum_{ab} E_ab (x) second(first(E_ab)); first(E_ab) = blocks of J1.
    total = 0
    for a in range(din):
        for b in range(din):
            fab = j1[a * kmid:(a + 1) * kmid, b * kmid:(b + 1) * kmid]
            out = 0
            for i in range(kmid):
                for j in range(kmid):
                    if abs(fab[i, j]) == 0:
                        continue
                    blk = j2[i * kout:(i + 1) * kout, j * kout:(j + 1) * kout]
                    out = out + fab[i, j] * blk
            if isinstance(out, int):
                continue
            total = total + cp.kron(unit(din, a, b), out)
    return total


def main():
    mub_x = [(I2 + SX) / 2, (I2 - SX) / 2]
    mub_z = [(I2 + SZ) / 2, (I2 - SZ) / 2]
    print("R_M(MUB x,z)          =", r_measurements(mub_x, mub_z))
    print("3 - 2 sqrt2           =", 3 - 2 * np.sqrt(2))

    ident = choi(lambda m: m, 2)
    print("R_I(id,id) qubit      =", r_instruments([ident], [ident], 2, 2, 2))

    half = [0.5 * ident, 0.5 * ident]
    print("R_I(Lueders trivial)  =", r_instruments(half, half, 2, 2, 2))

    # identity instrument vs trash-and-prepare onto |0><0| (single outcome)
    ket0 = unit(2, 0, 0)
    trash = choi(lambda m: np.trace(m) * ket0, 2)
    print("gap(id <~ trash)      =", postproc_gap([ident], [trash], 2, 2, 2))


if __name__ == "__main__":
    main()
