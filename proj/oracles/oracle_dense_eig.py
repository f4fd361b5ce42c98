#!/usr/bin/env python3
"""Unstable eigenvalue e0 of the linearized operator around Q, by dense eigensolves.

Independent of the C++ eigen solver: second-order finite differences for g = r f on
(0, R] with Dirichlet ends, Q from Newton on the same grid (seeded by the shooting
oracle), all eigenvalues of L- L+ from LAPACK, Richardson extrapolation in h^2.
Writes e0 into the golden constants file (other entries kept).
"""
import argparse
import json
import pathlib
import sys

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigvals, solve_banded

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
import oracle_shoot  # noqa: E402

R_MAX = 30.0


def ground_state(r, h, a):
    sol = solve_ivp(oracle_shoot.rhs, (oracle_shoot.R_EPS, 14.0), oracle_shoot.start(a),
                    method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    q = np.where(r < 14.0, sol.sol(np.minimum(r, 14.0))[0], 0.0)
    g = r * q
    n = r.size
    for _ in range(30):
        # F(g) = g'' - g + g^3/r^2
        lap = np.empty(n)
        lap[1:-1] = g[2:] - 2 * g[1:-1] + g[:-2]
        lap[0] = g[1] - 2 * g[0]
        lap[-1] = -2 * g[-1] + g[-2]
        f = lap / h**2 - g + g**3 / r**2
        ab = np.zeros((3, n))
        ab[0, 1:] = 1 / h**2
        ab[2, :-1] = 1 / h**2
        ab[1] = -2 / h**2 - 1 + 3 * g**2 / r**2
        dg = solve_banded((1, 1), ab, -f)
        g += dg
        if np.max(np.abs(dg)) < 1e-14:
            break
    return g / r


def e0_at(n, a):
    h = R_MAX / n
    r = h * np.arange(1, n)
    q = ground_state(r, h, a)
    m = r.size
    d2 = (np.diag(np.full(m, -2.0)) + np.diag(np.ones(m - 1), 1) + np.diag(np.ones(m - 1), -1)) / h**2
    lp = -d2 + np.diag(1 - 3 * q**2)
    lm = -d2 + np.diag(1 - q**2)
    ev = eigvals(lm @ lp)
    # L- Q = 0 leaves a near-zero eigenvalue; the unstable one is well below it
    neg = ev.real[(ev.real < -1e-6) & (np.abs(ev.imag) < 1e-8 * np.abs(ev.real).max())]
    if neg.size != 1:
        raise SystemExit(f"expected one negative eigenvalue of L-L+, found {neg.size}")
    return float(np.sqrt(-neg[0]))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "golden_constants.json"))
    ap.add_argument("--n", type=int, nargs=2, default=[1200, 2400])
    args = ap.parse_args()
    a, _ = oracle_shoot.shoot()
    n1, n2 = args.n
    e1, e2 = e0_at(n1, a), e0_at(n2, a)
    ratio = (n2 / n1) ** 2
    e0 = (ratio * e2 - e1) / (ratio - 1)
    out = pathlib.Path(args.out)
    data = json.loads(out.read_text()) if out.exists() else {}
    data["e0"] = {
        "value": e0,
        "provenance": (f"oracle-dense-eig (oracles/oracle_dense_eig.py): dense eig of L-L+, "
                       f"2nd-order FD on r in (0,{R_MAX:g}], n={n1}: {e1:.12g}, n={n2}: {e2:.12g}, "
                       "Richardson in h^2"),
    }
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(f"e0 = {e0:.12g}  (n={n1}: {e1:.12g}, n={n2}: {e2:.12g})")


if __name__ == "__main__":
    main()
