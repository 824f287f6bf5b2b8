#!/usr/bin/env python3
# Copyright 2026 The ribridge Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent reference values for the test suite.

Everything here is computed in plain (not log-domain) arithmetic with mpmath
at 40 digits, sharing no code with the C++ library. The output is frozen into
tests/fixtures/derived.json and read by the C++ tests.

    python3 tools/derive_oracle.py > tests/fixtures/derived.json
"""

import json
import random

import mpmath as mp

mp.mp.dps = 40


def rand_problem(rng, m, n, lam, spread=1.0):
    u = [[round(rng.uniform(-spread, spread), 6) for _ in range(n)] for _ in range(m)]
    w = [rng.random() + 0.1 for _ in range(n)]
    s = sum(w)
    mu = [x / s for x in w]
    return {"utility": u, "lambda": lam, "prior": mu}


def rand_simplex(rng, m):
    w = [rng.expovariate(1.0) for _ in range(m)]
    s = sum(w)
    return [x / s for x in w]


def kernel(p):
    lam = mp.mpf(p["lambda"])
    return [[mp.e ** (mp.mpf(x) / lam) for x in row] for row in p["utility"]]


def partition(p, nu):
    k = kernel(p)
    n = len(p["prior"])
    return [mp.fsum(mp.mpf(nu[i]) * k[i][j] for i in range(len(nu))) for j in range(n)]


def jensen_f(p, nu):
    z = partition(p, nu)
    return mp.fsum(mp.mpf(p["prior"][j]) * mp.log(z[j]) for j in range(len(z)))


def action_potential(p, nu):
    k = kernel(p)
    z = partition(p, nu)
    mu = p["prior"]
    return [mp.log(mp.fsum(mp.mpf(mu[j]) * k[i][j] / z[j] for j in range(len(mu))))
            for i in range(len(k))]


def ba_step(p, nu):
    a = action_potential(p, nu)
    w = [mp.mpf(nu[i]) * mp.e ** a[i] for i in range(len(nu))]
    s = mp.fsum(w)
    return [x / s for x in w]


def ba_solve(p, iters):
    m = len(p["utility"])
    nu = [mp.mpf(1) / m] * m
    for _ in range(iters):
        nu = ba_step(p, nu)
    return nu


def mutual_information(joint):
    rows = [mp.fsum(r) for r in joint]
    cols = [mp.fsum(joint[i][j] for i in range(len(joint))) for j in range(len(joint[0]))]
    total = mp.mpf(0)
    for i, r in enumerate(joint):
        for j, x in enumerate(r):
            if x > 0:
                total += x * mp.log(x / (rows[i] * cols[j]))
    return total


def sinkhorn(p, nu, iters=4000):
    """Plain-domain matrix scaling of nu (x) mu (x) e^{u/lam}; returns the coupling."""
    k = kernel(p)
    mu = [mp.mpf(x) for x in p["prior"]]
    nu = [mp.mpf(x) for x in nu]
    m, n = len(nu), len(mu)
    base = [[nu[i] * mu[j] * k[i][j] for j in range(n)] for i in range(m)]
    r = [mp.mpf(1)] * m
    c = [mp.mpf(1)] * n
    for _ in range(iters):
        for i in range(m):
            r[i] = nu[i] / mp.fsum(base[i][j] * c[j] for j in range(n))
        for j in range(n):
            c[j] = mu[j] / mp.fsum(base[i][j] * r[i] for i in range(m))
    return [[base[i][j] * r[i] * c[j] for j in range(n)] for i in range(m)]


def bridge_value(p, joint, nu):
    lam = mp.mpf(p["lambda"])
    mu = p["prior"]
    v = mp.mpf(0)
    for i, row in enumerate(joint):
        for j, x in enumerate(row):
            if x > 0:
                v += x * (mp.mpf(p["utility"][i][j]) / lam - mp.log(x / (mp.mpf(nu[i]) * mu[j])))
    return v


def ff(x):
    return float(x)


def vec(xs):
    return [float(x) for x in xs]


def main():
    rng = random.Random(424242)
    out = {}

    joint = [[rng.random() for _ in range(3)] for _ in range(3)]
    s = sum(map(sum, joint))
    joint = [[x / s for x in row] for row in joint]
    out["mi_3x3"] = {"joint": joint, "mutual_information": ff(mutual_information(
        [[mp.mpf(x) for x in row] for row in joint]))}

    p = rand_problem(rng, 3, 4, 0.7)
    nu = [1 / 3] * 3
    cpl = sinkhorn(p, nu)
    out["bridge_3x4_uniform"] = {"problem": p, "nu": nu, "value": ff(bridge_value(p, cpl, nu)),
                                 "coupling": [vec(r) for r in cpl]}

    p = rand_problem(rng, 5, 5, 1.3)
    nu = rand_simplex(rng, 5)
    cpl = sinkhorn(p, nu)
    out["bridge_5x5"] = {"problem": p, "nu": nu, "value": ff(bridge_value(p, cpl, nu)),
                         "coupling": [vec(r) for r in cpl]}

    p = rand_problem(rng, 4, 6, 0.4)
    nu = rand_simplex(rng, 4)
    out["log_partition_4x6"] = {"problem": p, "nu": nu,
                                "log_z": vec(mp.log(z) for z in partition(p, nu)),
                                "f": ff(jensen_f(p, nu)),
                                "a": vec(action_potential(p, nu))}

    p = rand_problem(rng, 4, 3, 0.8)
    nu = [mp.mpf(1) / 4] * 4
    traj = [jensen_f(p, nu)]
    for _ in range(50):
        nu = ba_step(p, nu)
        traj.append(jensen_f(p, nu))
    out["ba_trajectory_4x3"] = {"problem": p, "f": vec(traj), "nu_50": vec(nu)}

    solved = []
    for lam in (0.3, 1.0, 2.5):
        p = rand_problem(rng, 3, 3, lam)
        nu = ba_solve(p, 3000)
        a = action_potential(p, nu)
        solved.append({"problem": p, "nu_star": vec(nu), "f_star": ff(jensen_f(p, nu)),
                       "plateau_residual": ff(max(abs(a[i]) for i in range(3) if nu[i] > 1e-9))})
    out["solved_3x3"] = solved

    # Action 3 is strictly dominated by action 1 in every state by a wide margin.
    p = {"utility": [[1.0, 0.0, 0.5], [0.0, 1.0, 0.4], [-3.0, -3.0, -3.0]],
         "lambda": 0.5, "prior": [0.3, 0.5, 0.2]}
    nu = ba_solve(p, 3000)
    out["dominated_3x3"] = {"problem": p, "nu_star": vec(nu), "f_star": ff(jensen_f(p, nu))}

    e = mp.e
    out["symmetric_2x2"] = {
        "f_star": ff(mp.log((e + 1) / 2)),
        "diagonal_conditional": ff(e / (1 + e)),
        "conditional_variance": ff(e / (1 + e) ** 2),
        "free_energy_gap_product": ff(mp.log((e + 1) / 2) - mp.mpf(1) / 2),
    }

    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
