"""Generate the reference values frozen into the test suite.

Every closed-form number asserted by the tests is derived here first, using
implementations that are independent of the package: mpmath at 50 digits for
the special-function values, numpy's PCG64 generator for the Monte Carlo
cross-checks, and plain stdlib math for the erf-based identities.

Run from the repository root:

    python scripts/derive_expected_values.py
"""

import math

import mpmath
import numpy as np

mpmath.mp.dps = 50


def varrho_ref(n: int, x) -> mpmath.mpf:
    # Gamma((n+1)/2) / (sqrt(2) Gamma((n+2)/2)) * x * M(1/2, (n+2)/2, -x^2/2)
    x = mpmath.mpf(x)
    pre = mpmath.gamma((n + 1) / mpmath.mpf(2)) / (
        mpmath.sqrt(2) * mpmath.gamma((n + 2) / mpmath.mpf(2))
    )
    return pre * x * mpmath.hyp1f1(mpmath.mpf(1) / 2, (n + 2) / mpmath.mpf(2), -(x**2) / 2)


def f_ref(n: int, x) -> mpmath.mpf:
    x = mpmath.mpf(x)
    m = mpmath.hyp1f1(1, n / mpmath.mpf(2) + 1, -(x**2) / 2)
    return 1 - mpmath.mpf(n - 1) / n * m - varrho_ref(n, x) ** 2


def g_ref(n: int, x) -> mpmath.mpf:
    x = mpmath.mpf(x)
    return mpmath.hyp1f1(1, n / mpmath.mpf(2) + 1, -(x**2) / 2) / n


def area_ref(n: int) -> mpmath.mpf:
    return 2 * mpmath.pi ** ((n - 2) / mpmath.mpf(2)) / mpmath.gamma((n - 2) / mpmath.mpf(2))


def mc_projected_variances(n: int, x: float, count: int, seed: int):
    """Variance of u_1 and u_2 for u = xi/||xi||, xi ~ N((x,0,..,0), I_n)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    s1 = s2 = q1 = q2 = 0.0
    m1 = 0.0
    done = 0
    while done < count:
        m = min(1_000_000, count - done)
        g = rng.standard_normal((m, n))
        g[:, 0] += x
        u = g / np.linalg.norm(g, axis=1, keepdims=True)
        s1 += float(np.sum(u[:, 0]))
        q1 += float(np.sum(u[:, 0] ** 2))
        s2 += float(np.sum(u[:, 1]))
        q2 += float(np.sum(u[:, 1] ** 2))
        m1 += float(np.sum(u[:, 0] ** 4))
        done += m
    e1, e2 = s1 / count, s2 / count
    v1 = q1 / count - e1**2
    v2 = q2 / count - e2**2
    # standard error of the var(u_1) estimate, for the 4-SE bracket
    se1 = math.sqrt(max(m1 / count - (q1 / count) ** 2, 0.0) / count)
    return e1, v1, v2, se1


def mc_mrl_mu10(params, count: int, seed: int):
    """MC mean resultant length of centered-unitized draws, numpy generator."""
    mu = np.array(params["mu10"])
    sigma = np.array(params["sigma10"])
    rng = np.random.Generator(np.random.PCG64(seed))
    chol = np.linalg.cholesky(sigma)
    acc = np.zeros(len(mu))
    done = 0
    while done < count:
        m = min(500_000, count - done)
        z = rng.standard_normal((m, len(mu))) @ chol.T + mu
        zc = z - z.mean(axis=1, keepdims=True)
        acc += (zc / np.linalg.norm(zc, axis=1, keepdims=True)).sum(axis=0)
        done += m
    return float(np.linalg.norm(acc / count))


MU10 = [4.60e-4, 7.83e-4, 14.78e-4, -16.32e-4, 4.50e-4, 10.26e-4, -3.22e-4, 0.39e-4, -3.99e-4, -4.41e-4]
SIGMA10_UPPER = [
    [3.67, 2.26, 0.98, 0.75, 1.54, 0.72, 0.16, 1.48, -0.05, -0.08],
    [2.26, 6.60, 0.96, 1.31, 1.57, 1.01, 0.11, 1.16, -0.32, -0.04],
    [0.98, 0.96, 5.72, 1.29, 0.97, 1.60, -0.20, 0.41, -0.38, 0.19],
    [0.75, 1.31, 1.29, 4.74, 1.69, 0.96, 0.06, 0.35, 0.41, 0.19],
    [1.54, 1.57, 0.97, 1.69, 5.11, 0.97, -0.04, 0.72, -0.11, -0.06],
    [0.72, 1.01, 1.60, 0.96, 0.97, 11.86, 0.20, 0.01, 0.81, 0.59],
    [0.16, 0.11, -0.20, 0.06, -0.04, 0.20, 1.47, 0.07, 0.50, 0.23],
    [1.48, 1.16, 0.41, 0.35, 0.72, 0.01, 0.07, 1.32, -0.12, -0.01],
    [-0.05, -0.32, -0.38, 0.41, -0.11, 0.81, 0.50, -0.12, 6.10, 0.64],
    [-0.08, -0.04, 0.19, 0.19, -0.06, 0.59, 0.23, -0.01, 0.64, 3.77],
]


def main() -> None:
    params = {
        "mu10": MU10,
        "sigma10": (np.array(SIGMA10_UPPER) * 1e-4).tolist(),
    }

    print("== erf identities (stdlib math) ==")
    print(f"varrho_1(1.0) = erf(1/sqrt(2))      = {math.erf(1 / math.sqrt(2)):.16f}")
    print(f"2*(Phi(1/sqrt(2))-0.5) = erf(0.5)   = {math.erf(0.5):.16f}")

    print("\n== mpmath 50-dp special-function references ==")
    for n, x in [(9, 0.1288), (1, 1.0), (2, 0.5), (4, 2.0), (9, 0.12775)]:
        print(f"varrho_{n}({x}) = {mpmath.nstr(varrho_ref(n, x), 17)}")
    for n, x in [(3, 1.0), (5, 0.5), (9, 0.1288), (3, 2.0)]:
        print(f"f_{n}({x}) = {mpmath.nstr(f_ref(n, x), 17)}   g_{n}({x}) = {mpmath.nstr(g_ref(n, x), 17)}")
    print(f"M(1/2, 11/2, -0.1288^2/2) = {mpmath.nstr(mpmath.hyp1f1(0.5, 5.5, -0.1288**2 / 2), 17)}")
    print(f"M(1, 2, 1) = e - 1 = {mpmath.nstr(mpmath.hyp1f1(1, 2, 1), 17)}")

    print("\n== support surface areas ==")
    for n in [4, 10, 50, 100, 300]:
        print(f"area({n}) = {mpmath.nstr(area_ref(n), 12)}")

    print("\n== ten-asset benchmark chain ==")
    mu = np.array(params["mu10"])
    sig = np.array(params["sigma10"])
    pmu = mu - mu.mean()
    norm_pmu = float(np.linalg.norm(pmu))
    sd = np.sqrt(np.diag(sig))
    sigma_hat = float(np.sqrt(np.mean(np.diag(sig))))
    corr = sig / np.outer(sd, sd)
    iu = np.triu_indices(len(mu), k=1)
    rho_hat = float(np.mean(corr[iu]))
    print(f"||P mu10||  = {norm_pmu:.10e}  (rounds to {round(norm_pmu, 4)})")
    print(f"sigma_hat   = {sigma_hat:.10e}  (rounds to {round(sigma_hat, 4)})")
    print(f"rho_hat     = {rho_hat:.10e}  (rounds to {round(rho_hat, 4)})")
    x_exact = norm_pmu / (sigma_hat * math.sqrt(1 - rho_hat))
    x_round = round(norm_pmu, 4) / (round(sigma_hat, 4) * math.sqrt(1 - round(rho_hat, 4)))
    print(f"x exact     = {x_exact:.10f} -> varrho_9 = {mpmath.nstr(varrho_ref(9, x_exact), 10)}")
    print(f"x rounded   = {x_round:.10f} -> varrho_9(0.1288) = {mpmath.nstr(varrho_ref(9, 0.1288), 10)}")

    print("\n== Monte Carlo cross-checks (numpy PCG64, independent of the package) ==")
    for n, x, cnt in [(3, 1.0, 10_000_000), (3, 2.0, 10_000_000), (9, 0.1288, 10_000_000)]:
        e1, v1, v2, se1 = mc_projected_variances(n, x, cnt, seed=777)
        print(
            f"(n={n}, x={x}, N={cnt}): mean u1 = {e1:.6f} (closed {mpmath.nstr(varrho_ref(n, x), 7)}), "
            f"var u1 = {v1:.6f} (closed {mpmath.nstr(f_ref(n, x), 7)}, se {se1:.2e}), "
            f"var u2 = {v2:.6f} (closed {mpmath.nstr(g_ref(n, x), 7)})"
        )
    mrl = mc_mrl_mu10(params, 1_000_000, seed=99)
    print(f"MC MRL, ten-asset benchmark, N=1e6: {mrl:.6f} (bracket [0.039, 0.044])")


if __name__ == "__main__":
    main()
