"""Generate the 61-point Gauss-Kronrod nodes and weights embedded in spinpulse._gk61.

The Kronrod extension of the 30-point Gauss-Legendre rule adds the 31 roots of
the Stieltjes polynomial E_31, defined by the orthogonality conditions

    integral_{-1}^{1} E_31(x) P_30(x) x^j dx = 0   for j = 0..30.

E_31 is odd, so only odd j give nontrivial conditions (15 equations). We expand
E_31 = P_31 + sum_i a_i P_{31-2i} in the Legendre basis and solve for the a_i
with exact rational arithmetic, then polish roots and solve for weights in
mpmath at 60 digits. The emitted module carries 30 significant digits.

Checks performed before emitting:
  * the 30 embedded Gauss nodes agree with scipy.special.roots_legendre
  * both weight sets are positive and sum to 2
  * the 61-point rule integrates Legendre polynomials P_2k exactly for
    2k <= 90 (its algebraic degree is 91)

Run from the repository root:

    python3 scripts/gen_gauss_kronrod.py
"""

from __future__ import annotations

import pathlib
from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy.special import roots_legendre

N_GAUSS = 30
DPS = 60
DIGITS_OUT = 30
OUT_PATH = pathlib.Path(__file__).resolve().parents[1] / "src" / "spinpulse" / "_gk61.py"


# ---------------------------------------------------------------------------
# Exact Legendre-basis arithmetic


def mul_by_x(coeffs: list[Fraction]) -> list[Fraction]:
    """Multiply a polynomial given by Legendre coefficients by x, exactly.

    Uses x P_k = ((k+1) P_{k+1} + k P_{k-1}) / (2k+1).
    """
    out = [Fraction(0)] * (len(coeffs) + 1)
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        out[k + 1] += c * Fraction(k + 1, 2 * k + 1)
        if k > 0:
            out[k - 1] += c * Fraction(k, 2 * k + 1)
    return out


def legendre_inner(a: list[Fraction], b: list[Fraction]) -> Fraction:
    """<a, b> with weight 1 on [-1, 1]; <P_k, P_k> = 2/(2k+1)."""
    total = Fraction(0)
    for k in range(min(len(a), len(b))):
        if a[k] and b[k]:
            total += a[k] * b[k] * Fraction(2, 2 * k + 1)
    return total


def solve_rational(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination with partial pivoting over Fraction."""
    n = len(rhs)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if aug[pivot][col] == 0:
            raise ZeroDivisionError("singular system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [v - factor * p for v, p in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def stieltjes_coefficients(n: int) -> list[Fraction]:
    """Legendre coefficients of E_{n+1} for even n, normalized to P_{n+1} + ...

    Returns a dense list c with E_{n+1} = sum_k c[k] P_k; only odd k are nonzero.
    """
    assert n % 2 == 0
    m = (n + 1) // 2 + 1  # number of odd-degree basis elements 1, 3, ..., n+1
    # x^j P_n in the Legendre basis for j = 0..n
    xp = [Fraction(0)] * n + [Fraction(1)]  # P_n
    powers = [xp]
    for _ in range(n - 1):
        powers.append(mul_by_x(powers[-1]))

    degrees = [n + 1 - 2 * i for i in range(m)]  # n+1, n-1, ..., 1
    unknown_degs = degrees[1:]
    rows = []
    rhs = []
    for j in range(1, n, 2):
        pj = powers[j]
        basis_lead = [Fraction(0)] * (n + 1) + [Fraction(1)]
        rhs.append(-legendre_inner(basis_lead, pj))
        row = []
        for d in unknown_degs:
            e = [Fraction(0)] * d + [Fraction(1)]
            row.append(legendre_inner(e, pj))
        rows.append(row)
    sol = solve_rational(rows, rhs)

    coeffs = [Fraction(0)] * (n + 2)
    coeffs[n + 1] = Fraction(1)
    for d, a in zip(unknown_degs, sol):
        coeffs[d] = a
    return coeffs


# ---------------------------------------------------------------------------
# High-precision evaluation and root finding


def legendre_value(k: int, x: mp.mpf) -> mp.mpf:
    p0, p1 = mp.mpf(1), x
    if k == 0:
        return p0
    for j in range(1, k):
        p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
    return p1


def legendre_series(coeffs, x: mp.mpf) -> mp.mpf:
    """Clenshaw evaluation of sum_k coeffs[k] P_k(x)."""
    b1 = mp.mpf(0)
    b2 = mp.mpf(0)
    for k in range(len(coeffs) - 1, 0, -1):
        b1, b2 = coeffs[k] + mp.mpf(2 * k + 1) / (k + 1) * x * b1 - mp.mpf(k + 1) / (k + 2) * b2, b1
    return coeffs[0] + x * b1 - mp.mpf(1) / 2 * b2


def bisect_root(f, lo: mp.mpf, hi: mp.mpf) -> mp.mpf:
    flo = f(lo)
    fhi = f(hi)
    assert flo * fhi < 0, "root not bracketed"
    for _ in range(mp.mp.dps * 4):
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid
        if flo * fm < 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return (lo + hi) / 2


def gauss_nodes(n: int) -> list[mp.mpf]:
    """Roots of P_n, polished by Newton from double-precision seeds."""
    seeds, _ = roots_legendre(n)
    nodes = []
    for s in seeds:
        x = mp.mpf(float(s))
        for _ in range(8):
            p = legendre_value(n, x)
            # P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
            dp = n * (x * p - legendre_value(n - 1, x)) / (x * x - 1)
            x = x - p / dp
        nodes.append(x)
    return nodes


def main() -> None:
    mp.mp.dps = DPS

    e_coeffs_frac = stieltjes_coefficients(N_GAUSS)
    e_coeffs = [mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in e_coeffs_frac]

    gnodes = gauss_nodes(N_GAUSS)
    brackets = [mp.mpf(-1)] + gnodes + [mp.mpf(1)]
    f = lambda x: legendre_series(e_coeffs, x)
    knodes = [bisect_root(f, brackets[i], brackets[i + 1]) for i in range(len(brackets) - 1)]

    allnodes = sorted(gnodes + knodes)
    assert len(allnodes) == 2 * N_GAUSS + 1

    # Kronrod weights from Legendre exactness on the symmetric half.
    nonneg = [x for x in allnodes if x >= 0]
    m = len(nonneg)  # 31, including x = 0
    a = mp.matrix(m, m)
    b = mp.matrix(m, 1)
    for k in range(m):
        for p, x in enumerate(nonneg):
            val = legendre_value(2 * k, x)
            a[k, p] = val if x == 0 else 2 * val
        b[k] = 2 if k == 0 else 0
    w_half = mp.lu_solve(a, b)
    weight_of = {}
    for p, x in enumerate(nonneg):
        weight_of[x] = w_half[p]
        weight_of[-x] = w_half[p]
    kweights = [weight_of[x] for x in allnodes]

    # Gauss weights: w = 2 / ((1 - x^2) P'_n(x)^2)
    gweights = []
    for x in gnodes:
        p = legendre_value(N_GAUSS, x)
        dp = N_GAUSS * (x * p - legendre_value(N_GAUSS - 1, x)) / (x * x - 1)
        gweights.append(2 / ((1 - x * x) * dp * dp))

    # -- checks ------------------------------------------------------------
    ref, _ = roots_legendre(N_GAUSS)
    assert max(abs(float(x) - r) for x, r in zip(gnodes, ref)) < 1e-14
    assert all(w > 0 for w in kweights) and all(w > 0 for w in gweights)
    assert abs(sum(kweights) - 2) < mp.mpf(10) ** (-DPS + 8)
    assert abs(sum(gweights) - 2) < mp.mpf(10) ** (-DPS + 8)
    for k in range(1, 46):  # exactness through degree 91 (even part: P_2k, k <= 45)
        resid = sum(w * legendre_value(2 * k, x) for w, x in zip(kweights, allnodes))
        assert abs(resid) < mp.mpf(10) ** (-DPS + 12), (k, resid)

    gauss_positions = [i for i, x in enumerate(allnodes) if any(abs(x - g) < mp.mpf(10) ** (-DPS + 6) for g in gnodes)]
    assert gauss_positions == list(range(1, 61, 2))

    def fmt(vals):
        return ",\n    ".join(mp.nstr(v, DIGITS_OUT, strip_zeros=False) for v in vals)

    body = f'''"""61-point Gauss-Kronrod pair on [-1, 1].

Generated by scripts/gen_gauss_kronrod.py (exact-rational Stieltjes construction,
60-digit arithmetic, 30 digits emitted); do not edit by hand. The embedded
30-point Gauss rule lives on the odd-index nodes.
"""

import numpy as np

GK_NODES = np.array([
    {fmt(allnodes)},
])

GK_WEIGHTS = np.array([
    {fmt(kweights)},
])

# Weights of the embedded 30-point Gauss rule, aligned with GK_NODES[1::2].
GAUSS_WEIGHTS = np.array([
    {fmt(gweights)},
])

GAUSS_SLICE = slice(1, 61, 2)
'''
    OUT_PATH.write_text(body)
    print(f"wrote {OUT_PATH}")
    print("max |gauss node - scipy|:", max(abs(float(x) - r) for x, r in zip(gnodes, ref)))
    print("kronrod weight sum - 2:", float(sum(kweights) - 2))


if __name__ == "__main__":
    main()
