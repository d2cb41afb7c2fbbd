"""Exact rational-arithmetic oracles for small integer problems.

Nothing here touches numpy linear algebra; results are exact Fractions and
serve as frozen references for the floating-point implementation.
"""

from fractions import Fraction as F


def mat(rows):
    return [[F(v) for v in r] for r in rows]


def vec(v):
    return [F(x) for x in v]


def transpose(a):
    return [list(c) for c in zip(*a)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def matvec(a, v):
    return [sum(x * y for x, y in zip(r, v)) for r in a]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def solve(a, b):
    """Gauss-Jordan elimination over the rationals."""
    n = len(a)
    m = [list(r) + [bb] for r, bb in zip(a, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [v / pv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def gram(x):
    return matmul(transpose(x), x)


def krylov_pls(x, y, l):
    """argmin over span{b, Ab, ..., A^(l-1) b} of |y - X beta|^2, A = X^T X, b = X^T y."""
    x, y = mat(x), vec(y)
    a = gram(x)
    b = matvec(transpose(x), y)
    basis = [b]
    for _ in range(l - 1):
        basis.append(matvec(a, basis[-1]))
    bm = transpose(basis)  # D x l
    g = matmul(transpose(bm), matmul(a, bm))
    rhs = matvec(transpose(bm), b)
    coef = solve(g, rhs)
    return matvec(bm, coef)


def ols(x, y):
    x, y = mat(x), vec(y)
    return solve(gram(x), matvec(transpose(x), y))


def sigma_norm_sq(v, sxx):
    v = vec(v)
    return dot(v, matvec(mat(sxx), v))


def ned(beta, beta_ols, sxx):
    diff = [p - q for p, q in zip(vec(beta), vec(beta_ols))]
    return sigma_norm_sq(diff, sxx) / sigma_norm_sq(beta_ols, sxx)


def hankel_c(lambdas, l):
    """C_L = D (1 - c^T H^{-1} c) from exact raw moments."""
    lam = vec(lambdas)
    d = len(lam)
    mom = [sum(v**k for v in lam) / d for k in range(0, 2 * l + 1)]
    h = [[mom[i + j + 2] for j in range(l)] for i in range(l)]
    c = [mom[i + 1] for i in range(l)]
    a = solve(h, c)
    return d * (1 - dot(c, a))


def r2(x, y, beta):
    x, y, beta = mat(x), vec(y), vec(beta)
    res = [yy - p for yy, p in zip(y, matvec(x, beta))]
    return 1 - dot(res, res) / dot(y, y)
