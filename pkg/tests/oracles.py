"""Independent reference computations in sympy, used to freeze expected values."""

import itertools

import sympy as sp


def rat(x):
    return sp.Rational(str(x))


def to_sympy(M):
    return sp.Matrix(M.rows, M.cols, lambda i, j: rat(M[i, j]))


def structure(F):
    """Structure constants and counit of an ungraded-or-graded algebra over Q."""
    A = F.alg
    n = A.dim
    c = [[[rat(A.c[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)]
    eps = [rat(x) for x in F.eps]
    return n, c, eps


def mul(c, n, a, b):
    out = [0] * n
    for i in range(n):
        if a[i] == 0:
            continue
        for j in range(n):
            if b[j] == 0:
                continue
            for k in range(n):
                out[k] += a[i] * b[j] * c[i][j][k]
    return out


def gram(F):
    n, c, eps = structure(F)
    return sp.Matrix(n, n, lambda i, j: sum(c[i][j][k] * eps[k] for k in range(n)))


def nakayama(F, koszul=True):
    """Solve eps(nu(e_i) e_j) = s(i,j) eps(e_j e_i) column by column."""
    n, c, eps = structure(F)
    g = gram(F)
    par = [F.alg.parity(i) for i in range(n)]
    cols = []
    for i in range(n):
        xs = sp.symbols(f"x0:{n}")
        eqs = []
        for j in range(n):
            s = (-1) ** (par[i] * par[j]) if koszul else 1
            eqs.append(sum(xs[k] * g[k, j] for k in range(n)) - s * g[j, i])
        sol = sp.solve(eqs, xs, dict=True)[0]
        cols.append([sol[x] for x in xs])
    return sp.Matrix(n, n, lambda r, q: cols[q][r])


def mu_delta(F):
    """mu(Delta(a)) = w a with w = sum ginv[i][l] e_i e_l (the window element)."""
    n, c, eps = structure(F)
    ginv = gram(F).inv()
    basis = [[1 if t == i else 0 for t in range(n)] for i in range(n)]
    w = [0] * n
    for i in range(n):
        for l in range(n):
            if ginv[i, l]:
                p = mul(c, n, basis[i], basis[l])
                w = [w[k] + ginv[i, l] * p[k] for k in range(n)]
    return sp.Matrix(n, n, lambda k, m: mul(c, n, w, basis[m])[k])


def state_sum(F, S, theta=None):
    """Sum over labellings of all glued side pairs, weights from scratch."""
    n, c, eps = structure(F)
    ginv = gram(F).inv()
    props = {1: ginv}
    if theta is not None:
        props[-1] = ginv * to_sympy(theta.mat).T
    basis = [[1 if t == i else 0 for t in range(n)] for i in range(n)]
    tri = {}
    for a, b, d in itertools.product(range(n), repeat=3):
        p = mul(c, n, mul(c, n, basis[a], basis[b]), basis[d])
        tri[a, b, d] = sum(p[k] * eps[k] for k in range(n))
    choices = []
    for _, _, sgn in S.gluings:
        P = props[sgn]
        choices.append([(i, j, P[i, j]) for i in range(n) for j in range(n) if P[i, j] != 0])
    total = sp.Integer(0)
    for pick in itertools.product(*choices):
        lab, w = {}, sp.Integer(1)
        for (x, y, _), (i, j, p) in zip(S.gluings, pick):
            lab[x], lab[y] = i, j
            w *= p
        for s0, s1, s2 in S.triangles:
            w *= tri[lab[s0], lab[s1], lab[s2]]
            if w == 0:
                break
        total += w
    return total
