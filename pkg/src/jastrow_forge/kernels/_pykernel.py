"""Pure-Python hot loops. Mirrors ``_ckernel.pyx`` statement for statement."""
import math

LN2 = math.log(2.0)
NEG_INF = float("-inf")

# confinement codes
FREE, HARMONIC, LATTICE, POLY, CALLABLE = range(5)


def logf(fam, p1, p2, x):
    if fam == 0:
        if p1 == 0.0:
            return 0.0
        if x == 0.0:
            return NEG_INF
        return p1 * math.log(abs(x))
    if fam == 1:
        return p1 * abs(x)
    if fam == 2:
        return p1 * x * x
    if fam == 3:
        if p1 == 0.0:
            return 0.0
        if x == 0.0:
            return NEG_INF
        a = abs(x / p2)
        return p1 * (a - LN2 + math.log(-math.expm1(-2.0 * a)))
    return p1 * abs(x) ** p2


def dlogf(fam, p1, p2, x):
    if fam == 0:
        return p1 / x
    if fam == 1:
        return p1 * math.copysign(1.0, x) if x != 0.0 else 0.0
    if fam == 2:
        return 2.0 * p1 * x
    if fam == 3:
        return p1 / (p2 * math.tanh(x / p2))
    s = 1.0 if x > 0 else (-1.0 if x < 0 else 0.0)
    return p1 * p2 * abs(x) ** (p2 - 1.0) * s


def d2logf(fam, p1, p2, x):
    if fam == 0:
        return -p1 / (x * x)
    if fam == 1:
        return 0.0
    if fam == 2:
        return 2.0 * p1
    if fam == 3:
        a = abs(x / p2)
        c = 2.0 * math.exp(-a) / -math.expm1(-2.0 * a)
        return -p1 / (p2 * p2) * c * c
    return p1 * p2 * (p2 - 1.0) * abs(x) ** (p2 - 2.0)


def _poly(coeffs, x, deriv):
    # Horner on the deriv-th derivative
    acc = 0.0
    n = len(coeffs)
    for k in range(n - 1, deriv - 1, -1):
        f = 1.0
        for t in range(deriv):
            f *= k - t
        acc = acc * x + f * coeffs[k]
    return acc


def env(km, i, x):
    c = km.conf
    if c == HARMONIC:
        return -0.5 * km.alpha * x * x
    if c == LATTICE:
        d = x - km.sites[i]
        return -0.5 * km.alpha * d * d
    if c == POLY:
        return _poly(km.poly, x, 0)
    if c == CALLABLE:
        return float(km.envelope.v(x))
    return 0.0


def denv(km, i, x):
    c = km.conf
    if c == HARMONIC:
        return -km.alpha * x
    if c == LATTICE:
        return -km.alpha * (x - km.sites[i])
    if c == POLY:
        return _poly(km.poly, x, 1)
    if c == CALLABLE:
        return float(km.envelope.dv(x))
    return 0.0


def d2env(km, i, x):
    c = km.conf
    if c == HARMONIC or c == LATTICE:
        return -km.alpha
    if c == POLY:
        return _poly(km.poly, x, 2)
    if c == CALLABLE:
        return float(km.envelope.d2v(x))
    return 0.0


def log_psi(x, km):
    n = len(x)
    fam, p1, p2 = km.fam, km.p1, km.p2
    total = 0.0
    for i in range(n):
        total += env(km, i, x[i])
    for i in range(n):
        for j in range(i + 1, n):
            lf = logf(fam, p1, p2, x[i] - x[j])
            if lf == NEG_INF:
                return NEG_INF
            total += lf
    return total


def local_energy(x, km):
    """Verbatim-convention ``H Psi / Psi`` at one configuration."""
    n = len(x)
    fam, p1, p2 = km.fam, km.p1, km.p2
    k = km.hbar2_m
    d = [[0.0] * n for _ in range(n)]
    grad2 = 0.0
    lap = 0.0
    v2 = 0.0
    v2l = 0.0
    cross = 0.0
    one = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            xij = x[i] - x[j]
            dij = dlogf(fam, p1, p2, xij)
            d2 = d2logf(fam, p1, p2, xij)
            d[i][j] = dij
            d[j][i] = -dij
            lap += 2.0 * d2
            v2 += d2 + dij * dij
            if km.conf == HARMONIC:
                v2l += xij * dij
            elif km.conf == LATTICE:
                v2l += (xij - (km.sites[i] - km.sites[j])) * dij
            elif km.conf == POLY or km.conf == CALLABLE:
                cross += (denv(km, i, x[i]) - denv(km, j, x[j])) * dij
    for i in range(n):
        g = denv(km, i, x[i])
        for j in range(n):
            if j != i:
                g += d[i][j]
        grad2 += g * g
        lap += d2env(km, i, x[i])
        if km.conf == HARMONIC:
            one += 0.5 * km.mw2 * x[i] * x[i]
        elif km.conf == LATTICE:
            dx = x[i] - km.sites[i]
            one += 0.5 * km.mw2 * dx * dx
        elif km.conf == POLY or km.conf == CALLABLE:
            dv = denv(km, i, x[i])
            one += 0.5 * k * (d2env(km, i, x[i]) + dv * dv)
    v3 = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for l in range(j + 1, n):
                v3 += d[i][j] * d[i][l] - d[i][j] * d[j][l] + d[i][l] * d[j][l]
    return (
        -0.5 * k * (grad2 + lap)
        + k * v2
        + km.s3 * k * v3
        - km.s2l * km.hw * v2l
        + one
        + k * cross
    )


def metropolis(x, km, disp, acc_u, step, thin, out_x, out_e):
    """Single-particle Metropolis moves, particle ``t mod N`` at step ``t``.

    ``x`` is updated in place. With ``thin > 0`` the configuration and its
    local energy are written to ``out_x``/``out_e`` after every ``thin``-th
    step. Returns the number of accepted moves.
    """
    xs = [float(v) for v in x]
    n = len(xs)
    fam, p1, p2 = km.fam, km.p1, km.p2
    accepted = 0
    rec = 0
    for t in range(len(disp)):
        p = t % n
        old = xs[p]
        new = old + step * disp[t]
        delta = env(km, p, new) - env(km, p, old)
        node = False
        for j in range(n):
            if j == p:
                continue
            lf = logf(fam, p1, p2, new - xs[j])
            if lf == NEG_INF:
                node = True
                break
            delta += lf - logf(fam, p1, p2, old - xs[j])
        if not node and acc_u[t] < math.exp(min(2.0 * delta, 0.0)):
            xs[p] = new
            accepted += 1
        if thin > 0 and (t + 1) % thin == 0:
            out_x[rec] = xs
            out_e[rec] = local_energy(xs, km)
            rec += 1
    x[:] = xs
    return accepted
