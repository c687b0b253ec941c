# SPDX-License-Identifier: Apache-2.0
#
# Generates hybrid Gauss-trapezoidal endpoint rules (Alpert) for integrands
# f(x) = a(x) log x + b(x) on [0, inf), a and b smooth. The rule
#
#   h sum_k w_k f(x_k h) + h sum_{i >= A} f(i h)
#
# is made exact, in the generalized Euler-Maclaurin sense, for x^p and
# x^p log x, p = 0..J-1. That gives 2J equations for J nodes and J weights:
#
#   sum_k w_k x_k^p       = sum_{i<A} i^p - zeta(-p)
#   sum_k w_k x_k^p log x = sum_{i<A} i^p log i + zeta'(-p)
#
# solved by damped Newton in 60-digit arithmetic. Large rules come from
# continuation: a (J, A) rule plus the node x = A with weight 1 already
# satisfies the (J+1, A+1) equations for p < J, so Newton only has to absorb
# the new p = J pair. A rule is accepted only with all nodes in (0, A) and
# positive weights.
#
# Usage: python3 gen_alpert_log_rules.py [JMAX]
import random
import sys

import mpmath as mp

mp.mp.dps = 60


def targets(j, a):
    t = []
    for p in range(j):
        t.append(sum(mp.mpf(i) ** p for i in range(1, a)) - mp.zeta(-p))
        t.append(mp.zeta(-p, derivative=1) + sum(mp.mpf(i) ** p * mp.log(i) for i in range(2, a)))
    return t


def residual(j, xs, ws, tg):
    r = []
    for p in range(j):
        r.append(sum(w * x**p for x, w in zip(xs, ws)) - tg[2 * p])
        r.append(sum(w * x**p * mp.log(x) for x, w in zip(xs, ws)) - tg[2 * p + 1])
    return mp.matrix(r)


def jacobian(j, xs, ws):
    m = mp.matrix(2 * j, 2 * j)
    for p in range(j):
        for k, (x, w) in enumerate(zip(xs, ws)):
            lx = mp.log(x)
            m[2 * p, k] = w * p * x ** (p - 1) if p else 0
            m[2 * p + 1, k] = w * (p * x ** (p - 1) * lx + x ** (p - 1))
            m[2 * p, j + k] = x**p
            m[2 * p + 1, j + k] = x**p * lx
    return m


def newton(j, a, xs, ws, iters=200, tg=None):
    tg = tg if tg is not None else targets(j, a)
    for _ in range(iters):
        r = residual(j, xs, ws, tg)
        nr = mp.norm(r)
        if nr < mp.mpf(10) ** -40 * max(1, mp.norm(mp.matrix(tg))):
            return xs, ws, True
        try:
            d = mp.lu_solve(jacobian(j, xs, ws), -r)
        except ZeroDivisionError:
            return xs, ws, False
        # Full step unless it leaves the positive half-line.
        lam = mp.mpf(1)
        while lam > 1e-8:
            nx = [x + lam * d[k] for k, x in enumerate(xs)]
            nw = [w + lam * d[j + k] for k, w in enumerate(ws)]
            if all(x > 0 for x in nx):
                break
            lam /= 2
        else:
            return xs, ws, False
        xs, ws = nx, nw
    return xs, ws, False


def start(j, a, seed, grading):
    random.seed(seed)
    xs = sorted(
        mp.mpf(a) * ((k + 0.5 + 0.4 * (random.random() - 0.5)) / j) ** grading for k in range(j)
    )
    m = mp.matrix(2 * j, j)
    for p in range(j):
        for k, x in enumerate(xs):
            m[2 * p, k] = x**p
            m[2 * p + 1, k] = x**p * mp.log(x)
    ws = list(mp.qr_solve(m, mp.matrix(targets(j, a)))[0])
    return xs, ws


def find(j, a, seeds=60):
    for seed in range(seeds):
        for grading in (1.5, 2.0, 2.5):
            xs, ws, ok = newton(j, a, *start(j, a, seed, grading))
            if ok and admissible(xs, ws, a):
                return sorted(zip(xs, ws))
    return None


def admissible(xs, ws, a):
    return all(0 < x < a for x in xs) and all(w > 0 for w in ws)


def chain(j_max):
    """Rules (J, J - 1) for J = 4..j_max, each continued from the previous."""
    j, a = 4, 3
    rule = find(j, a)
    out = {j: rule}
    while j < j_max:
        xs = [x for x, _ in rule] + [mp.mpf(a)]
        ws = [w for _, w in rule] + [mp.mpf(1)]
        j, a = j + 1, a + 1
        # Homotopy on the targets of the new p = j - 1 pair.
        goal = targets(j, a)
        here = list(goal[:-2]) + list(residual(j, xs, ws, [0] * (2 * j))[2 * j - 2 :])
        steps = 128
        for s in range(1, steps + 1):
            lam = mp.mpf(s) / steps
            tg = [h + lam * (g - h) for h, g in zip(here, goal)]
            xs, ws, ok = newton(j, a, xs, ws, tg=tg)
            if not ok:
                raise RuntimeError("continuation failed at J=%d" % j)
        if not admissible(xs, ws, a):
            raise RuntimeError("inadmissible rule at J=%d" % j)
        rule = sorted(zip(xs, ws))
        out[j] = rule
    return out


if __name__ == "__main__":
    rules = chain(int(sys.argv[1]) if len(sys.argv) > 1 else 16)
    for j in sorted(rules):
        if j % 2:
            continue
        print("// J=%d A=%d" % (j, j - 1))
        for x, w in rules[j]:
            print("    {%s, %s}," % (mp.nstr(x, 20), mp.nstr(w, 20)))
