#!/usr/bin/env python3
"""Regenerates oracles.csv.

Every value here is produced by a second, independent implementation
(numpy / closed forms), never by the library under test. Tests read the
frozen CSV; rerun this script only to extend it, and eyeball any diff.
"""

import math

import numpy as np


def crr_american_put(spot, strike, rate, sigma, horizon, steps):
    dt = horizon / steps
    up = math.exp(sigma * math.sqrt(dt))
    dn = 1.0 / up
    p = (math.exp(rate * dt) - dn) / (up - dn)
    disc = math.exp(-rate * dt)
    j = np.arange(steps + 1)
    v = np.maximum(strike - spot * up ** (2 * j - steps), 0.0)
    for i in range(steps - 1, -1, -1):
        cont = disc * (p * v[1 : i + 2] + (1.0 - p) * v[: i + 1])
        ex = np.maximum(strike - spot * up ** (2 * np.arange(i + 1) - i), 0.0)
        v = np.maximum(cont, ex)
    return float(v[0])


def black_scholes_put(spot, strike, rate, sigma, horizon):
    d1 = (math.log(spot / strike) + (rate + 0.5 * sigma**2) * horizon) / (
        sigma * math.sqrt(horizon)
    )
    d2 = d1 - sigma * math.sqrt(horizon)
    cdf = lambda x: 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))
    return strike * math.exp(-rate * horizon) * cdf(-d2) - spot * cdf(-d1)


def walk_solve(horizon, steps, terminal, driver, floor=None):
    """Backward scheme on the +-sqrt(dt) recombining walk.

    terminal(w) and floor(i, w) take the node coordinates w at a step;
    driver(t, yhat, z) is the generator.
    """
    dt = horizon / steps
    sq = math.sqrt(dt)
    w = (2 * np.arange(steps + 1) - steps) * sq
    y = terminal(w)
    for i in range(steps - 1, -1, -1):
        yu, yd = y[1:], y[:-1]
        z = (yu - yd) / (2.0 * sq)
        yhat = 0.5 * (yu + yd)
        y = yhat + driver(i * dt, yhat, z) * dt
        if floor is not None:
            wi = (2 * np.arange(i + 1) - i) * sq
            y = np.maximum(y, floor(i * dt, wi))
    return float(y[0])


def walk_emu_absbt(mu, horizon, steps):
    return walk_solve(
        horizon,
        steps,
        terminal=np.abs,
        driver=lambda t, yh, z: mu * np.abs(z),
    )


def walk_abs_terminal(horizon, steps):
    # E|W_N| over the binomial terminal law, exact combinatorics
    dt = horizon / steps
    total = 0.0
    for j in range(steps + 1):
        total += math.comb(steps, j) * abs((2 * j - steps) * math.sqrt(dt))
    return total / 2.0**steps


def walk_american_put(spot, strike, rate, sigma, horizon, steps):
    def gbm(t, w):
        return spot * np.exp((rate - 0.5 * sigma**2) * t + sigma * w)

    payoff = lambda t, w: np.maximum(strike - gbm(t, w), 0.0)
    return walk_solve(
        horizon,
        steps,
        terminal=lambda w: payoff(horizon, w),
        driver=lambda t, yh, z: -rate * yh,
        floor=payoff,
    )


ROWS = [
    ("crr_american_put", "s100_k100_r0.05_v0.2_T1_n500",
     crr_american_put(100, 100, 0.05, 0.2, 1.0, 500)),
    ("crr_american_put", "s100_k100_r0.05_v0.2_T1_n8",
     crr_american_put(100, 100, 0.05, 0.2, 1.0, 8)),
    ("black_scholes_put", "s100_k100_r0.05_v0.2_T1",
     black_scholes_put(100, 100, 0.05, 0.2, 1.0)),
    ("walk_emu_absbt", "mu1_T1_n8", walk_emu_absbt(1.0, 1.0, 8)),
    ("walk_emu_absbt", "mu1_T1_n1000", walk_emu_absbt(1.0, 1.0, 1000)),
    ("walk_abs_terminal", "T1_n8", walk_abs_terminal(1.0, 8)),
    ("walk_american_put", "s100_k100_r0.05_v0.2_T1_n8",
     walk_american_put(100, 100, 0.05, 0.2, 1.0, 8)),
    ("walk_american_put", "s100_k100_r0.05_v0.2_T1_n500",
     walk_american_put(100, 100, 0.05, 0.2, 1.0, 500)),
]

if __name__ == "__main__":
    with open("oracles.csv", "w") as f:
        f.write("oracle,params,value\n")
        for oracle, params, value in ROWS:
            f.write(f"{oracle},{params},{value!r}\n")
    print("\n".join(f"{o}/{p} = {v!r}" for o, p, v in ROWS))
