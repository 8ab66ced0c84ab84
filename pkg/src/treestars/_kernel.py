"""Compiled single-contagion pipeline used by the Monte Carlo engine.

Random streams: xoshiro256** with the 256-bit state of replication ``i``
taken from outputs 4i..4i+3 of a SplitMix64 sequence whose starting point
is SplitMix64(seed). Every replication therefore has its own stream and the
result of a block never depends on how blocks are scheduled.
"""
import math

import numpy as np
from numba import njit, uint64

GAMMA = uint64(0x9E3779B97F4A7C15)
MIX1 = uint64(0xBF58476D1CE4E5B9)
MIX2 = uint64(0x94D049BB133111EB)
INV_2_53 = 1.0 / 9007199254740992.0

POINT = 0
LOGNORMAL = 1

PER_SCENARIO = 0
AGGREGATE_DIRECT = 1


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> uint64(30))) * MIX1
    z = (z ^ (z >> uint64(27))) * MIX2
    return z ^ (z >> uint64(31))


@njit(inline="always")
def _rotl(x, k):
    return (x << uint64(k)) | (x >> uint64(64 - k))


@njit(cache=True)
def stream_base(seed):
    return _mix64(uint64(seed) + GAMMA)


@njit(cache=True)
def seed_state(state, base, index):
    x = base + uint64(index) * uint64(4) * GAMMA
    for j in range(4):
        x += GAMMA
        state[j] = _mix64(x)


@njit(inline="always")
def next_u64(s):
    result = _rotl(s[1] * uint64(5), 7) * uint64(9)
    t = s[1] << uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(inline="always")
def next_double(s):
    """Uniform on [0, 1) with 53 random bits."""
    return float(next_u64(s) >> uint64(11)) * INV_2_53


@njit(inline="always")
def next_below(s, n):
    return min(int(next_double(s) * n), n - 1)


@njit(cache=True)
def next_normal(s):
    u1 = 1.0 - next_double(s)
    u2 = next_double(s)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@njit(cache=True)
def sample_pmf(cdf, s):
    u = next_double(s)
    k = 0
    last = len(cdf) - 1
    while k < last and u >= cdf[k]:
        k += 1
    return k


@njit(cache=True)
def sample_cost(kind, a, b, s):
    if kind == POINT:
        return a
    return math.exp(a + b * next_normal(s))


@njit(cache=True)
def sample_poisson(lam, s):
    if lam <= 0.0:
        return 0
    chunks = int(math.ceil(lam / 30.0))
    part = lam / chunks
    total = 0
    for _ in range(chunks):
        u = next_double(s)
        prob = math.exp(-part)
        cum = prob
        k = 0
        while u > cum and k < 10000:
            k += 1
            prob *= part / k
            cum += prob
        total += k
    return total


@njit(cache=True)
def generate(off_cdf, user_cdf, radius, parent, depth, users, s):
    """Breadth-first tree, then user counts in index order; returns the contract count."""
    parent[0] = -1
    depth[0] = 0
    n = 1
    i = 0
    while i < n:
        if depth[i] < radius:
            k = sample_pmf(off_cdf, s)
            for _ in range(k):
                parent[n] = i
                depth[n] = depth[i] + 1
                n += 1
        i += 1
    for j in range(n):
        users[j] = sample_pmf(user_cdf, s)
    return n


@njit(cache=True)
def star_loss(n_users, q, cc, cu, s):
    """A compromised contract's cost plus fresh costs of its users behind open edges."""
    loss = sample_cost(int(cc[0]), cc[1], cc[2], s)
    for _ in range(n_users):
        if next_double(s) < q:
            loss += sample_cost(int(cu[0]), cu[1], cu[2], s)
    return loss


@njit(cache=True)
def spread_from_root(n, parent, users, comp, p, q, cc, cu, s):
    """Loss of all non-root contracts (and their users) reached from a compromised root."""
    loss = 0.0
    comp[0] = True
    for j in range(1, n):
        if comp[parent[j]] and next_double(s) < p:
            comp[j] = True
            loss += star_loss(users[j], q, cc, cu, s)
        else:
            comp[j] = False
    return loss


@njit(cache=True)
def path_open(c, parent, p, s):
    while c != 0:
        if next_double(s) >= p:
            return False
        c = parent[c]
    return True


@njit(cache=True)
def contagion(scenario, off_cdf, user_cdf, radius, p, q, cc, cu, parent, depth, users, comp, s):
    """One contagion of the given scenario on a fresh graph; returns (loss, degenerate)."""
    n = generate(off_cdf, user_cdf, radius, parent, depth, users, s)
    if scenario == 1:
        return star_loss(users[0], q, cc, cu, s) + spread_from_root(n, parent, users, comp, p, q, cc, cu, s), False
    if scenario == 2:
        if users[0] == 0:
            return 0.0, True
        # users of a star are exchangeable, so the originator's slot need not be drawn
        if next_double(s) >= q:
            return 0.0, False
        loss = star_loss(users[0] - 1, q, cc, cu, s)
        return loss + spread_from_root(n, parent, users, comp, p, q, cc, cu, s), False
    if scenario == 3:
        if n == 1:
            return 0.0, True
        origin = 1 + next_below(s, n - 1)
        if path_open(origin, parent, p, s):
            return star_loss(users[0], q, cc, cu, s), False
        return 0.0, False
    # scenario 4
    outside = 0
    for j in range(1, n):
        outside += users[j]
    if outside == 0:
        return 0.0, True
    k = next_below(s, outside)
    c = 1
    while k >= users[c]:
        k -= users[c]
        c += 1
    if next_double(s) < q and path_open(c, parent, p, s):
        return star_loss(users[0], q, cc, cu, s), False
    return 0.0, False


@njit(cache=True, nogil=True)
def run_block(
    mode, scenario, scenario_cdf, lam_t, off_cdf, user_cdf, radius, p, q, cc, cu, capacity, seed, start, count
):
    """Welford accumulation over replications [start, start + count).

    Returns (count, mean, m2, degenerate events, events).
    """
    parent = np.empty(capacity, np.int64)
    depth = np.empty(capacity, np.int64)
    users = np.empty(capacity, np.int64)
    comp = np.zeros(capacity, np.bool_)
    state = np.empty(4, np.uint64)
    base = stream_base(seed)
    mean = 0.0
    m2 = 0.0
    degenerate = 0
    events = 0
    for r in range(count):
        seed_state(state, base, start + r)
        if mode == PER_SCENARIO:
            value, deg = contagion(scenario, off_cdf, user_cdf, radius, p, q, cc, cu, parent, depth, users, comp, state)
            events += 1
            if deg:
                degenerate += 1
        else:
            value = 0.0
            n_events = sample_poisson(lam_t, state)
            for _ in range(n_events):
                sc = 1 + sample_pmf(scenario_cdf, state)
                loss, deg = contagion(sc, off_cdf, user_cdf, radius, p, q, cc, cu, parent, depth, users, comp, state)
                value += loss
                if deg:
                    degenerate += 1
            events += n_events
        delta = value - mean
        mean += delta / (r + 1)
        m2 += delta * (value - mean)
    return count, mean, m2, degenerate, events
