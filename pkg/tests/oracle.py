"""Brute-force reference evaluator, written straight from the model equations.

Shares no code with the package: every trial is simulated from full tanks
with plain Python floats, one step at a time.
"""
import math

PENALTY = 10.0


def _step(c, h, g, p, dt):
    anf, ans, m_ae, m_ans, m_anf, phi, theta, gamma = c
    g_max = 1.0 - theta - gamma
    hp = h + p / anf * dt

    if hp <= 1.0 - phi:
        p_ae = m_ae * hp / (1.0 - phi)
    else:
        p_ae = m_ae

    if hp <= theta and g == 0.0:
        p_an = 0.0
    elif hp >= 1.0 - gamma and g == g_max:
        p_an = 0.0
    elif hp == g + theta:
        p_an = 0.0
    elif g + theta < hp < 1.0 - gamma:
        p_an = m_ans * (hp - (g + theta)) / g_max
    elif hp >= 1.0 - gamma and g < g_max:
        p_an = m_ans * (g_max - g) / g_max
    elif hp < g + theta and g > 0.0:
        p_an = m_anf * (hp - (g + theta)) / (1.0 - gamma)
    else:
        raise AssertionError(f"no flow regime for hp={hp} g={g}")

    # limits are applied to the transferred amount p_an * dt
    amount = p_an * dt
    amount = min(amount, (g_max - g) * ans)
    amount = max(amount, -g * ans)
    m_an = (hp - (g + theta)) / (1.0 / ans + 1.0 / anf)
    if amount < 0:
        amount = max(m_an, amount)
    elif amount > 0:
        amount = min(m_an, amount)

    h_new = hp - (p_ae * dt + amount) / anf
    g_new = g + amount / ans
    exhausted = h_new >= 1.0
    return min(max(h_new, 0.0), 1.0), min(max(g_new, 0.0), g_max), exhausted


def time_to_exhaustion(c, p, dt, t_cap, h=0.0, g=0.0):
    """Seconds until exhaustion and the final state; ``None`` if never exhausted."""
    if h >= 1.0:
        return 0.0, h, g
    limit = math.ceil(t_cap / dt - 1e-9)
    for i in range(1, limit + 1):
        h, g, exhausted = _step(c, h, g, p, dt)
        if exhausted:
            return i * dt, h, g
    return None, h, g


def rest(c, p, dt, seconds, h, g):
    for _ in range(math.ceil(seconds / dt - 1e-9)):
        h, g, _ = _step(c, h, g, p, dt)
    return h, g


def fitness(c, cp, w_prime, tte_targets, ratio_table, dt, t_cap=5000.0):
    """``(expenditure_error, recovery_error)``; ``ratio_table`` rows are (work, rec, seconds, fraction)."""
    anf, ans, m_ae, m_ans, m_anf, phi, theta, gamma = c
    if min(anf, ans, m_ae, m_ans, m_anf) <= 0 or not (0 <= phi < 1 and 0 <= theta < 1 and 0 <= gamma < 1):
        return PENALTY, PENALTY
    if theta + gamma >= 1:
        return PENALTY, PENALTY

    squares = []
    exp_err = None
    for t in tte_targets:
        tte, _, _ = time_to_exhaustion(c, cp + w_prime / t, dt, t_cap)
        if tte is None:
            exp_err = PENALTY
            break
        squares.append(((tte - t) / t) ** 2)
    if exp_err is None:
        exp_err = math.sqrt(sum(squares) / len(squares))

    power = {"P4": cp + w_prime / 240.0, "P8": cp + w_prime / 480.0, "CP33": 0.33 * cp, "CP66": 0.66 * cp}
    squares = []
    for work, recovery, seconds, target in ratio_table:
        tte1, h, g = time_to_exhaustion(c, power[work], dt, t_cap)
        if tte1 is None:
            return exp_err, PENALTY
        h, g = rest(c, power[recovery], dt, seconds, h, g)
        tte2, _, _ = time_to_exhaustion(c, power[work], dt, t_cap, h, g)
        if tte2 is None:
            tte2 = t_cap
        squares.append((tte2 / tte1 - target) ** 2)
    return exp_err, math.sqrt(sum(squares) / len(squares))
