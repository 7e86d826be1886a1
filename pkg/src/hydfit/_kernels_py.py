"""Pure-Python simulation kernels.

Fallback for the compiled ``hydfit._kernels`` extension. Both modules expose
the same functions and perform the same floating-point operations in the same
order, so their results are bit-identical.

``params`` is always the 8-tuple ``(anf, ans, m_ae, m_ans, m_anf, phi, theta,
gamma)``.
"""

NAME = "python"


def _consts(params):
    anf, ans, m_ae, m_ans, m_anf, phi, theta, gamma = params
    gm = 1.0 - theta - gamma
    one_m_phi = 1.0 - phi
    one_m_gamma = 1.0 - gamma
    return (
        theta,
        gm,
        one_m_phi,
        one_m_gamma,
        m_ae,
        m_ae / one_m_phi,  # aerobic gain
        m_ans / gm,  # outflow gain
        m_anf / one_m_gamma,  # refill gain
        ans,
        1.0 / (1.0 / ans + 1.0 / anf),  # equalizing factor
        1.0 / anf,
        1.0 / ans,
    )


def _step(k, h, g, drain, dt):
    (theta, gm, one_m_phi, one_m_gamma, m_ae, k_ae, k_out, k_in,
     ans, k_eq, inv_anf, inv_ans) = k

    hp = h + drain
    if hp <= one_m_phi:
        p_ae = k_ae * hp
    else:
        p_ae = m_ae

    lvl = g + theta
    if hp <= theta and g == 0.0:
        e = 0.0
    elif hp >= one_m_gamma and g == gm:
        e = 0.0
    elif hp == lvl:
        e = 0.0
    else:
        if hp > lvl:
            if hp < one_m_gamma:
                p_an = k_out * (hp - lvl)
            else:
                p_an = k_out * (gm - g)
        else:
            p_an = k_in * (hp - lvl)
        e = p_an * dt
        e = min(e, (gm - g) * ans)
        e = max(e, -g * ans)
        m_an = (hp - lvl) * k_eq
        if e < 0.0:
            e = max(m_an, e)
        elif e > 0.0:
            e = min(m_an, e)

    h_new = hp - (p_ae * dt + e) * inv_anf
    g_new = g + e * inv_ans
    exhausted = h_new >= 1.0
    if h_new < 0.0:
        h_new = 0.0
    elif h_new > 1.0:
        h_new = 1.0
    if g_new < 0.0:
        g_new = 0.0
    elif g_new > gm:
        g_new = gm
    return h_new, g_new, p_ae, e, exhausted


def step(params, h, g, p, dt):
    """Advance one time step; returns ``(h, g, p_ae, p_an, exhausted)``."""
    k = _consts(params)
    h, g, p_ae, e, exhausted = _step(k, h, g, p * k[10] * dt, dt)
    return h, g, p_ae, e / dt, exhausted


def run_to_exhaustion(params, p, dt, max_steps, h, g):
    """Hold demand ``p`` from state ``(h, g)`` until exhaustion.

    Returns ``(n_steps, h, g, exhausted)``. A state that is already exhausted
    (``h >= 1``) returns zero steps. A bit-exact fixpoint of the state means
    the demand is sustained forever, so the run stops early and reports
    ``max_steps`` without exhaustion.
    """
    if h >= 1.0:
        return 0, h, g, True
    k = _consts(params)
    drain = p * k[10] * dt
    n = 0
    while n < max_steps:
        h_new, g_new, _, _, exhausted = _step(k, h, g, drain, dt)
        n += 1
        if exhausted:
            return n, h_new, g_new, True
        if h_new == h and g_new == g:
            return max_steps, h, g, False
        h, g = h_new, g_new
    return n, h, g, False


def hold(params, p, dt, n_steps, h, g):
    """Apply demand ``p`` for exactly ``n_steps`` steps; returns ``(h, g)``."""
    k = _consts(params)
    drain = p * k[10] * dt
    for _ in range(n_steps):
        h_new, g_new, _, _, _ = _step(k, h, g, drain, dt)
        if h_new == h and g_new == g:
            break
        h, g = h_new, g_new
    return h, g


def trace(params, p, dt, max_steps, h, g):
    """Like :func:`run_to_exhaustion` but records every step.

    Returns a list of ``(h, g, p_ae, p_an)`` tuples, one per completed step.
    """
    rows = []
    if h >= 1.0:
        return rows
    k = _consts(params)
    drain = p * k[10] * dt
    for _ in range(max_steps):
        h, g, p_ae, e, exhausted = _step(k, h, g, drain, dt)
        rows.append((h, g, p_ae, e / dt))
        if exhausted:
            break
    return rows
