# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled simulation kernels; mirrors ``hydfit._kernels_py`` operation for operation."""

NAME = "cython"


cdef struct Consts:
    double theta
    double gm
    double one_m_phi
    double one_m_gamma
    double m_ae
    double k_ae
    double k_out
    double k_in
    double ans
    double k_eq
    double inv_anf
    double inv_ans


cdef struct Out:
    double h
    double g
    double p_ae
    double e
    bint exhausted


cdef Consts _consts(params) except *:
    cdef Consts k
    cdef double anf, ans, m_ae, m_ans, m_anf, phi, theta, gamma
    anf, ans, m_ae, m_ans, m_anf, phi, theta, gamma = params
    k.theta = theta
    k.gm = 1.0 - theta - gamma
    k.one_m_phi = 1.0 - phi
    k.one_m_gamma = 1.0 - gamma
    k.m_ae = m_ae
    k.k_ae = m_ae / k.one_m_phi
    k.k_out = m_ans / k.gm
    k.k_in = m_anf / k.one_m_gamma
    k.ans = ans
    k.k_eq = 1.0 / (1.0 / ans + 1.0 / anf)
    k.inv_anf = 1.0 / anf
    k.inv_ans = 1.0 / ans
    return k


# argument order matches Python's min/max: ties keep the first argument
cdef inline double _fmin(double a, double b) noexcept nogil:
    return b if b < a else a


cdef inline double _fmax(double a, double b) noexcept nogil:
    return b if b > a else a


cdef inline Out _step(const Consts* k, double h, double g, double drain, double dt) noexcept nogil:
    cdef Out o
    cdef double hp, p_ae, p_an, e, lvl, m_an, h_new, g_new

    hp = h + drain
    if hp <= k.one_m_phi:
        p_ae = k.k_ae * hp
    else:
        p_ae = k.m_ae

    lvl = g + k.theta
    if hp <= k.theta and g == 0.0:
        e = 0.0
    elif hp >= k.one_m_gamma and g == k.gm:
        e = 0.0
    elif hp == lvl:
        e = 0.0
    else:
        if hp > lvl:
            if hp < k.one_m_gamma:
                p_an = k.k_out * (hp - lvl)
            else:
                p_an = k.k_out * (k.gm - g)
        else:
            p_an = k.k_in * (hp - lvl)
        e = p_an * dt
        e = _fmin(e, (k.gm - g) * k.ans)
        e = _fmax(e, -g * k.ans)
        m_an = (hp - lvl) * k.k_eq
        if e < 0.0:
            e = _fmax(m_an, e)
        elif e > 0.0:
            e = _fmin(m_an, e)

    h_new = hp - (p_ae * dt + e) * k.inv_anf
    g_new = g + e * k.inv_ans
    o.exhausted = h_new >= 1.0
    if h_new < 0.0:
        h_new = 0.0
    elif h_new > 1.0:
        h_new = 1.0
    if g_new < 0.0:
        g_new = 0.0
    elif g_new > k.gm:
        g_new = k.gm
    o.h = h_new
    o.g = g_new
    o.p_ae = p_ae
    o.e = e
    return o


def step(params, double h, double g, double p, double dt):
    cdef Consts k = _consts(params)
    cdef Out o = _step(&k, h, g, p * k.inv_anf * dt, dt)
    return o.h, o.g, o.p_ae, o.e / dt, bool(o.exhausted)


def run_to_exhaustion(params, double p, double dt, long max_steps, double h, double g):
    cdef Consts k
    cdef Out o
    cdef long n = 0
    cdef int status = 0  # 0 budget spent, 1 exhausted, 2 fixpoint
    cdef double drain
    if h >= 1.0:
        return 0, h, g, True
    k = _consts(params)
    drain = p * k.inv_anf * dt
    with nogil:
        while n < max_steps:
            o = _step(&k, h, g, drain, dt)
            n += 1
            if o.exhausted:
                status = 1
                break
            if o.h == h and o.g == g:
                status = 2
                break
            h = o.h
            g = o.g
    if status == 1:
        return n, o.h, o.g, True
    if status == 2:
        return max_steps, h, g, False
    return n, h, g, False


def hold(params, double p, double dt, long n_steps, double h, double g):
    cdef Consts k = _consts(params)
    cdef Out o
    cdef long i
    cdef double drain = p * k.inv_anf * dt
    with nogil:
        for i in range(n_steps):
            o = _step(&k, h, g, drain, dt)
            if o.h == h and o.g == g:
                break
            h = o.h
            g = o.g
    return h, g


def trace(params, double p, double dt, long max_steps, double h, double g):
    cdef Consts k
    cdef Out o
    cdef long i
    cdef double drain
    rows = []
    if h >= 1.0:
        return rows
    k = _consts(params)
    drain = p * k.inv_anf * dt
    for i in range(max_steps):
        o = _step(&k, h, g, drain, dt)
        h = o.h
        g = o.g
        rows.append((h, g, o.p_ae, o.e / dt))
        if o.exhausted:
            break
    return rows
