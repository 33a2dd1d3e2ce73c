# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled event loop; mirrors `kacbgk._event_loop_py` operation for operation.

See the pure-Python module for the uniform-row convention and the sampling
semantics.  Both backends perform identical double-precision arithmetic in
identical order (the extension is built with -ffp-contract=off), so
trajectories agree bitwise between them.
"""

from libc.math cimport M_PI, cos, fabs, log, sin, sqrt

BACKEND_NAME = "cython"


cdef inline double _energy(double[::1] v, double[::1] w) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        acc += v[i] * v[i]
    for i in range(w.shape[0]):
        acc += w[i] * w[i]
    return acc


cdef inline void _rescale(double[::1] v, double[::1] w, double scale) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        v[i] = v[i] * scale
    for i in range(w.shape[0]):
        w[i] = w[i] * scale


cdef inline void _record(double[::1] v, double[::1] w, double[:, ::1] out_func,
                         double[:, ::1] out_snap, bint want_snap, Py_ssize_t s_idx,
                         double e_target, double n_f, double m_f) noexcept nogil:
    cdef double sv2 = 0.0, sv4 = 0.0, sw2 = 0.0, sw4 = 0.0, x, x2, tau
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        x = v[i]
        x2 = x * x
        sv2 += x2
        sv4 += x2 * x2
    for i in range(w.shape[0]):
        x = w[i]
        x2 = x * x
        sw2 += x2
        sw4 += x2 * x2
    tau = (e_target - sv2) / m_f
    out_func[s_idx, 0] = tau
    out_func[s_idx, 1] = sw4 / m_f
    out_func[s_idx, 2] = sv4 / n_f
    out_func[s_idx, 3] = sw4 - (3.0 * m_f * m_f * tau * tau) / (m_f + 2.0)
    out_func[s_idx, 4] = sv2 + sw2
    if want_snap:
        for i in range(v.shape[0]):
            out_snap[s_idx, i] = v[i]


def run_chunk(double[::1] v, double[::1] w, double[:, ::1] rows,
              double t, double[::1] sample_times, Py_ssize_t s_idx,
              double[:, ::1] out_func, double[:, ::1] out_snap, bint want_snap,
              double rate_total, double p_kac,
              bint renorm_on, double renorm_threshold,
              long check_every, long since_check, long long n_events):
    """Consume uniform rows until the schedule completes or rows run out.

    Mutates v, w, out_func, out_snap in place and returns
    ``(done, t, s_idx, since_check, n_events)``.
    """
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t n_rows = rows.shape[0]
    cdef Py_ssize_t n_samp = sample_times.shape[0]
    cdef double n_f = <double>n
    cdef double m_f = <double>m
    cdef double e_target = <double>(n + m)
    cdef double two_pi = 2.0 * M_PI
    cdef double u0, u1, u2, u3, u4, dt, t_ev, theta, c, s, wj, wk, x, e
    cdef Py_ssize_t a, b, j, k, row = 0
    cdef bint done = False

    while True:
        if s_idx >= n_samp:
            done = True
            break
        if row >= n_rows:
            break
        u0 = rows[row, 0]
        u1 = rows[row, 1]
        u2 = rows[row, 2]
        u3 = rows[row, 3]
        u4 = rows[row, 4]
        row += 1
        dt = -log(1.0 - u0) / rate_total
        t_ev = t + dt
        while s_idx < n_samp and sample_times[s_idx] < t_ev:
            if renorm_on:
                _rescale(v, w, sqrt(e_target / _energy(v, w)))
            _record(v, w, out_func, out_snap, want_snap, s_idx, e_target, n_f, m_f)
            s_idx += 1
        if s_idx >= n_samp:
            done = True
            break
        if u1 < p_kac:
            a = <Py_ssize_t>(u2 * m_f)
            if a >= m:
                a = m - 1
            b = <Py_ssize_t>(u3 * (m_f - 1.0))
            if b >= m - 1:
                b = m - 2
            if b >= a:
                b = b + 1
            if b < a:
                j = b
                k = a
            else:
                j = a
                k = b
            theta = u4 * two_pi
            c = cos(theta)
            s = sin(theta)
            wj = w[j]
            wk = w[k]
            w[j] = wj * c - wk * s
            w[k] = wj * s + wk * c
        else:
            j = <Py_ssize_t>(u2 * n_f)
            if j >= n:
                j = n - 1
            k = <Py_ssize_t>(u3 * m_f)
            if k >= m:
                k = m - 1
            x = v[j]
            v[j] = w[k]
            w[k] = x
        t = t_ev
        n_events += 1
        since_check += 1
        if renorm_on and since_check >= check_every:
            since_check = 0
            e = _energy(v, w)
            if fabs(e / e_target - 1.0) > renorm_threshold:
                _rescale(v, w, sqrt(e_target / e))

    return done, t, s_idx, since_check, n_events
