"""Pure-Python event loop, the reference implementation of the jump process.

One event consumes one row of five uniforms:

    row = (u_wait, u_kind, u_a, u_b, u_angle)

* ``dt = -log(1 - u_wait) / rate_total`` is the exponential waiting time.
* ``u_kind < p_kac`` selects a rotation, otherwise an exchange.
* Rotation: ``a = floor(u_a * M)`` and ``b`` drawn from the remaining M - 1
  indices via ``u_b``; the pair is canonicalized to (min, max) and rotated
  by ``theta = 2 pi * u_angle``.
* Exchange: ``j = floor(u_a * N)``, ``k = floor(u_b * M)``; ``u_angle`` is
  drawn but unused, which keeps the stream aligned between event kinds.

Scheduled samples are recorded right-continuously: every sample time
strictly below the next event time is recorded from the current state
before the event is applied.  When renormalization is on, the state is
rescaled onto the sphere before each record and checked against
``renorm_threshold`` every ``check_every`` events.

The compiled backend (`kacbgk._event_loop`) performs the same
double-precision operations in the same order, so the two backends produce
bitwise-identical trajectories from the same uniform stream.
"""

from math import cos, log, pi, sin, sqrt

__all__ = ["run_chunk"]

BACKEND_NAME = "python"


def _record(v, w, out_func, out_snap, want_snap, s_idx, e_target, n_f, m_f):
    sv2 = 0.0
    sv4 = 0.0
    for x in v:
        x2 = x * x
        sv2 += x2
        sv4 += x2 * x2
    sw2 = 0.0
    sw4 = 0.0
    for x in w:
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
        out_snap[s_idx] = v


def _energy(v, w):
    acc = 0.0
    for x in v:
        acc += x * x
    for x in w:
        acc += x * x
    return acc


def _rescale(v, w, scale):
    for i in range(len(v)):
        v[i] = v[i] * scale
    for i in range(len(w)):
        w[i] = w[i] * scale


def run_chunk(v_arr, w_arr, rows_arr, t, sample_times_arr, s_idx,
              out_func, out_snap, want_snap, rate_total, p_kac,
              renorm_on, renorm_threshold, check_every, since_check, n_events):
    """Consume uniform rows until the schedule completes or rows run out.

    Mutates v_arr, w_arr, out_func, out_snap in place and returns
    ``(done, t, s_idx, since_check, n_events)``.
    """
    v = v_arr.tolist()
    w = w_arr.tolist()
    rows = rows_arr.tolist()
    sample_times = sample_times_arr.tolist()
    n = len(v)
    m = len(w)
    n_rows = len(rows)
    n_samp = len(sample_times)
    n_f = float(n)
    m_f = float(m)
    e_target = float(n + m)
    two_pi = 2.0 * pi
    row = 0
    done = False

    while True:
        if s_idx >= n_samp:
            done = True
            break
        if row >= n_rows:
            break
        u0, u1, u2, u3, u4 = rows[row]
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
            a = int(u2 * m_f)
            if a >= m:
                a = m - 1
            b = int(u3 * (m_f - 1.0))
            if b >= m - 1:
                b = m - 2
            if b >= a:
                b = b + 1
            if b < a:
                j, k = b, a
            else:
                j, k = a, b
            theta = u4 * two_pi
            c = cos(theta)
            s = sin(theta)
            wj = w[j]
            wk = w[k]
            w[j] = wj * c - wk * s
            w[k] = wj * s + wk * c
        else:
            j = int(u2 * n_f)
            if j >= n:
                j = n - 1
            k = int(u3 * m_f)
            if k >= m:
                k = m - 1
            v[j], w[k] = w[k], v[j]
        t = t_ev
        n_events += 1
        since_check += 1
        if renorm_on and since_check >= check_every:
            since_check = 0
            e = _energy(v, w)
            if abs(e / e_target - 1.0) > renorm_threshold:
                _rescale(v, w, sqrt(e_target / e))

    v_arr[:] = v
    w_arr[:] = w
    return done, t, s_idx, since_check, n_events
