# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled decoder kernels.

Same flattened-graph layout and signatures as _kernels_py (the numpy
reference backend).  Integer paths (QMS, NMS) reproduce the reference
bit-exactly: the two-minima scan keeps the first edge attaining the
minimum, matching the numpy tie rule.  BP evaluates tanh/log through
numpy (scalar libm is slower than numpy's vectorized loops) and keeps
only the graph assembly scalar; accumulation order differs from the
reduceat-based reference, so float messages can differ in the last
ulp while decisions agree.
"""

from libc.stdint cimport int64_t, uint8_t

import numpy as np

__all__ = ["qms_frame", "nms_frame", "bp_frame"]


cdef inline bint _syndrome_zero(uint8_t[::1] bits, int64_t[::1] edge_var,
                                int64_t[::1] check_ptr, Py_ssize_t n_checks):
    cdef Py_ssize_t c, e
    cdef int par
    for c in range(n_checks):
        par = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            par ^= bits[edge_var[e]]
        if par:
            return False
    return True


def qms_frame(int64_t[::1] check_ptr, int64_t[::1] edge_var, int64_t[::1] coe,
              int64_t[::1] var_ptr, int64_t[::1] var_edge_perm, int64_t[::1] vpe,
              int64_t[::1] channel_idx, int64_t[:, ::1] phi_v,
              int64_t[:, ::1] phi_ch, int64_t[:, ::1] quant,
              int64_t[::1] gamma_e, long half, long qv_max,
              int64_t[::1] v2c, int64_t[::1] c2v, uint8_t[::1] bits):
    cdef Py_ssize_t n_checks = check_ptr.shape[0] - 1
    cdef Py_ssize_t n_vars = var_ptr.shape[0] - 1
    cdef Py_ssize_t n_edges = edge_var.shape[0]
    cdef Py_ssize_t t, c, v, e, p, e1
    cdef long i_max = phi_v.shape[0]
    cdef int64_t big = half + 1
    cdef int64_t s, fv, a, m1, m2, mag, tot, app, ge
    cdef int par, neg, sgn

    for e in range(n_edges):
        v2c[e] = channel_idx[edge_var[e]]
    for t in range(i_max):
        ge = gamma_e[t]
        for c in range(n_checks):
            par = 0
            m1 = big
            m2 = big
            e1 = -1
            for e in range(check_ptr[c], check_ptr[c + 1]):
                s = v2c[e]
                fv = half - s if s < half else half - 1 - s
                if fv < 0:
                    par ^= 1
                    a = -fv
                else:
                    a = fv
                if a < m1:
                    m2 = m1
                    m1 = a
                    e1 = e
                elif a < m2:
                    m2 = a
            for e in range(check_ptr[c], check_ptr[c + 1]):
                s = v2c[e]
                fv = half - s if s < half else half - 1 - s
                neg = 1 if fv < 0 else 0
                mag = m2 if e == e1 else m1
                if mag > half:
                    mag = half
                sgn = par ^ neg
                c2v[e] = half - mag if sgn == 0 else half - 1 + mag
        for v in range(n_vars):
            tot = phi_ch[t, channel_idx[v]]
            for p in range(var_ptr[v], var_ptr[v + 1]):
                tot += phi_v[t, c2v[var_edge_perm[p]]]
            app = tot
            if app > qv_max:
                app = qv_max
            elif app < -qv_max:
                app = -qv_max
            bits[v] = 1 if app < ge else 0
            for p in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edge_perm[p]
                s = tot - phi_v[t, c2v[e]]
                if s > qv_max:
                    s = qv_max
                elif s < -qv_max:
                    s = -qv_max
                v2c[e] = quant[t, s + qv_max]
        if _syndrome_zero(bits, edge_var, check_ptr, n_checks):
            return t + 1, True
    return i_max, False


def nms_frame(int64_t[::1] check_ptr, int64_t[::1] edge_var, int64_t[::1] coe,
              int64_t[::1] var_ptr, int64_t[::1] var_edge_perm, int64_t[::1] vpe,
              int64_t[::1] qy, int64_t[::1] scale_tab, long i_max,
              long msg_max, long app_max,
              int64_t[::1] v2c, int64_t[::1] c2v, uint8_t[::1] bits):
    cdef Py_ssize_t n_checks = check_ptr.shape[0] - 1
    cdef Py_ssize_t n_vars = var_ptr.shape[0] - 1
    cdef Py_ssize_t n_edges = edge_var.shape[0]
    cdef Py_ssize_t t, c, v, e, p, e1
    cdef int64_t big = msg_max + 1
    cdef int64_t s, a, m1, m2, mag, scaled, tot, app
    cdef int par, neg, sgn

    for e in range(n_edges):
        v2c[e] = qy[edge_var[e]]
    for t in range(i_max):
        for c in range(n_checks):
            par = 0
            m1 = big
            m2 = big
            e1 = -1
            for e in range(check_ptr[c], check_ptr[c + 1]):
                s = v2c[e]
                if s < 0:
                    par ^= 1
                    a = -s
                else:
                    a = s
                if a < m1:
                    m2 = m1
                    m1 = a
                    e1 = e
                elif a < m2:
                    m2 = a
            for e in range(check_ptr[c], check_ptr[c + 1]):
                neg = 1 if v2c[e] < 0 else 0
                mag = m2 if e == e1 else m1
                if mag > msg_max:
                    mag = msg_max
                scaled = scale_tab[mag]
                sgn = par ^ neg
                c2v[e] = scaled if sgn == 0 else -scaled
        for v in range(n_vars):
            tot = qy[v]
            for p in range(var_ptr[v], var_ptr[v + 1]):
                tot += c2v[var_edge_perm[p]]
            app = tot
            if app > app_max:
                app = app_max
            elif app < -app_max:
                app = -app_max
            bits[v] = 1 if app < 0 else 0
            for p in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edge_perm[p]
                s = tot - c2v[e]
                if s > msg_max:
                    s = msg_max
                elif s < -msg_max:
                    s = -msg_max
                v2c[e] = s
        if _syndrome_zero(bits, edge_var, check_ptr, n_checks):
            return t + 1, True
    return i_max, False


def bp_frame(int64_t[::1] check_ptr, int64_t[::1] edge_var, int64_t[::1] coe,
             int64_t[::1] var_ptr, int64_t[::1] var_edge_perm, int64_t[::1] vpe,
             double[::1] llr, long i_max, double mag_floor, double mag_cap,
             double[::1] v2c, double[::1] c2v, uint8_t[::1] bits):
    cdef Py_ssize_t n_checks = check_ptr.shape[0] - 1
    cdef Py_ssize_t n_vars = var_ptr.shape[0] - 1
    cdef Py_ssize_t n_edges = edge_var.shape[0]
    cdef Py_ssize_t t, c, v, e, p
    cdef double tot_phi, s_ex, tot
    cdef int par, neg
    cdef double[::1] ph, sx, mo

    v2c_np = np.asarray(v2c)
    sx_np = np.empty(n_edges, dtype=np.float64)
    sx = sx_np

    for e in range(n_edges):
        v2c[e] = llr[edge_var[e]]
    for t in range(i_max):
        ph_np = -np.log(np.tanh(0.5 * np.clip(np.abs(v2c_np), mag_floor, mag_cap)))
        ph = ph_np
        for c in range(n_checks):
            tot_phi = 0.0
            for e in range(check_ptr[c], check_ptr[c + 1]):
                tot_phi += ph[e]
            for e in range(check_ptr[c], check_ptr[c + 1]):
                s_ex = tot_phi - ph[e]
                if s_ex < 1e-300:
                    s_ex = 1e-300
                sx[e] = s_ex
        mo_np = np.minimum(-np.log(np.tanh(0.5 * sx_np)), mag_cap)
        mo = mo_np
        for c in range(n_checks):
            par = 0
            for e in range(check_ptr[c], check_ptr[c + 1]):
                if v2c[e] < 0.0:
                    par ^= 1
            for e in range(check_ptr[c], check_ptr[c + 1]):
                neg = 1 if v2c[e] < 0.0 else 0
                c2v[e] = mo[e] if (par ^ neg) == 0 else -mo[e]
        for v in range(n_vars):
            tot = llr[v]
            for p in range(var_ptr[v], var_ptr[v + 1]):
                tot += c2v[var_edge_perm[p]]
            bits[v] = 1 if tot < 0.0 else 0
            for p in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edge_perm[p]
                v2c[e] = tot - c2v[e]
        if _syndrome_zero(bits, edge_var, check_ptr, n_checks):
            return t + 1, True
    return i_max, False
