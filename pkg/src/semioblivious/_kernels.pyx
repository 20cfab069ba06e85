# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the loops in _pykernels (same signatures, same results)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, INFINITY

cnp.import_array()

IMPLEMENTATION = "cython"


def block_min(const cnp.int64_t[:] block_ptr, const double[:] g):
    cdef Py_ssize_t b, p, nb = block_ptr.shape[0] - 1
    out = np.empty(nb)
    cdef double[:] o = out
    cdef double best
    for b in range(nb):
        best = g[block_ptr[b]]
        for p in range(block_ptr[b] + 1, block_ptr[b + 1]):
            if g[p] < best:
                best = g[p]
        o[b] = best
    return out


def eg_step(const cnp.int64_t[:] block_ptr, const double[:] logx, const double[:] g, double eta):
    cdef Py_ssize_t b, p, nb = block_ptr.shape[0] - 1
    out = np.empty(logx.shape[0])
    cdef double[:] z = out
    cdef double top, total
    for b in range(nb):
        top = -INFINITY
        for p in range(block_ptr[b], block_ptr[b + 1]):
            z[p] = logx[p] - eta * g[p]
            if z[p] > top:
                top = z[p]
        total = 0.0
        for p in range(block_ptr[b], block_ptr[b + 1]):
            z[p] -= top
            total += exp(z[p])
        total = log(total)
        for p in range(block_ptr[b], block_ptr[b + 1]):
            z[p] -= total
    return out


def path_loads(const cnp.int64_t[:] path_ptr, const cnp.int64_t[:] path_edges, const double[:] w, Py_ssize_t m):
    out = np.zeros(m)
    cdef double[:] loads = out
    cdef Py_ssize_t p, h
    for p in range(path_ptr.shape[0] - 1):
        for h in range(path_ptr[p], path_ptr[p + 1]):
            loads[path_edges[h]] += w[p]
    return out


def greedy_cut(const cnp.int64_t[:] path_ptr, const cnp.int64_t[:] path_edges, w0, double gamma, Py_ssize_t m):
    cdef Py_ssize_t npaths = path_ptr.shape[0] - 1
    cdef Py_ssize_t p, h, e, j
    w_arr = np.array(w0, dtype=np.float64)
    cdef double[:] w = w_arr
    # edge -> incident paths (CSR transpose of the pool)
    inc_ptr_arr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[:] inc_ptr = inc_ptr_arr
    for h in range(path_edges.shape[0]):
        inc_ptr[path_edges[h] + 1] += 1
    for e in range(m):
        inc_ptr[e + 1] += inc_ptr[e]
    fill_arr = inc_ptr_arr[:-1].copy()
    cdef cnp.int64_t[:] fill = fill_arr
    inc_arr = np.empty(path_edges.shape[0], dtype=np.int64)
    cdef cnp.int64_t[:] inc = inc_arr
    for p in range(npaths):
        for h in range(path_ptr[p], path_ptr[p + 1]):
            e = path_edges[h]
            inc[fill[e]] = p
            fill[e] += 1
    cut_arr = np.zeros(m, dtype=np.int8)
    deltas_arr = np.zeros(m)
    cdef cnp.int8_t[:] cut = cut_arr
    cdef double[:] deltas = deltas_arr
    cdef double load
    for e in range(m):
        load = 0.0
        for j in range(inc_ptr[e], inc_ptr[e + 1]):
            load += w[inc[j]]
        if load > gamma:
            cut[e] = 1
            deltas[e] = load
            for j in range(inc_ptr[e], inc_ptr[e + 1]):
                w[inc[j]] = 0.0
    return w_arr, cut_arr, deltas_arr


cdef Py_ssize_t _erased(int dim, long s, long w, long t, cnp.int64_t[:] out, cnp.int64_t[:] pos):
    # pos[v] holds index+1 of v in the current prefix, 0 when absent
    cdef Py_ssize_t k = 0, j, keep
    cdef int leg, bit
    cdef long a, b, v, diff
    out[0] = s
    pos[s] = 1
    k = 1
    for leg in range(2):
        if leg == 0:
            a = s
            b = w
        else:
            a = w
            b = t
        v = a
        diff = a ^ b
        for bit in range(dim):
            if (diff >> bit) & 1:
                v ^= (1 << bit)
                if pos[v]:
                    keep = pos[v]
                    for j in range(keep, k):
                        pos[out[j]] = 0
                    k = keep
                else:
                    out[k] = v
                    k += 1
                    pos[v] = k
    for j in range(k):
        pos[out[j]] = 0
    return k


def loop_erased_walk(int dim, long s, long w, long t, out):
    pos = np.zeros(1 << dim, dtype=np.int64)
    return _erased(dim, s, w, t, out, pos)


def valiant_trial_loads(int dim, const cnp.int64_t[:] eid, const cnp.int64_t[:] s_arr, const cnp.int64_t[:] t_arr,
                        const double[:] amounts, const cnp.int64_t[:, :] w_mat, Py_ssize_t m):
    cdef Py_ssize_t trials = w_mat.shape[0], npairs = w_mat.shape[1]
    cdef Py_ssize_t j, i, h, k, e
    cdef long u, v, x
    cdef int b
    out_arr = np.zeros(trials)
    cdef double[:] out = out_arr
    loads_arr = np.zeros(m)
    cdef double[:] loads = loads_arr
    buf_arr = np.zeros(2 * dim + 1, dtype=np.int64)
    cdef cnp.int64_t[:] buf = buf_arr
    pos_arr = np.zeros(1 << dim, dtype=np.int64)
    cdef cnp.int64_t[:] pos = pos_arr
    cdef double best
    for j in range(trials):
        for e in range(m):
            loads[e] = 0.0
        for i in range(npairs):
            k = _erased(dim, s_arr[i], w_mat[j, i], t_arr[i], buf, pos)
            for h in range(k - 1):
                u = buf[h]
                v = buf[h + 1]
                x = u ^ v
                b = 0
                while x > 1:
                    x >>= 1
                    b += 1
                loads[eid[u * dim + b]] += amounts[i]
        best = 0.0
        for e in range(m):
            if loads[e] > best:
                best = loads[e]
        out[j] = best
    return out_arr
