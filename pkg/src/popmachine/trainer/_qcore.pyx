# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled training/evaluation kernels.

Statement-for-statement twin of _qcore_py.py; both backends must produce
bit-identical float64 results (same operation order, no FMA/fast-math).
"""


def run_segment(double[:, :, :, ::1] q,
                int[:, ::1] pos_next,
                int[:, ::1] inv_next,
                int[:, ::1] delta_of,
                int[:, ::1] rm_next,
                long u_goal, long u0,
                int[::1] start_cells,
                double alpha, double gamma, double epsilon,
                long episode_cap, bint crm,
                double[::1] rand_stream,
                long n_steps,
                long[::1] carry):
    cdef long pos = carry[0]
    cdef long inv = carry[1]
    cdef long u = carry[2]
    cdef long ep = carry[3]
    cdef long n_u = q.shape[2]
    cdef long n_starts = start_cells.shape[0]
    cdef long k = 0
    cdef long t, a, p2, i2, d, u2, ub, ub2
    cdef double draw, r, target, old, m

    for t in range(n_steps):
        if pos < 0:
            pos = start_cells[<long>(rand_stream[k] * n_starts)]
            k += 1
            inv = 0
            u = u0
            ep = 0
        draw = rand_stream[k]
        k += 1
        if draw < epsilon:
            a = <long>(rand_stream[k] * 4.0)
            k += 1
        else:
            a = 0
            if q[pos, inv, u, 1] > q[pos, inv, u, a]:
                a = 1
            if q[pos, inv, u, 2] > q[pos, inv, u, a]:
                a = 2
            if q[pos, inv, u, 3] > q[pos, inv, u, a]:
                a = 3
        p2 = pos_next[pos, a]
        if p2 != pos:
            i2 = inv_next[p2, inv]
            d = delta_of[p2, inv]
        else:  # blocked move: no cell entry, no interaction
            i2 = inv
            d = 0
        u2 = rm_next[u, d]
        if crm:
            for ub in range(n_u):
                ub2 = rm_next[ub, d]
                r = 0.0 if ub2 == u_goal else -1.0
                m = q[p2, i2, ub2, 0]
                if q[p2, i2, ub2, 1] > m:
                    m = q[p2, i2, ub2, 1]
                if q[p2, i2, ub2, 2] > m:
                    m = q[p2, i2, ub2, 2]
                if q[p2, i2, ub2, 3] > m:
                    m = q[p2, i2, ub2, 3]
                target = r + gamma * m
                old = q[pos, inv, ub, a]
                q[pos, inv, ub, a] = old + alpha * (target - old)
        else:
            r = 0.0 if u2 == u_goal else -1.0
            m = q[p2, i2, u2, 0]
            if q[p2, i2, u2, 1] > m:
                m = q[p2, i2, u2, 1]
            if q[p2, i2, u2, 2] > m:
                m = q[p2, i2, u2, 2]
            if q[p2, i2, u2, 3] > m:
                m = q[p2, i2, u2, 3]
            target = r + gamma * m
            old = q[pos, inv, u, a]
            q[pos, inv, u, a] = old + alpha * (target - old)
        ep += 1
        if u2 == u_goal or ep >= episode_cap:
            pos = -1
        else:
            pos = p2
            inv = i2
            u = u2
    carry[0] = pos
    carry[1] = inv
    carry[2] = u
    carry[3] = ep


def evaluate_greedy(double[:, :, :, ::1] q,
                    int[:, ::1] pos_next,
                    int[:, ::1] inv_next,
                    int[:, ::1] delta_of,
                    int[:, ::1] rm_next,
                    long u_goal, long u0,
                    long start_pos, long cap):
    cdef long pos = start_pos
    cdef long inv = 0
    cdef long u = u0
    cdef double ret = 0.0
    cdef long t, a, p2, i2, d, u2

    for t in range(cap):
        a = 0
        if q[pos, inv, u, 1] > q[pos, inv, u, a]:
            a = 1
        if q[pos, inv, u, 2] > q[pos, inv, u, a]:
            a = 2
        if q[pos, inv, u, 3] > q[pos, inv, u, a]:
            a = 3
        p2 = pos_next[pos, a]
        if p2 != pos:
            i2 = inv_next[p2, inv]
            d = delta_of[p2, inv]
        else:
            i2 = inv
            d = 0
        u2 = rm_next[u, d]
        if u2 == u_goal:
            return ret
        ret -= 1.0
        pos = p2
        inv = i2
        u = u2
    return ret
