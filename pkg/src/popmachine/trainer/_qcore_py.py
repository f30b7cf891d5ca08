"""Pure-Python training/evaluation kernels (fallback backend).

These mirror the compiled kernels in _qcore.pyx statement for statement;
the two backends are asserted to produce bit-identical float64 results, so
any change here must be made there as well.
"""

from __future__ import annotations


def run_segment(q, pos_next, inv_next, delta_of, rm_next, u_goal, u0, start_cells,
                alpha, gamma, epsilon, episode_cap, crm, rand_stream, n_steps, carry):
    """Advance training by n_steps, mutating q and carry.

    carry holds [pos, inv, u, episode_steps]; pos < 0 requests a reset.
    rand_stream must hold at least 3 * n_steps uniform draws; at most three
    are consumed per step (reset, explore test, explore action).
    """
    pos = int(carry[0])
    inv = int(carry[1])
    u = int(carry[2])
    ep = int(carry[3])
    n_u = q.shape[2]
    n_starts = len(start_cells)
    k = 0
    for _ in range(n_steps):
        if pos < 0:
            pos = int(start_cells[int(rand_stream[k] * n_starts)])
            k += 1
            inv = 0
            u = u0
            ep = 0
        draw = rand_stream[k]
        k += 1
        if draw < epsilon:
            a = int(rand_stream[k] * 4.0)
            k += 1
        else:
            row = q[pos, inv, u]
            a = 0
            if row[1] > row[a]:
                a = 1
            if row[2] > row[a]:
                a = 2
            if row[3] > row[a]:
                a = 3
        p2 = int(pos_next[pos, a])
        if p2 != pos:
            i2 = int(inv_next[p2, inv])
            d = int(delta_of[p2, inv])
        else:  # blocked move: no cell entry, no interaction
            i2 = inv
            d = 0
        u2 = int(rm_next[u, d])
        if crm:
            for ub in range(n_u):
                ub2 = rm_next[ub, d]
                r = 0.0 if ub2 == u_goal else -1.0
                nrow = q[p2, i2, ub2]
                m = nrow[0]
                if nrow[1] > m:
                    m = nrow[1]
                if nrow[2] > m:
                    m = nrow[2]
                if nrow[3] > m:
                    m = nrow[3]
                target = r + gamma * m
                old = q[pos, inv, ub, a]
                q[pos, inv, ub, a] = old + alpha * (target - old)
        else:
            r = 0.0 if u2 == u_goal else -1.0
            nrow = q[p2, i2, u2]
            m = nrow[0]
            if nrow[1] > m:
                m = nrow[1]
            if nrow[2] > m:
                m = nrow[2]
            if nrow[3] > m:
                m = nrow[3]
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


def evaluate_greedy(q, pos_next, inv_next, delta_of, rm_next, u_goal, u0, start_pos, cap):
    """Greedy-policy return from start_pos with empty inventory; -cap on timeout."""
    pos = int(start_pos)
    inv = 0
    u = int(u0)
    ret = 0.0
    for _ in range(cap):
        row = q[pos, inv, u]
        a = 0
        if row[1] > row[a]:
            a = 1
        if row[2] > row[a]:
            a = 2
        if row[3] > row[a]:
            a = 3
        p2 = int(pos_next[pos, a])
        if p2 != pos:
            i2 = int(inv_next[p2, inv])
            d = int(delta_of[p2, inv])
        else:
            i2 = inv
            d = 0
        u2 = int(rm_next[u, d])
        if u2 == u_goal:
            return ret
        ret -= 1.0
        pos = p2
        inv = i2
        u = u2
    return ret
