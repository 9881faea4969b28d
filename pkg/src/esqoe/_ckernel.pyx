# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled allocation kernel.

Semantics must stay bit-identical to ``_kernel.py`` (same operations in the
same order on IEEE doubles); the equivalence suite compares both backends
entry for entry.
"""

BACKEND = "compiled"


def allocate(long long[::1] slot_order, double[::1] demand, double[::1] energy,
             long long[::1] cand_order, long long[::1] cand_start,
             long long[::1] out_service, long long[::1] out_slot,
             double[::1] out_amount, double tol):
    """See ``_kernel.allocate``; identical contract over buffer arguments."""
    cdef Py_ssize_t k = 0
    cdef Py_ssize_t p, c, i, s
    cdef double rd, e, a
    for p in range(slot_order.shape[0]):
        i = slot_order[p]
        rd = demand[i]
        if rd <= tol:
            continue
        for c in range(cand_start[i], cand_start[i + 1]):
            s = cand_order[c]
            e = energy[s]
            if e <= tol:
                continue
            a = e if e < rd else rd
            energy[s] = e - a
            rd = rd - a
            out_service[k] = s
            out_slot[k] = i
            out_amount[k] = a
            k += 1
            if rd <= tol:
                break
        demand[i] = rd
    return k
