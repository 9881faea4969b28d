"""Pure-Python allocation kernel.

Mirrors ``_ckernel.pyx`` operation for operation; both backends must produce
bit-identical allocations for the same inputs.  Keep the two in sync.
"""

BACKEND = "python"


def allocate(slot_order, demand, energy, cand_order, cand_start,
             out_service, out_slot, out_amount, tol):
    """Greedy splittable allocation over pre-ordered candidates.

    ``slot_order`` gives the slot processing sequence; candidates for slot
    ``i`` are ``cand_order[cand_start[i]:cand_start[i+1]]``, already in the
    strategy's priority order.  ``demand`` and ``energy`` are mutated in
    place to the residuals.  Returns the number of entries written to the
    ``out_*`` arrays (callers size them to len(energy) + len(demand):
    every entry either drains a service or fills a slot).
    """
    k = 0
    for i in slot_order:
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
