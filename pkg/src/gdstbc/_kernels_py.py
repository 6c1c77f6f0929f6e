"""NumPy implementation of the decoder metric kernel (fallback backend).

Must stay semantically identical to the compiled version in
``_ckernels.pyx``: the first candidate index achieving the minimum wins.
"""

import numpy as np


def metric_scan(stack, r_prev, r_t, inv_a):
    """argmin_m || r_t - inv_a * stack[m] @ r_prev ||_F^2 over the stack.

    Returns (best_index, best_metric).
    """
    diff = r_t[None, :, :] - inv_a * (stack @ r_prev)
    metrics = np.einsum("mij,mij->m", diff, diff.conj()).real
    best = int(np.argmin(metrics))
    return best, float(metrics[best])
