"""Pure numpy statevector kernels; same contract as the compiled module."""
import numpy as np


def apply_1q(state, n, q, m00, m01, m10, m11):
    psi = state.reshape(1 << q, 2, -1)
    a = psi[:, 0, :].copy()
    b = psi[:, 1, :]
    psi[:, 0, :] = m00 * a + m01 * b
    psi[:, 1, :] = m10 * a + m11 * b
    return state


def apply_cswap(state, n, c, t1, t2):
    tensor = state.reshape((2,) * n)
    src = [slice(None)] * n
    dst = [slice(None)] * n
    src[c] = dst[c] = 1
    src[t1], src[t2] = 1, 0
    dst[t1], dst[t2] = 0, 1
    src, dst = tuple(src), tuple(dst)
    tmp = tensor[src].copy()
    tensor[src] = tensor[dst]
    tensor[dst] = tmp
    return state


def apply_init(state, n, qubits, amplitudes):
    qubits = [int(q) for q in qubits]
    k = len(qubits)
    tensor = state.reshape((2,) * n)
    zero = [slice(None)] * n
    for q in qubits:
        zero[q] = 0
    rest = tensor[tuple(zero)]
    block = np.asarray(amplitudes, dtype=np.complex128).reshape((2,) * k)
    # axes of the outer product: remaining qubits in order, then ``qubits``
    out = np.multiply.outer(rest, block)
    others = [q for q in range(n) if q not in qubits]
    order = others + qubits
    out = np.transpose(out, np.argsort(order))
    return np.ascontiguousarray(out).reshape(-1)


def prob_one(state, n, q):
    psi = state.reshape(1 << q, 2, -1)[:, 1, :]
    return float(np.sum(psi.real**2 + psi.imag**2))


def swap_overlap(state, n, perm):
    tensor = state.reshape((2,) * n)
    permuted = np.transpose(tensor, [int(p) for p in perm]).reshape(-1)
    return complex(np.vdot(state, permuted))
