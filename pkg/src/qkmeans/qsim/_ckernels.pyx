# cython: language_level=3
"""Compiled statevector kernels.

Qubit 0 is the most significant bit of the basis-state index. Every kernel
takes a contiguous complex128 state and returns the resulting array; the
in-place kernels return the array they were given.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _pair_low(Py_ssize_t k, Py_ssize_t stride) nogil:
    # k-th index whose ``stride`` bit is clear
    return ((k & ~(stride - 1)) << 1) | (k & (stride - 1))


def apply_1q(state, int n, int q, double complex m00, double complex m01,
             double complex m10, double complex m11):
    cdef double complex[::1] s = state
    cdef Py_ssize_t half = s.shape[0] // 2
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (n - 1 - q)
    cdef Py_ssize_t k, i, j
    cdef double complex a, b
    for k in range(half):
        i = _pair_low(k, stride)
        j = i | stride
        a = s[i]
        b = s[j]
        s[i] = m00 * a + m01 * b
        s[j] = m10 * a + m11 * b
    return state


def apply_cswap(state, int n, int c, int t1, int t2):
    cdef double complex[::1] s = state
    cdef Py_ssize_t dim = s.shape[0]
    cdef Py_ssize_t bc = (<Py_ssize_t>1) << (n - 1 - c)
    cdef Py_ssize_t b1 = (<Py_ssize_t>1) << (n - 1 - t1)
    cdef Py_ssize_t b2 = (<Py_ssize_t>1) << (n - 1 - t2)
    cdef Py_ssize_t i, j
    cdef double complex tmp
    for i in range(dim):
        if (i & bc) and (i & b1) and not (i & b2):
            j = i ^ b1 ^ b2
            tmp = s[i]
            s[i] = s[j]
            s[j] = tmp
    return state


def apply_init(state, int n, qubits, amplitudes):
    """Load ``amplitudes`` onto ``qubits``, which must all be in |0>."""
    cdef double complex[::1] s = state
    cdef double complex[::1] amps = np.ascontiguousarray(amplitudes, dtype=np.complex128)
    cdef long[::1] qs = np.ascontiguousarray(qubits, dtype=np.int64).astype(np.int_)
    cdef Py_ssize_t dim = s.shape[0]
    cdef Py_ssize_t k = qs.shape[0]
    cdef Py_ssize_t namps = amps.shape[0]
    cdef Py_ssize_t mask = 0
    cdef Py_ssize_t a, b, i, off
    out = np.zeros(dim, dtype=np.complex128)
    cdef double complex[::1] o = out
    offsets = np.zeros(namps, dtype=np.int_)
    cdef long[::1] offs = offsets
    for b in range(k):
        mask |= (<Py_ssize_t>1) << (n - 1 - qs[b])
    for a in range(namps):
        off = 0
        for b in range(k):
            if a & ((<Py_ssize_t>1) << (k - 1 - b)):
                off |= (<Py_ssize_t>1) << (n - 1 - qs[b])
        offs[a] = off
    for i in range(dim):
        if i & mask:
            continue
        if s[i] == 0:
            continue
        for a in range(namps):
            o[i | offs[a]] = s[i] * amps[a]
    return out


def prob_one(state, int n, int q):
    cdef double complex[::1] s = state
    cdef Py_ssize_t half = s.shape[0] // 2
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (n - 1 - q)
    cdef Py_ssize_t k, i
    cdef double total = 0.0
    for k in range(half):
        i = _pair_low(k, stride) | stride
        total += s[i].real * s[i].real + s[i].imag * s[i].imag
    return total


def swap_overlap(state, int n, perm):
    """Return <state| P |state> for the qubit permutation ``perm``.

    ``P|state>`` has, at index ``i``, the amplitude of the index whose bit
    for qubit ``perm[p]`` equals the bit of qubit ``p`` in ``i``.
    """
    cdef double complex[::1] s = state
    cdef long[::1] pm = np.ascontiguousarray(perm, dtype=np.int64).astype(np.int_)
    cdef Py_ssize_t dim = s.shape[0]
    cdef int low = n if n < 8 else 8
    cdef Py_ssize_t lsize = (<Py_ssize_t>1) << low
    # the bit permutation distributes over OR: map the low byte by table and
    # the high part once per outer iteration
    low_table = np.zeros(lsize, dtype=np.int_)
    high_bits = np.zeros(n, dtype=np.int_)
    cdef long[::1] lt = low_table
    cdef long[::1] hb = high_bits
    cdef Py_ssize_t i, j, p, bit, hi, lo, base
    for p in range(n):
        bit = n - 1 - p
        if bit < low:
            for lo in range(lsize):
                if lo & ((<Py_ssize_t>1) << bit):
                    lt[lo] |= (<Py_ssize_t>1) << (n - 1 - pm[p])
        else:
            hb[bit - low] = (<Py_ssize_t>1) << (n - 1 - pm[p])
    # real arithmetic avoids the checked complex multiply
    cdef double re = 0.0, im = 0.0
    cdef double complex z, w
    for hi in range(dim >> low):
        base = 0
        for bit in range(n - low):
            if hi & ((<Py_ssize_t>1) << bit):
                base |= hb[bit]
        for lo in range(lsize):
            i = (hi << low) | lo
            z = s[i]
            w = s[base | lt[lo]]
            re += z.real * w.real + z.imag * w.imag
            im += z.real * w.imag - z.imag * w.real
    return complex(re, im)
