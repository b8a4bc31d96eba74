# cython: language_level=3
"""Compiled inner-loop kernels for the dephasing objectives.

Same contract as the pure fallback ``qcoh._kernels_py``: unitaries built from
the two-level-rotation parameterization, population vectors from either the
conjugation route (diag of U rho U^dag) or the direct basis-contraction route
(<b_k| rho |b_k>), and the Shannon entropy of the result.  These run a few
million times inside the multi-start searches, hence the C loops.
"""

import numpy as np

from libc.math cimport cos, sin, log2

BACKEND = "compiled"

ctypedef double complex cplx


def n_params(int d):
    return d * d - 1


def rotation_pairs(int d):
    return [(j, i) for j in range(d - 1) for i in range(j + 1, d)]


cdef void _fill_unitary(int d, const double* params, cplx* out) noexcept nogil:
    """Write the d x d unitary for one parameter block into ``out`` (row-major)."""
    cdef int i, j, k, pair, chi_off
    cdef double theta, phi, c, s
    cdef cplx ep, em, tj, ti
    for i in range(d * d):
        out[i] = 0
    out[0] = 1
    chi_off = d * (d - 1)
    for i in range(1, d):
        phi = params[chi_off + i - 1]
        out[i * d + i] = cos(phi) + 1j * sin(phi)
    pair = d * (d - 1) // 2 - 1
    for j in range(d - 2, -1, -1):
        for i in range(d - 1, j, -1):
            theta = params[2 * pair]
            phi = params[2 * pair + 1]
            c = cos(theta)
            s = sin(theta)
            ep = cos(phi) + 1j * sin(phi)
            em = cos(phi) - 1j * sin(phi)
            for k in range(d):
                tj = out[j * d + k]
                ti = out[i * d + k]
                out[j * d + k] = c * tj - s * em * ti
                out[i * d + k] = s * ep * tj + c * ti
            pair -= 1


cdef void _kron_into(const cplx* a, int m, const cplx* b, int d, cplx* out) noexcept nogil:
    """out (m*d x m*d) = kron(a (m x m), b (d x d))."""
    cdef int i1, j1, i2, j2, row, col, n = m * d
    cdef cplx av
    for i1 in range(m):
        for j1 in range(m):
            av = a[i1 * m + j1]
            for i2 in range(d):
                row = (i1 * d + i2) * n
                for j2 in range(d):
                    out[row + j1 * d + j2] = av * b[i2 * d + j2]


cdef double _entropy(const double* p, int n) noexcept nogil:
    cdef double h = 0.0
    cdef int k
    for k in range(n):
        if p[k] > 0.0:
            h -= p[k] * log2(p[k])
    return h


def unitary_from_params(int d, params):
    params = np.ascontiguousarray(params, dtype=np.float64)
    if params.shape[0] != d * d - 1:
        raise ValueError(f"expected {d * d - 1} parameters for dim {d}")
    out = np.empty((d, d), dtype=np.complex128)
    cdef double[::1] pv = params
    cdef cplx[:, ::1] ov = out
    _fill_unitary(d, &pv[0], &ov[0, 0])
    return out


def product_unitary(dims, params):
    out = None
    params = np.ascontiguousarray(params, dtype=np.float64)
    cdef int off = 0, d
    for d in dims:
        f = unitary_from_params(d, params[off:off + d * d - 1])
        off += d * d - 1
        out = f if out is None else np.kron(out, f)
    return out


def shannon_entropy(p):
    p = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[::1] pv = p
    return _entropy(&pv[0], pv.shape[0])


cdef class DephasingObjective:
    """Callable H(populations) under a parameterized product-unitary reframing.

    mode "conjugation": populations of U rho U^dag in the computational basis.
    mode "basis": populations of rho in the product basis with parameterized kets.
    """

    cdef int total, nfac, conjugation, total_params
    cdef int[::1] dims
    cdef int[::1] par_off
    cdef int[::1] fac_off
    cdef int[::1] strides
    cdef cplx[:, ::1] rho
    cdef cplx[::1] facbuf
    cdef cplx[::1] buf_a
    cdef cplx[::1] buf_b
    cdef cplx[::1] bvec
    cdef cplx[::1] wvec
    cdef double[::1] probs

    def __init__(self, rho, dims, mode="conjugation"):
        if mode not in ("conjugation", "basis"):
            raise ValueError(f"unknown mode {mode!r}")
        self.conjugation = 1 if mode == "conjugation" else 0
        # private writable copy (inputs may be read-only views)
        self.rho = np.array(rho, dtype=np.complex128, order="C", copy=True)
        dims = np.ascontiguousarray(dims, dtype=np.int32)
        self.dims = dims
        self.nfac = dims.shape[0]
        cdef int total = 1, fsz = 0, poff = 0, f
        par_off = np.zeros(self.nfac + 1, dtype=np.int32)
        fac_off = np.zeros(self.nfac + 1, dtype=np.int32)
        for f in range(self.nfac):
            par_off[f] = poff
            fac_off[f] = fsz
            poff += dims[f] * dims[f] - 1
            fsz += dims[f] * dims[f]
            total *= dims[f]
        par_off[self.nfac] = poff
        fac_off[self.nfac] = fsz
        self.par_off = par_off
        self.fac_off = fac_off
        self.total = total
        self.total_params = poff
        if self.rho.shape[0] != total or self.rho.shape[1] != total:
            raise ValueError("state dimension does not match the factor dims")
        strides = np.zeros(self.nfac, dtype=np.int32)
        cdef int s = 1
        for f in range(self.nfac - 1, -1, -1):
            strides[f] = s
            s *= dims[f]
        self.strides = strides
        self.facbuf = np.zeros(fsz, dtype=np.complex128)
        self.buf_a = np.zeros(total * total, dtype=np.complex128)
        self.buf_b = np.zeros(total * total, dtype=np.complex128)
        self.bvec = np.zeros(total, dtype=np.complex128)
        self.wvec = np.zeros(total, dtype=np.complex128)
        self.probs = np.zeros(total, dtype=np.float64)

    cdef void _build_factors(self, const double* params) noexcept nogil:
        cdef int f
        for f in range(self.nfac):
            _fill_unitary(self.dims[f], params + self.par_off[f],
                          &self.facbuf[0] + self.fac_off[f])

    cdef const cplx* _assemble_product(self) noexcept nogil:
        """Kron-accumulate the factors; returns the buffer holding the result."""
        cdef int f, m = self.dims[0], d, i
        cdef cplx* acc = &self.buf_a[0]
        cdef cplx* alt = &self.buf_b[0]
        cdef cplx* tmp
        for i in range(m * m):
            acc[i] = self.facbuf[i]
        for f in range(1, self.nfac):
            d = self.dims[f]
            _kron_into(acc, m, &self.facbuf[0] + self.fac_off[f], d, alt)
            m *= d
            tmp = acc
            acc = alt
            alt = tmp
        return acc

    cdef void _conjugation_probs(self, const cplx* u) noexcept nogil:
        # p_k = Re sum_s (U rho)[k,s] * conj(U[k,s])
        cdef int k, r, s, n = self.total
        cdef cplx acc, t
        for k in range(n):
            acc = 0
            for s in range(n):
                t = 0
                for r in range(n):
                    t = t + u[k * n + r] * self.rho[r, s]
                acc = acc + t * (u[k * n + s].real - 1j * u[k * n + s].imag)
            self.probs[k] = acc.real

    cdef void _basis_probs(self) noexcept nogil:
        # p_k = <b_k| rho |b_k>, b_k the Kronecker product of factor columns
        cdef int k, r, s, f, kf, rf, n = self.total
        cdef cplx amp, acc
        for k in range(n):
            for r in range(n):
                amp = 1
                for f in range(self.nfac):
                    kf = (k // self.strides[f]) % self.dims[f]
                    rf = (r // self.strides[f]) % self.dims[f]
                    amp = amp * self.facbuf[self.fac_off[f] + rf * self.dims[f] + kf]
                self.bvec[r] = amp
            for r in range(n):
                acc = 0
                for s in range(n):
                    acc = acc + self.rho[r, s] * self.bvec[s]
                self.wvec[r] = acc
            acc = 0
            for r in range(n):
                acc = acc + (self.bvec[r].real - 1j * self.bvec[r].imag) * self.wvec[r]
            self.probs[k] = acc.real

    cpdef double value(self, x):
        arr = np.ascontiguousarray(x, dtype=np.float64)
        if not arr.flags.writeable:
            arr = arr.copy()
        cdef double[::1] params = arr
        if params.shape[0] != self.total_params:
            raise ValueError(f"expected {self.total_params} parameters")
        cdef const cplx* u
        with nogil:
            self._build_factors(&params[0])
            if self.conjugation:
                u = self._assemble_product()
                self._conjugation_probs(u)
            else:
                self._basis_probs()
        return _entropy(&self.probs[0], self.total)

    def __call__(self, x):
        return self.value(x)

    def probabilities(self, x):
        """Population vector for the given parameters (diagnostic path)."""
        self.value(x)
        return np.asarray(self.probs).copy()


def conjugation_probs(rho, dims, params):
    obj = DephasingObjective(rho, dims, "conjugation")
    return obj.probabilities(params)


def basis_probs(rho, dims, params):
    obj = DephasingObjective(rho, dims, "basis")
    return obj.probabilities(params)
