"""Pure-numpy fallback for the optimizer inner-loop kernels.

Semantics mirror the compiled extension ``qcoh._kernels`` exactly; see
``qcoh.kernels`` for the import-time selection.

A d-dimensional unitary is parameterized by d*d - 1 reals: one (theta, phi)
pair per two-level rotation, pairs enumerated over column-major elimination
order (0,1), (0,2), ..., (d-2, d-1), followed by d-1 diagonal phases (the
global phase is fixed).  The map is onto the unitary group modulo global
phase, with a bounded box theta in [0, pi/2], phi/chi in [0, 2*pi).
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def n_params(d: int) -> int:
    return d * d - 1


def rotation_pairs(d: int) -> list[tuple[int, int]]:
    return [(j, i) for j in range(d - 1) for i in range(j + 1, d)]


def unitary_from_params(d: int, params) -> np.ndarray:
    """Unitary from the two-level-rotation parameterization."""
    params = np.asarray(params, dtype=float)
    if params.shape != (n_params(d),):
        raise ValueError(f"expected {n_params(d)} parameters for dim {d}, got {params.shape}")
    pairs = rotation_pairs(d)
    chi = params[2 * len(pairs):]
    u = np.zeros((d, d), dtype=np.complex128)
    u[0, 0] = 1.0
    for i in range(1, d):
        u[i, i] = np.exp(1j * chi[i - 1])
    # left-apply rotations in reverse enumeration order: U = G_1 ... G_m D
    for idx in range(len(pairs) - 1, -1, -1):
        j, i = pairs[idx]
        theta, phi = params[2 * idx], params[2 * idx + 1]
        c, s = np.cos(theta), np.sin(theta)
        ep = np.exp(1j * phi)
        rj = u[j, :].copy()
        ri = u[i, :].copy()
        u[j, :] = c * rj - s * np.conj(ep) * ri
        u[i, :] = s * ep * rj + c * ri
    return u


def product_unitary(dims, params) -> np.ndarray:
    """Kronecker product of per-factor unitaries, params concatenated."""
    dims = [int(d) for d in dims]
    out = None
    off = 0
    for d in dims:
        k = n_params(d)
        f = unitary_from_params(d, np.asarray(params, dtype=float)[off:off + k])
        off += k
        out = f if out is None else np.kron(out, f)
    return out


def conjugation_probs(rho, dims, params) -> np.ndarray:
    """Populations diag(U rho U^dag) for the product unitary U."""
    u = product_unitary(dims, params)
    t = u @ np.asarray(rho)
    return np.real(np.einsum("ks,ks->k", t, u.conj()))


def basis_probs(rho, dims, params) -> np.ndarray:
    """Populations <b_k| rho |b_k> for the product basis with factor columns as kets."""
    dims = [int(d) for d in dims]
    rho = np.asarray(rho)
    factors = []
    off = 0
    for d in dims:
        k = n_params(d)
        factors.append(unitary_from_params(d, np.asarray(params, dtype=float)[off:off + k]))
        off += k
    b = factors[0]
    for f in factors[1:]:
        b = np.kron(b, f)
    return np.real(np.einsum("rk,rs,sk->k", b.conj(), rho, b))


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum()) if nz.size else 0.0


class DephasingObjective:
    """Callable H(populations) of a state reframed by parameterized product unitaries.

    mode "conjugation": populations of U rho U^dag in the computational basis.
    mode "basis": populations of rho in the product basis with parameterized kets.
    """

    def __init__(self, rho, dims, mode="conjugation"):
        if mode not in ("conjugation", "basis"):
            raise ValueError(f"unknown mode {mode!r}")
        self.rho = np.ascontiguousarray(rho, dtype=np.complex128)
        self.dims = tuple(int(d) for d in dims)
        self.mode = mode
        self.total_params = sum(n_params(d) for d in self.dims)

    def __call__(self, x) -> float:
        if self.mode == "conjugation":
            p = conjugation_probs(self.rho, self.dims, x)
        else:
            p = basis_probs(self.rho, self.dims, x)
        return shannon_entropy(p)
