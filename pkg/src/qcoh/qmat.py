"""Dense complex linear algebra for multi-qudit operators.

States live on a tensor product of labeled subsystems with row-major index
ordering (leftmost label is the most significant digit of the basis index,
so two qubits enumerate ``|00>, |01>, |10>, |11>``).  All entropies are in
bits (base-2 logarithms) with the convention ``0 log 0 = 0``.

Everything here is a pure function of immutable inputs: wrapped arrays are
copied once and marked read-only, and random generators are seeded per call.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

# Validation tolerances (max-norm unless stated otherwise).
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-10          # smallest eigenvalue >= -TOL_PSD
TOL_PURE_NORM = 1e-12    # | ||psi|| - 1 |
TOL_UNITARY = 1e-10
SUPPORT_TOL = 1e-10      # eigenvalue threshold deciding support membership

LOG2 = math.log(2.0)


class ValidationError(ValueError):
    """An input violates a structural invariant (shape, Hermiticity, ...)."""


def _readonly_complex(data) -> np.ndarray:
    out = np.array(data, dtype=np.complex128, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SubsystemShape:
    """Ordered local dimensions and unique labels of a multi-qudit space."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        if len(self.dims) != len(self.labels):
            raise ValidationError("dims and labels must have equal length")
        if not self.dims:
            raise ValidationError("at least one subsystem required")
        if any(d < 1 for d in self.dims):
            raise ValidationError("local dimensions must be positive")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"labels must be unique, got {self.labels}")

    @classmethod
    def qubits(cls, n: int, labels=None) -> "SubsystemShape":
        if labels is None:
            labels = tuple(chr(ord("A") + i) for i in range(n))
        return cls(dims=(2,) * n, labels=tuple(labels))

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown label {label!r}; have {self.labels}") from None

    def restrict(self, keep_labels) -> "SubsystemShape":
        keep = [l for l in self.labels if l in set(keep_labels)]
        return SubsystemShape(
            dims=tuple(self.dims[self.position(l)] for l in keep),
            labels=tuple(keep),
        )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, PSD operator on a labeled tensor-product space."""

    shape: SubsystemShape
    data: np.ndarray

    def __post_init__(self):
        data = _readonly_complex(self.data)
        object.__setattr__(self, "data", data)
        d = self.shape.dim
        if data.shape != (d, d):
            raise ValidationError(f"matrix shape {data.shape} != subsystem dim {d}")
        herm = np.max(np.abs(data - data.conj().T))
        if herm > TOL_HERM:
            raise ValidationError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = data.trace()
        if abs(tr - 1.0) > TOL_TRACE:
            raise ValidationError(f"trace {tr:.12g} not within {TOL_TRACE} of 1")
        lo = float(np.linalg.eigvalsh(data)[0])
        if lo < -TOL_PSD:
            raise ValidationError(f"not PSD: min eigenvalue {lo:.3e}")

    @property
    def dim(self) -> int:
        return self.shape.dim


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector on a labeled tensor-product space."""

    shape: SubsystemShape
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=np.complex128).ravel()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        if amp.shape != (self.shape.dim,):
            raise ValidationError(f"amplitude length {amp.shape} != dim {self.shape.dim}")
        nrm = np.linalg.norm(amp)
        if abs(nrm - 1.0) > TOL_PURE_NORM:
            raise ValidationError(f"norm {nrm:.15g} not within {TOL_PURE_NORM} of 1")

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.shape, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Square unitary, optionally carrying its per-subsystem tensor factors."""

    data: np.ndarray
    factors: tuple | None = field(default=None)

    def __post_init__(self):
        data = _readonly_complex(self.data)
        object.__setattr__(self, "data", data)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValidationError(f"unitary must be square, got {data.shape}")
        d = data.shape[0]
        err = np.max(np.abs(data.conj().T @ data - np.eye(d)))
        if err > TOL_UNITARY:
            raise ValidationError(f"not unitary: max |U^dag U - I| = {err:.3e}")
        if self.factors is not None:
            facs = tuple(_readonly_complex(f) for f in self.factors)
            object.__setattr__(self, "factors", facs)
            prod = facs[0]
            for f in facs[1:]:
                prod = np.kron(prod, f)
            if prod.shape != data.shape or np.max(np.abs(prod - data)) > TOL_UNITARY:
                raise ValidationError("factorization does not reproduce the matrix")

    @property
    def dim(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True, eq=False)
class LocalBasisAssignment:
    """A product orthonormal basis fixing the incoherence reference frame.

    Either the computational sentinel (``factors is None``) or one unitary
    per subsystem whose columns are the local basis kets.
    """

    factors: tuple | None = None

    def __post_init__(self):
        if self.factors is not None:
            facs = []
            for f in self.factors:
                u = _readonly_complex(f)
                if u.ndim != 2 or u.shape[0] != u.shape[1]:
                    raise ValidationError("basis factors must be square")
                err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
                if err > TOL_UNITARY:
                    raise ValidationError(f"basis factor not unitary: residual {err:.3e}")
                facs.append(u)
            object.__setattr__(self, "factors", tuple(facs))

    @classmethod
    def computational(cls) -> "LocalBasisAssignment":
        return cls(factors=None)

    @classmethod
    def from_factors(cls, factors) -> "LocalBasisAssignment":
        return cls(factors=tuple(factors))

    @property
    def is_computational(self) -> bool:
        return self.factors is None

    def matrix(self, dims) -> np.ndarray:
        """Full-space basis matrix (columns = product kets) for ``dims``."""
        dims = tuple(int(d) for d in dims)
        if self.factors is None:
            return np.eye(int(np.prod(dims)), dtype=np.complex128)
        if len(self.factors) != len(dims) or any(
            f.shape[0] != d for f, d in zip(self.factors, dims)
        ):
            raise ValidationError(
                f"basis factor dims {tuple(f.shape[0] for f in self.factors)} "
                f"do not match subsystem dims {dims}"
            )
        out = self.factors[0]
        for f in self.factors[1:]:
            out = np.kron(out, f)
        return out

    def restrict(self, shape: SubsystemShape, keep_labels) -> "LocalBasisAssignment":
        """Induced basis on the marginal obtained by keeping ``keep_labels``."""
        if self.factors is None:
            return self
        keep = set(keep_labels)
        facs = [self.factors[i] for i, l in enumerate(shape.labels) if l in keep]
        return LocalBasisAssignment(factors=tuple(facs))


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def tensor(a, b):
    """Kronecker product with concatenated subsystem bookkeeping.

    Accepts a pair of DensityMatrix / PureState / UnitaryMatrix, or plain
    arrays (returning a plain array).
    """
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        shape = _concat_shapes(a.shape, b.shape)
        return DensityMatrix(shape, np.kron(a.data, b.data))
    if isinstance(a, PureState) and isinstance(b, PureState):
        shape = _concat_shapes(a.shape, b.shape)
        return PureState(shape, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, UnitaryMatrix) and isinstance(b, UnitaryMatrix):
        fa = a.factors if a.factors is not None else (a.data,)
        fb = b.factors if b.factors is not None else (b.data,)
        return UnitaryMatrix(np.kron(a.data, b.data), factors=fa + fb)
    return np.kron(np.asarray(a), np.asarray(b))


def _concat_shapes(sa: SubsystemShape, sb: SubsystemShape) -> SubsystemShape:
    if set(sa.labels) & set(sb.labels):
        raise ValidationError(
            f"label collision in tensor product: {set(sa.labels) & set(sb.labels)}"
        )
    return SubsystemShape(dims=sa.dims + sb.dims, labels=sa.labels + sb.labels)


def partial_trace(rho: DensityMatrix, traced_labels) -> DensityMatrix:
    """Trace out the subsystems named in ``traced_labels``.

    Parameters
    ----------
    rho : DensityMatrix
    traced_labels : iterable of str
        Labels to remove.  Must be a proper, nonempty subset of the state's
        labels.

    Returns
    -------
    DensityMatrix on the remaining labels, in their original order.
    """
    traced = set(traced_labels)
    labels = rho.shape.labels
    unknown = traced - set(labels)
    if unknown:
        raise ValidationError(f"unknown labels {sorted(unknown)}; have {labels}")
    keep = [l for l in labels if l not in traced]
    if not keep:
        raise ValidationError("cannot trace out every subsystem")

    n = rho.shape.n_subsystems
    dims = rho.shape.dims
    tens = rho.data.reshape(dims + dims)
    # einsum with repeated indices on the traced bra/ket axis pairs
    bra = list(range(n))
    ket = [i + n if labels[i] not in traced else i for i in range(n)]
    out_axes = [i for i in range(n) if labels[i] not in traced]
    out = out_axes + [i + n for i in out_axes]
    reduced = np.einsum(tens, bra + ket, out)
    new_shape = rho.shape.restrict(keep)
    d = new_shape.dim
    return DensityMatrix(new_shape, reduced.reshape(d, d))


def dephase(rho: DensityMatrix, basis: LocalBasisAssignment | None = None) -> DensityMatrix:
    """Project a state onto its diagonal in the given product basis.

    The result is expressed back in the computational frame, so it is a fixed
    point of repeated dephasing and trace preserving by construction.
    """
    if basis is None or basis.is_computational:
        out = np.diag(np.diag(rho.data))
    else:
        b = basis.matrix(rho.shape.dims)
        probs = np.real(np.einsum("ij,jk,ki->i", b.conj().T, rho.data, b))
        out = (b * probs) @ b.conj().T
        out = 0.5 * (out + out.conj().T)
    return DensityMatrix(rho.shape, out)


def dephased_probs(rho: DensityMatrix, basis: LocalBasisAssignment | None = None) -> np.ndarray:
    """Populations of the state in the given product basis."""
    if basis is None or basis.is_computational:
        return np.real(np.diag(rho.data)).copy()
    b = basis.matrix(rho.shape.dims)
    return np.real(np.einsum("ij,jk,ki->i", b.conj().T, rho.data, b))


def eig_hermitian(m) -> tuple[np.ndarray, UnitaryMatrix]:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending."""
    data = m.data if hasattr(m, "data") else np.asarray(m, dtype=np.complex128)
    herm = np.max(np.abs(data - data.conj().T))
    if herm > TOL_HERM:
        raise ValidationError(f"not Hermitian: max |M - M^dag| = {herm:.3e}")
    w, v = np.linalg.eigh(data)
    return w, UnitaryMatrix(v)


def clip_spectrum(w: np.ndarray) -> np.ndarray:
    """Clip eigenvalue jitter in [-1e-10, 0) to 0 and cap at 1 for entropy use."""
    return np.clip(w, 0.0, 1.0)


def shannon(probs) -> float:
    """Shannon entropy in bits of a (sub)probability vector; 0 log 0 = 0."""
    p = clip_spectrum(np.asarray(probs, dtype=float))
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum()) if nz.size else 0.0


def entropy(rho) -> float:
    """Von Neumann entropy S(rho) in bits."""
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return shannon(np.linalg.eigvalsh(data))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Quantum relative entropy S(rho || sigma) in bits.

    Returns ``inf`` when the support of ``rho`` is not contained in the
    support of ``sigma`` (membership decided at eigenvalue threshold
    ``SUPPORT_TOL``).
    """
    if rho.data.shape != sigma.data.shape:
        raise ValidationError(
            f"dimension mismatch {rho.data.shape} vs {sigma.data.shape}"
        )
    p = clip_spectrum(np.linalg.eigvalsh(rho.data))
    q, v = np.linalg.eigh(sigma.data)
    q = clip_spectrum(q)
    # weight of rho along each eigenvector of sigma
    w = np.real(np.einsum("ij,jk,ki->i", v.conj().T, rho.data, v))
    outside = q <= SUPPORT_TOL
    if np.any(w[outside] > SUPPORT_TOL):
        return math.inf
    plogp = float((p[p > 0] * np.log2(p[p > 0])).sum())
    inside = ~outside
    plogq = float((w[inside] * np.log2(q[inside])).sum())
    val = plogp - plogq
    if -1e-9 < val < 0.0:  # Klein inequality up to roundoff
        val = 0.0
    return val


def conjugate(rho: DensityMatrix, u: UnitaryMatrix) -> DensityMatrix:
    """U rho U^dag; the spectrum is preserved."""
    if u.dim != rho.dim:
        raise ValidationError(f"dimension mismatch: state {rho.dim}, unitary {u.dim}")
    out = u.data @ rho.data @ u.data.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(rho.shape, out)


def apply_to_pure(psi: PureState, u: UnitaryMatrix) -> PureState:
    if u.dim != psi.shape.dim:
        raise ValidationError(f"dimension mismatch: state {psi.shape.dim}, unitary {u.dim}")
    return PureState(psi.shape, u.data @ psi.amplitudes)


# ---------------------------------------------------------------------------
# Random sampling (deterministic under seed)
# ---------------------------------------------------------------------------

def _complex_gaussian(rng, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_state(shape, rank: int | None = None, seed: int = 0) -> DensityMatrix:
    """Random density matrix G G^dag / tr(G G^dag), G a dim x rank Ginibre matrix.

    ``shape`` may be a SubsystemShape or a dims sequence (labels are then
    generated as A, B, C, ...).
    """
    if not isinstance(shape, SubsystemShape):
        dims = tuple(int(d) for d in shape)
        shape = SubsystemShape(dims, tuple(chr(ord("A") + i) for i in range(len(dims))))
    d = shape.dim
    if rank is None:
        rank = d
    if not 1 <= rank <= d:
        raise ValidationError(f"rank must be in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    g = _complex_gaussian(rng, (d, rank))
    m = g @ g.conj().T
    return DensityMatrix(shape, m / m.trace().real)


def random_unitary(dim: int, seed: int = 0) -> UnitaryMatrix:
    """Approximately Haar-distributed unitary from a phase-fixed QR."""
    rng = np.random.default_rng(seed)
    return UnitaryMatrix(_haar_from_rng(rng, dim))


def _haar_from_rng(rng, dim: int) -> np.ndarray:
    g = _complex_gaussian(rng, (dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    ph = d / np.abs(d)
    return q * ph


def random_pure(shape, seed: int = 0) -> PureState:
    """Haar-random pure state on the given subsystem shape."""
    if not isinstance(shape, SubsystemShape):
        dims = tuple(int(d) for d in shape)
        shape = SubsystemShape(dims, tuple(chr(ord("A") + i) for i in range(len(dims))))
    rng = np.random.default_rng(seed)
    v = _complex_gaussian(rng, shape.dim)
    return PureState(shape, v / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# Interchange format: {"dims": [...], "labels": [...], "re": [[...]], "im": [[...]]}
# ---------------------------------------------------------------------------

def matrix_to_doc(data: np.ndarray, dims, labels) -> dict:
    m = np.asarray(data, dtype=np.complex128)
    return {
        "dims": [int(d) for d in dims],
        "labels": [str(l) for l in labels],
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def doc_to_matrix(doc: dict) -> tuple[np.ndarray, SubsystemShape]:
    """Parse an interchange document, rejecting shape-inconsistent input."""
    for key in ("dims", "labels", "re", "im"):
        if key not in doc:
            raise ValidationError(f"interchange document missing field {key!r}")
    shape = SubsystemShape(tuple(doc["dims"]), tuple(doc["labels"]))
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc["im"], dtype=float)
    if re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {re.shape}")
    if im.shape != re.shape:
        raise ValidationError(f"re shape {re.shape} != im shape {im.shape}")
    if re.shape[0] != shape.dim:
        raise ValidationError(
            f"matrix dimension {re.shape[0]} inconsistent with dims product {shape.dim}"
        )
    return re + 1j * im, shape


def state_to_doc(rho: DensityMatrix) -> dict:
    return matrix_to_doc(rho.data, rho.shape.dims, rho.shape.labels)


def doc_to_state(doc: dict) -> DensityMatrix:
    data, shape = doc_to_matrix(doc)
    return DensityMatrix(shape, data)


def save_state(path, rho: DensityMatrix) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_doc(rho), fh, sort_keys=True)
        fh.write("\n")


def load_state(path) -> DensityMatrix:
    with open(path) as fh:
        return doc_to_state(json.load(fh))


def unitary_to_doc(u: UnitaryMatrix, dims=None, labels=None) -> dict:
    d = u.dim
    if dims is None:
        dims, labels = [d], ["A"]
    return matrix_to_doc(u.data, dims, labels)


def doc_to_unitary(doc: dict) -> UnitaryMatrix:
    data, _ = doc_to_matrix(doc)
    return UnitaryMatrix(data)


def load_unitary(path) -> UnitaryMatrix:
    with open(path) as fh:
        return doc_to_unitary(json.load(fh))
