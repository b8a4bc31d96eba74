"""Coherence creation by two-qubit unitaries.

Given a diagonal input spectrum, three gate families admit closed-form
optimal coherence gains: one-side local rotations, two-side local rotations,
and the nonlocal Cartan kernel of the gate's canonical decomposition.  All
three optima are computed here as entropy differences S(best diagonal
mixture) - S(spectrum); see README.md, section "Sign convention for the
closed-form optima", for the sign discrepancy between this form and a
commonly printed polynomial display of the same quantities (the brute-force
grid oracles in the test suite agree with the entropy-difference form).

The module also provides the Cartan kernel constructor with magic-basis
diagnostics, numeric optimizers for each family (oracles for the closed
forms), and the coherent power of an arbitrary two-qubit gate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .measures import MeasureReport, OptimizerConfig, _multi_start
from .qmat import (
    DensityMatrix,
    PureState,
    SubsystemShape,
    UnitaryMatrix,
    ValidationError,
    shannon,
)

TOL_CHAMBER = 1e-12
TOL_ORDERING = 1e-9


@dataclass(frozen=True, eq=False)
class DiagonalSpectrum:
    """Four nonnegative weights summing to 1, stored ascending."""

    delta: tuple[float, float, float, float]

    def __post_init__(self):
        vals = tuple(float(x) for x in self.delta)
        if len(vals) != 4:
            raise ValidationError(f"spectrum needs 4 entries, got {len(vals)}")
        if min(vals) < -1e-12:
            raise ValidationError(f"negative weight {min(vals):.3e}")
        if abs(sum(vals) - 1.0) > 1e-12:
            raise ValidationError(f"weights sum to {sum(vals):.15g}, not 1")
        srt = tuple(sorted(max(v, 0.0) for v in vals))
        if srt != vals:
            warnings.warn("spectrum entries were not ascending; sorted them", stacklevel=3)
        object.__setattr__(self, "delta", srt)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.delta)

    def entropy(self) -> float:
        return shannon(self.array)

    def state(self) -> DensityMatrix:
        return DensityMatrix(SubsystemShape.qubits(2), np.diag(self.array.astype(complex)))


@dataclass(frozen=True)
class CartanVector:
    """Canonical two-qubit interaction coefficients inside the Weyl chamber."""

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        ok = (
            abs(self.c3) <= self.c2 + TOL_CHAMBER
            and self.c2 <= self.c1 + TOL_CHAMBER
            and self.c1 <= math.pi / 4 + TOL_CHAMBER
            and self.c2 >= -TOL_CHAMBER
        )
        if not ok:
            raise ValidationError(
                f"({self.c1}, {self.c2}, {self.c3}) violates 0 <= |c3| <= c2 <= c1 <= pi/4"
            )

    @property
    def array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])


def hadamard_like() -> UnitaryMatrix:
    """The rotation (1/sqrt2)[[1, 1], [-1, 1]] sending |0> to |-> and |1> to |+>."""
    return UnitaryMatrix(np.array([[1, 1], [-1, 1]], dtype=complex) / np.sqrt(2))


def maximally_coherent_state(d: int) -> PureState:
    """Uniform-amplitude superposition with coherence log2(d)."""
    if d < 1:
        raise ValidationError("dimension must be >= 1")
    amp = np.full(d, 1.0 / np.sqrt(d), dtype=complex)
    return PureState(SubsystemShape((d,), ("A",)), amp)


# ---------------------------------------------------------------------------
# Closed-form optima (entropy differences)
# ---------------------------------------------------------------------------

def copt_one_side(delta: DiagonalSpectrum) -> float:
    """Best coherence from U_A (x) I on the given spectrum; optimum at |a|^2 = 1/2."""
    d1, d2, d3, d4 = delta.delta
    best_diag = [(d1 + d3) / 2, (d2 + d4) / 2, (d1 + d3) / 2, (d2 + d4) / 2]
    return shannon(best_diag) - delta.entropy()


def copt_two_side(delta: DiagonalSpectrum) -> float:
    """Best coherence from U_A (x) U_B: the full 2 bits minus the input entropy."""
    return 2.0 - delta.entropy()


def copt_kernel(delta: DiagonalSpectrum) -> float:
    """Best coherence from a Cartan kernel; attained at (pi/4, 0, 0)."""
    d1, d2, d3, d4 = delta.delta
    best_diag = [(d1 + d4) / 2, (d2 + d3) / 2, (d2 + d3) / 2, (d1 + d4) / 2]
    return shannon(best_diag) - delta.entropy()


@dataclass
class OrderingReport:
    one_side: float
    kernel: float
    two_side: float


def copt_ordering(delta: DiagonalSpectrum) -> OrderingReport:
    """All three optima, asserting one_side <= kernel <= two_side."""
    c1 = copt_one_side(delta)
    c3 = copt_kernel(delta)
    c2 = copt_two_side(delta)
    if not (c1 <= c3 + TOL_ORDERING and c3 <= c2 + 2 * TOL_ORDERING and c1 >= -TOL_ORDERING):
        raise RuntimeError(f"optimum ordering violated: {c1}, {c3}, {c2}")
    return OrderingReport(one_side=c1, kernel=c3, two_side=c2)


# ---------------------------------------------------------------------------
# Cartan kernel and magic-basis diagnostics
# ---------------------------------------------------------------------------

def cartan_kernel(c) -> UnitaryMatrix:
    """The canonical nonlocal kernel exp(-i sum_j c_j sigma_j (x) sigma_j).

    Entries follow the closed matrix form in the computational basis; the
    result is diagonal in the magic basis with phases exp(-i lambda_k).
    """
    if not isinstance(c, CartanVector):
        c = CartanVector(*c)
    cm = math.cos(c.c1 - c.c2)
    sm = math.sin(c.c1 - c.c2)
    cp = math.cos(c.c1 + c.c2)
    sp = math.sin(c.c1 + c.c2)
    em = np.exp(-1j * c.c3)
    ep = np.exp(1j * c.c3)
    u = np.array(
        [
            [em * cm, 0, 0, -1j * em * sm],
            [0, ep * cp, -1j * ep * sp, 0],
            [0, -1j * ep * sp, ep * cp, 0],
            [-1j * em * sm, 0, 0, em * cm],
        ],
        dtype=complex,
    )
    return UnitaryMatrix(u)


def magic_basis() -> np.ndarray:
    """Columns: the phase-adjusted Bell states diagonalizing every Cartan kernel."""
    s = 1.0 / np.sqrt(2)
    phi_p = np.array([1, 0, 0, 1], dtype=complex) * s
    phi_m = np.array([1, 0, 0, -1], dtype=complex) * s
    psi_p = np.array([0, 1, 1, 0], dtype=complex) * s
    psi_m = np.array([0, 1, -1, 0], dtype=complex) * s
    return np.column_stack([phi_p, -1j * phi_m, psi_m, -1j * psi_p])


def magic_phases(c) -> np.ndarray:
    """The four kernel eigenphases lambda_k in magic-basis order."""
    if not isinstance(c, CartanVector):
        c = CartanVector(*c)
    return np.array(
        [
            c.c1 - c.c2 + c.c3,
            -c.c1 + c.c2 + c.c3,
            -c.c1 - c.c2 - c.c3,
            c.c1 + c.c2 - c.c3,
        ]
    )


def magic_diagonality_residual(u: UnitaryMatrix) -> float:
    """Max off-diagonal magnitude of the gate expressed in the magic basis."""
    m = magic_basis()
    d = m.conj().T @ u.data @ m
    return float(np.max(np.abs(d - np.diag(np.diag(d)))))


def bell_diagonal_image_check(delta: DiagonalSpectrum, tol: float = 1e-10) -> bool:
    """Check the CNOT-kernel image of a diagonal state is diagonal in the
    maximally entangled basis built from the kernel's basis-state images,
    with the original weights."""
    u = cartan_kernel((math.pi / 4, 0.0, 0.0))
    out = u.data @ np.diag(delta.array.astype(complex)) @ u.data.conj().T
    s = 1.0 / np.sqrt(2)
    w = np.column_stack(
        [
            np.array([1, 0, 0, -1j], dtype=complex) * s,
            np.array([0, 1, -1j, 0], dtype=complex) * s,
            np.array([0, -1j, 1, 0], dtype=complex) * s,
            np.array([-1j, 0, 0, 1], dtype=complex) * s,
        ]
    )
    d = w.conj().T @ out @ w
    off = np.max(np.abs(d - np.diag(np.diag(d))))
    weights_ok = np.max(np.abs(np.real(np.diag(d)) - delta.array)) <= tol
    return bool(off <= tol and weights_ok)


# ---------------------------------------------------------------------------
# Numeric optimizers (oracle companions to the closed forms)
# ---------------------------------------------------------------------------

FAMILIES = ("one_side", "two_side", "kernel", "full_u4")


def chamber_from_unit_cube(u: np.ndarray) -> CartanVector:
    """Map the unit cube onto the Weyl chamber (smooth and surjective)."""
    v = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    c1 = v[0] * math.pi / 4
    c2 = c1 * v[1]
    c3 = c2 * (2 * v[2] - 1)
    return CartanVector(c1, c2, c3)


def _kernel_probs(c: CartanVector, delta: np.ndarray) -> np.ndarray:
    u = cartan_kernel(c)
    return np.abs(u.data) ** 2 @ delta


def family_unitary(family: str, params: np.ndarray) -> UnitaryMatrix:
    """Materialize the gate a numeric-optimum parameter vector describes."""
    params = np.asarray(params, dtype=float)
    if family == "one_side":
        ua = kernels.unitary_from_params(2, params)
        return UnitaryMatrix(np.kron(ua, np.eye(2)), factors=(ua, np.eye(2, dtype=complex)))
    if family == "two_side":
        ua = kernels.unitary_from_params(2, params[:3])
        ub = kernels.unitary_from_params(2, params[3:])
        return UnitaryMatrix(np.kron(ua, ub), factors=(ua, ub))
    if family == "kernel":
        return cartan_kernel(chamber_from_unit_cube(params))
    if family == "full_u4":
        return UnitaryMatrix(kernels.unitary_from_params(4, params))
    raise ValidationError(f"unknown family {family!r}; choose from {FAMILIES}")


def copt_numeric(
    delta: DiagonalSpectrum, family: str, optimizer: OptimizerConfig | None = None
) -> MeasureReport:
    """Max coherence over the family by multi-start search.

    For one_side / two_side / kernel this must agree with the closed forms;
    full_u4 searches all 4x4 unitaries and upper-bounds the other three.
    """
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}; choose from {FAMILIES}")
    cfg = optimizer or OptimizerConfig(restarts=64 if family == "full_u4" else 32)
    s_delta = delta.entropy()
    rho = np.diag(delta.array.astype(complex))

    if family in ("one_side", "two_side"):
        obj = kernels.DephasingObjective(rho, np.array([2, 2], dtype=np.int32), "conjugation")
        if family == "one_side":
            pad = np.zeros(3)
            fun = lambda x: -obj(np.concatenate([x, pad]))
            lo, hi = _unitary_box((2,))
        else:
            fun = lambda x: -obj(x)
            lo, hi = _unitary_box((2, 2))
    elif family == "full_u4":
        obj = kernels.DephasingObjective(rho, np.array([4], dtype=np.int32), "conjugation")
        fun = lambda x: -obj(x)
        lo, hi = _unitary_box((4,))
    else:  # kernel
        darr = delta.array
        fun = lambda x: -shannon(_kernel_probs(chamber_from_unit_cube(x), darr))
        lo, hi = np.zeros(3), np.ones(3)

    x, f, iters, step, ok = _multi_start(fun, lo, hi, cfg, first_starts=[np.zeros(lo.size)])
    return MeasureReport(
        value=-f - s_delta,
        arg=np.asarray(x),
        restarts=cfg.restarts,
        iterations=iters,
        final_step=step,
        seed=cfg.seed,
        converged=ok,
    )


def _unitary_box(dims):
    lo, hi = [], []
    for d in dims:
        n_rot = d * (d - 1) // 2
        hi += [np.pi / 2, 2 * np.pi] * n_rot + [2 * np.pi] * (d - 1)
        lo += [0.0] * (d * d - 1)
    return np.array(lo), np.array(hi)


# ---------------------------------------------------------------------------
# Coherent power
# ---------------------------------------------------------------------------

def coherent_power(
    u: UnitaryMatrix, mode: str = "incoherent_inputs", optimizer: OptimizerConfig | None = None
) -> MeasureReport:
    """Maximum coherence a two-qubit gate creates.

    mode "incoherent_inputs": max over diagonal inputs of C(U delta U^dag);
    mode "all_inputs": max over all states of C(U rho U^dag) - C(rho).
    """
    if u.dim != 4:
        raise ValidationError("coherent power is implemented for two-qubit gates")
    if mode not in ("incoherent_inputs", "all_inputs"):
        raise ValidationError(f"unknown mode {mode!r}")
    w = np.abs(u.data) ** 2

    if mode == "incoherent_inputs":
        cfg = optimizer or OptimizerConfig(restarts=32)

        def fun(x):
            x = np.asarray(x, dtype=float)
            nrm = np.dot(x, x)
            if nrm < 1e-300:
                return 0.0
            delta = x * x / nrm
            return -(shannon(w @ delta) - shannon(delta))

        lo, hi = np.zeros(4), np.ones(4)
        vertices = [np.eye(4)[i] for i in range(4)]
        x, f, iters, step, ok = _multi_start(fun, lo, hi, cfg, first_starts=vertices)
        delta = x * x / np.dot(x, x)
        arg = np.asarray(delta)
    else:
        cfg = optimizer or OptimizerConfig(restarts=64)
        nu = kernels.n_params(4)

        def fun(x):
            x = np.asarray(x, dtype=float)
            v = kernels.unitary_from_params(4, x[:nu])
            xs = x[nu:]
            nrm = np.dot(xs, xs)
            if nrm < 1e-300:
                return 0.0
            delta = xs * xs / nrm
            p_in = np.abs(v) ** 2 @ delta
            p_out = np.abs(u.data @ v) ** 2 @ delta
            return -(shannon(p_out) - shannon(p_in))

        blo, bhi = _unitary_box((4,))
        lo = np.concatenate([blo, np.zeros(4)])
        hi = np.concatenate([bhi, np.ones(4)])
        first = [np.concatenate([np.zeros(nu), np.eye(4)[i]]) for i in range(4)]
        x, f, iters, step, ok = _multi_start(fun, lo, hi, cfg, first_starts=first)
        arg = np.asarray(x)

    return MeasureReport(
        value=-f,
        arg=arg,
        restarts=cfg.restarts,
        iterations=iters,
        final_step=step,
        seed=cfg.seed,
        converged=ok,
    )


def random_spectrum(seed: int = 0) -> DiagonalSpectrum:
    """Uniform random point of the 3-simplex, sorted ascending."""
    rng = np.random.default_rng(seed)
    return DiagonalSpectrum(tuple(sorted(rng.dirichlet(np.ones(4)))))
