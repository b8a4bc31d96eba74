"""Incoherent operations: Kraus structure validation, enumeration, application.

A Kraus operator preserves the set of diagonal states exactly when every
column carries at most one nonzero entry; for s x t operators there are
s^t such arrangements.  The module validates, counts and enumerates these
structures, applies channels (selectively or not), generates certified
incoherent channels for fuzzing, and bundles the monotonicity/convexity
checks any coherence measure must satisfy under them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .measures import coherence_rel_entropy
from .qmat import DensityMatrix, ValidationError, dephase

TOL_NONZERO = 1e-12     # |entry| above this counts as a structural nonzero
TOL_COMPLETE = 1e-9     # max-norm tolerance on sum K^dag K = I
TOL_NULL_OUTCOME = 1e-12
STRUCTURE_BUDGET = 10 ** 6
COUNT_CAP = 2 ** 62


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Equal-shaped Kraus operators forming a CPTP map.

    ``certified_incoherent`` is a tri-state: True / False / None (unchecked).
    """

    operators: tuple
    certified_incoherent: bool | None = None

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=np.complex128) for k in self.operators)
        if not ops:
            raise ValidationError("KrausSet needs at least one operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ValidationError("all Kraus operators must share one shape")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        t = shape[1]
        s = sum(k.conj().T @ k for k in ops)
        err = np.max(np.abs(s - np.eye(t)))
        if err > TOL_COMPLETE:
            raise ValidationError(f"incomplete Kraus set: max |sum K^dag K - I| = {err:.3e}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.operators[0].shape

    def certify(self, tol: float = TOL_NONZERO) -> "KrausSet":
        """Re-derive the incoherence certificate from the operators."""
        ok = all(is_incoherent_kraus(k, tol)[0] for k in self.operators)
        return KrausSet(self.operators, certified_incoherent=ok)


@dataclass(frozen=True)
class StructureMask:
    """Row index of the single permitted nonzero entry, per column."""

    rows: tuple[int, ...]

    def matrix_support(self, s: int) -> np.ndarray:
        m = np.zeros((s, len(self.rows)), dtype=bool)
        for j, r in enumerate(self.rows):
            m[r, j] = True
        return m


def is_incoherent_kraus(k, tol: float = TOL_NONZERO) -> tuple[bool, int | None]:
    """Column scan: True iff every column has at most one entry above ``tol``.

    Returns ``(ok, offending_column)`` with the first bad column on failure.
    """
    m = np.abs(np.asarray(k, dtype=np.complex128)) > tol
    counts = m.sum(axis=0)
    bad = np.nonzero(counts > 1)[0]
    if bad.size:
        return False, int(bad[0])
    return True, None


def structure_count(s: int, t: int) -> int:
    """Number of legal nonzero arrangements for an s x t incoherent operator."""
    if s < 1 or t < 1:
        raise ValidationError("matrix dimensions must be >= 1")
    n = s ** t
    if n > COUNT_CAP:
        raise ValidationError(f"structure count {s}^{t} exceeds the 2^62 guard")
    return n


def enumerate_structures(s: int, t: int) -> Iterator[StructureMask]:
    """All structure masks in lexicographic order (first column most significant)."""
    n = structure_count(s, t)
    if n > STRUCTURE_BUDGET:
        raise ValidationError(f"enumeration budget exceeded: {n} > {STRUCTURE_BUDGET}")
    rows = [0] * t
    for _ in range(n):
        yield StructureMask(tuple(rows))
        for j in range(t - 1, -1, -1):
            rows[j] += 1
            if rows[j] < s:
                break
            rows[j] = 0


def apply_channel(rho: DensityMatrix, ks: KrausSet) -> DensityMatrix:
    """Non-selective application sum_n K_n rho K_n^dag."""
    s, t = ks.shape
    if s != t:
        raise ValidationError("channel application requires square Kraus operators")
    if t != rho.dim:
        raise ValidationError(f"operator dim {t} != state dim {rho.dim}")
    out = np.zeros_like(rho.data)
    for k in ks.operators:
        out = out + k @ rho.data @ k.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(rho.shape, out)


@dataclass(frozen=True, eq=False)
class SelectiveOutcome:
    probability: float
    state: DensityMatrix | None
    null: bool


def apply_selective(rho: DensityMatrix, ks: KrausSet) -> list[SelectiveOutcome]:
    """Selective application: (p_n, K_n rho K_n^dag / p_n) per recorded outcome.

    Outcomes with probability below ``TOL_NULL_OUTCOME`` are flagged null and
    carry no state.
    """
    s, t = ks.shape
    if s != t:
        raise ValidationError("channel application requires square Kraus operators")
    if t != rho.dim:
        raise ValidationError(f"operator dim {t} != state dim {rho.dim}")
    outcomes = []
    for k in ks.operators:
        m = k @ rho.data @ k.conj().T
        p = float(np.real(np.trace(m)))
        if p <= TOL_NULL_OUTCOME:
            outcomes.append(SelectiveOutcome(probability=max(p, 0.0), state=None, null=True))
        else:
            m = 0.5 * (m + m.conj().T) / p
            outcomes.append(
                SelectiveOutcome(probability=p, state=DensityMatrix(rho.shape, m), null=False)
            )
    return outcomes


def random_incoherent_kraus_set(dim: int, n_ops: int, seed: int = 0) -> KrausSet:
    """Certified incoherent Kraus set with exact completeness.

    Each operator gets a random permutation structure (columns hit distinct
    rows) filled with complex Gaussians; columns are then normalized jointly
    across the set, which makes sum K^dag K = I hold in closed form.
    """
    if n_ops < dim:
        raise ValidationError(f"need n_ops >= dim, got {n_ops} < {dim}")
    rng = np.random.default_rng(seed)
    for _ in range(10):
        ops = np.zeros((n_ops, dim, dim), dtype=np.complex128)
        for n in range(n_ops):
            perm = rng.permutation(dim)
            fills = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(2)
            ops[n, perm, np.arange(dim)] = fills
        col_w = np.sum(np.abs(ops) ** 2, axis=(0, 1))
        if np.min(col_w) < 1e-30:
            continue  # essentially impossible; retry bounded times
        ops /= np.sqrt(col_w)[None, None, :]
        return KrausSet(tuple(ops), certified_incoherent=True).certify()
    raise ValidationError("failed to construct an incoherent Kraus set")


@dataclass
class MonotonicityReport:
    c_input: float
    c1_consistent: bool
    c2a_gap: float
    c2b_gap: float
    c3_gaps: list[float]

    def worst_gap(self) -> float:
        return min([self.c2a_gap, self.c2b_gap] + self.c3_gaps)


def monotonicity_suite(
    rho: DensityMatrix,
    ks: KrausSet,
    ensembles: list[list[tuple[float, DensityMatrix]]] | None = None,
    seed: int = 0,
) -> MonotonicityReport:
    """Gaps for the coherence-measure conditions under a certified channel.

    c2a_gap = C(rho) - C(Phi(rho)); c2b_gap = C(rho) - sum p_n C(rho_n);
    c3_gaps = sum p C(state) - C(mixture) per supplied ensemble.  All must be
    >= 0 up to numerical jitter for a valid incoherent channel.  When no
    ensembles are given, a default of random rank-2 two-qubit states with
    Dirichlet weights is drawn from ``seed``.
    """
    if ks.certified_incoherent is not True:
        raise ValidationError("monotonicity_suite requires a certified incoherent KrausSet")
    c_in = coherence_rel_entropy(rho)
    incoherent_input = np.max(np.abs(dephase(rho).data - rho.data)) <= 1e-9
    c1_consistent = (c_in <= 1e-9) == incoherent_input

    c2a = c_in - coherence_rel_entropy(apply_channel(rho, ks))

    acc = 0.0
    for out in apply_selective(rho, ks):
        if not out.null:
            acc += out.probability * coherence_rel_entropy(out.state)
    c2b = c_in - acc

    if ensembles is None:
        ensembles = default_convexity_ensembles(n_ensembles=5, seed=seed)
    c3 = []
    for ens in ensembles:
        weights = np.array([w for w, _ in ens])
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValidationError("ensemble weights must sum to 1")
        mix = sum(w * st.data for w, st in ens)
        mixture = DensityMatrix(ens[0][1].shape, mix)
        c3.append(float(sum(w * coherence_rel_entropy(st) for w, st in ens)
                        - coherence_rel_entropy(mixture)))
    return MonotonicityReport(
        c_input=c_in, c1_consistent=c1_consistent, c2a_gap=c2a, c2b_gap=c2b, c3_gaps=c3
    )


def default_convexity_ensembles(n_ensembles: int = 5, n_states: int = 3, seed: int = 0):
    """Random rank-2 two-qubit ensembles with Dirichlet weights."""
    from .qmat import SubsystemShape, random_state

    rng = np.random.default_rng(seed)
    shape = SubsystemShape.qubits(2)
    out = []
    for _ in range(n_ensembles):
        w = rng.dirichlet(np.ones(n_states))
        states = [
            random_state(shape, rank=2, seed=int(rng.integers(0, 2 ** 31)))
            for _ in range(n_states)
        ]
        out.append(list(zip(w.tolist(), states)))
    return out


# ---------------------------------------------------------------------------
# Interchange format
# ---------------------------------------------------------------------------

def kraus_to_doc(ks: KrausSet) -> dict:
    return {
        "operators": [
            {"re": k.real.tolist(), "im": k.imag.tolist()} for k in ks.operators
        ],
        "certified_incoherent": ks.certified_incoherent,
    }


def doc_to_kraus(doc: dict, require_complete: bool = True):
    """Parse a Kraus document; the incoherence certificate is always recomputed.

    With ``require_complete=False`` returns the raw operator list (for
    diagnostic verbs that must not crash on invalid channels).
    """
    if "operators" not in doc or not doc["operators"]:
        raise ValidationError("Kraus document missing operators")
    ops = []
    for entry in doc["operators"]:
        re = np.asarray(entry["re"], dtype=float)
        im = np.asarray(entry["im"], dtype=float)
        if re.ndim != 2 or re.shape != im.shape:
            raise ValidationError("malformed Kraus operator matrices")
        ops.append(re + 1j * im)
    if not require_complete:
        return ops
    return KrausSet(tuple(ops)).certify()


def save_kraus(path, ks: KrausSet) -> None:
    with open(path, "w") as fh:
        json.dump(kraus_to_doc(ks), fh, sort_keys=True)
        fh.write("\n")


def load_kraus(path, require_complete: bool = True):
    with open(path) as fh:
        return doc_to_kraus(json.load(fh), require_complete=require_complete)
