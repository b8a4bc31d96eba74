"""Tripartite additivity analysis.

How does the coherence of a three-party state compare with the sum of the
coherences of its AB and AC marginals (all in the same product frame)?
The generalized GHZ and W families satisfy the additivity inequality in
closed form; states saturating strong subadditivity of the von Neumann
entropy with coherent factors violate it.  The decomposition

    C_AB + C_AC - C_ABC = D1 + D2 + D3

with D1 the (nonpositive) strong-subadditivity combination of the exact
entropies, D2 the same combination for the dephased states (nonnegative:
diagonal states are classical), and D3 the entropy gained by dephasing the
A marginal (nonnegative), makes the mechanism explicit: D1 = 0 forces the
reversed inequality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .measures import coherence_rel_entropy
from .qmat import (
    DensityMatrix,
    LocalBasisAssignment,
    PureState,
    SubsystemShape,
    ValidationError,
    dephase,
    entropy,
    matrix_to_doc,
    doc_to_matrix,
    partial_trace,
    random_pure,
)

TOL_SUM = 1e-12


def _require_tripartite(rho: DensityMatrix) -> None:
    if rho.shape.n_subsystems != 3:
        raise ValidationError(f"need exactly three subsystems, got {rho.shape.labels}")


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def _pair_coherence(x: float, y: float) -> float:
    """-x log2(x/(x+y)) - y log2(y/(x+y)) with the 0 log 0 convention."""
    s = x + y
    if s <= 0:
        return 0.0
    return -_xlog2x(x) - _xlog2x(y) + _xlog2x(s)


# ---------------------------------------------------------------------------
# Analytic families
# ---------------------------------------------------------------------------

@dataclass
class FamilyReport:
    c_abc: float
    c_ab: float
    c_ac: float

    @property
    def gap(self) -> float:
        return self.c_abc - self.c_ab - self.c_ac

    def to_dict(self) -> dict:
        return {"c_abc": self.c_abc, "c_ab": self.c_ab, "c_ac": self.c_ac, "gap": self.gap}


def ghz_family(alpha: complex) -> tuple[PureState, FamilyReport]:
    """alpha|000> + beta|111> with beta = sqrt(1 - |alpha|^2) >= 0.

    The three-party coherence is the binary entropy of |alpha|^2; both
    two-party marginals are diagonal, so the additivity gap is nonnegative
    for every alpha.
    """
    a2 = abs(alpha) ** 2
    if a2 > 1.0 + 1e-12:
        raise ValidationError(f"|alpha| must be <= 1, got {abs(alpha)}")
    a2 = min(a2, 1.0)
    beta = math.sqrt(max(1.0 - a2, 0.0))
    amp = np.zeros(8, dtype=complex)
    amp[0] = alpha
    amp[7] = beta
    psi = PureState(SubsystemShape.qubits(3), amp)
    report = FamilyReport(
        c_abc=-_xlog2x(a2) - _xlog2x(1.0 - a2),
        c_ab=0.0,
        c_ac=0.0,
    )
    return psi, report


def w_family(alpha: complex, beta: complex, gamma: complex) -> tuple[PureState, FamilyReport]:
    """alpha|001> + beta|010> + gamma|100> (unit norm required)."""
    a2, b2, g2 = abs(alpha) ** 2, abs(beta) ** 2, abs(gamma) ** 2
    if abs(a2 + b2 + g2 - 1.0) > TOL_SUM:
        raise ValidationError(f"|alpha|^2+|beta|^2+|gamma|^2 = {a2 + b2 + g2:.15g}, not 1")
    amp = np.zeros(8, dtype=complex)
    amp[1] = alpha   # |001>
    amp[2] = beta    # |010>
    amp[4] = gamma   # |100>
    psi = PureState(SubsystemShape.qubits(3), amp)
    report = FamilyReport(
        c_abc=-_xlog2x(a2) - _xlog2x(b2) - _xlog2x(g2),
        c_ab=_pair_coherence(b2, g2),
        c_ac=_pair_coherence(a2, g2),
    )
    return psi, report


# ---------------------------------------------------------------------------
# Numeric pipeline
# ---------------------------------------------------------------------------

@dataclass
class AdditivityReport:
    c_abc: float
    c_ab: float
    c_ac: float
    gap: float

    def to_dict(self) -> dict:
        return {"c_abc": self.c_abc, "c_ab": self.c_ab, "c_ac": self.c_ac, "gap": self.gap}


def additivity_gap(
    rho: DensityMatrix, basis: LocalBasisAssignment | None = None
) -> AdditivityReport:
    """C_ABC - C_AB - C_AC with marginal coherences in the induced frames."""
    _require_tripartite(rho)
    la, lb, lc = rho.shape.labels
    rho_ab = partial_trace(rho, {lc})
    rho_ac = partial_trace(rho, {lb})
    b = basis or LocalBasisAssignment.computational()
    c_abc = coherence_rel_entropy(rho, b)
    c_ab = coherence_rel_entropy(rho_ab, b.restrict(rho.shape, {la, lb}))
    c_ac = coherence_rel_entropy(rho_ac, b.restrict(rho.shape, {la, lc}))
    return AdditivityReport(c_abc=c_abc, c_ab=c_ab, c_ac=c_ac, gap=c_abc - c_ab - c_ac)


@dataclass
class DeltaReport:
    d1: float
    d2: float
    d3: float

    @property
    def total(self) -> float:
        return self.d1 + self.d2 + self.d3

    def to_dict(self) -> dict:
        return {"d1": self.d1, "d2": self.d2, "d3": self.d3, "total": self.total}


def delta_decomposition(
    rho: DensityMatrix, basis: LocalBasisAssignment | None = None
) -> DeltaReport:
    """Split C_AB + C_AC - C_ABC into the three signed entropy combinations.

    d1 = S(A) + S(ABC) - S(AB) - S(AC)            (strong subadditivity: <= 0)
    d2 = the same combination for the dephased states, reversed  ( >= 0 )
    d3 = S(dephased A) - S(A)                      ( >= 0 )
    """
    _require_tripartite(rho)
    la, lb, lc = rho.shape.labels
    b = basis or LocalBasisAssignment.computational()
    rho_ab = partial_trace(rho, {lc})
    rho_ac = partial_trace(rho, {lb})
    rho_a = partial_trace(rho, {lb, lc})
    b_ab = b.restrict(rho.shape, {la, lb})
    b_ac = b.restrict(rho.shape, {la, lc})
    b_a = b.restrict(rho.shape, {la})

    s_a = entropy(rho_a)
    s_ab = entropy(rho_ab)
    s_ac = entropy(rho_ac)
    s_abc = entropy(rho)
    si_a = entropy(dephase(rho_a, b_a))
    si_ab = entropy(dephase(rho_ab, b_ab))
    si_ac = entropy(dephase(rho_ac, b_ac))
    si_abc = entropy(dephase(rho, b))

    return DeltaReport(
        d1=s_a + s_abc - s_ab - s_ac,
        d2=si_ab + si_ac - si_abc - si_a,
        d3=si_a - s_a,
    )


# ---------------------------------------------------------------------------
# States saturating strong subadditivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SSABlock:
    """One direct-sum block: weight, the A-split dims, and the two factors.

    ``rho_left`` lives on (A_left, B), ``rho_right`` on (A_right, C).
    """

    weight: float
    a_left: int
    a_right: int
    rho_left: DensityMatrix
    rho_right: DensityMatrix

    def __post_init__(self):
        if self.weight < 0:
            raise ValidationError("block weights must be nonnegative")
        if self.rho_left.shape.n_subsystems != 2 or self.rho_right.shape.n_subsystems != 2:
            raise ValidationError("block factors must be bipartite (A-part, B or C)")
        if self.rho_left.shape.dims[0] != self.a_left:
            raise ValidationError(
                f"left factor A-dim {self.rho_left.shape.dims[0]} != a_left {self.a_left}"
            )
        if self.rho_right.shape.dims[0] != self.a_right:
            raise ValidationError(
                f"right factor A-dim {self.rho_right.shape.dims[0]} != a_right {self.a_right}"
            )


@dataclass(frozen=True, eq=False)
class SSABlockSpec:
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValidationError("need at least one block")
        total_w = sum(b.weight for b in blocks)
        if abs(total_w - 1.0) > TOL_SUM:
            raise ValidationError(f"block weights sum to {total_w:.15g}, not 1")
        db = {b.rho_left.shape.dims[1] for b in blocks}
        dc = {b.rho_right.shape.dims[1] for b in blocks}
        if len(db) != 1 or len(dc) != 1:
            raise ValidationError("all blocks must share the B and C dimensions")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim_a(self) -> int:
        return sum(b.a_left * b.a_right for b in self.blocks)

    @property
    def dim_b(self) -> int:
        return self.blocks[0].rho_left.shape.dims[1]

    @property
    def dim_c(self) -> int:
        return self.blocks[0].rho_right.shape.dims[1]


def ssa_saturating_state(spec: SSABlockSpec) -> DensityMatrix:
    """Assemble the direct sum of tensor-product blocks over a split A space.

    Block j occupies the consecutive A index range of width a_left*a_right;
    the output saturates strong subadditivity (d1 = 0) by construction.
    """
    da, db, dc = spec.dim_a, spec.dim_b, spec.dim_c
    out = np.zeros((da, db, dc, da, db, dc), dtype=complex)
    offset = 0
    for blk in spec.blocks:
        al, ar = blk.a_left, blk.a_right
        x = blk.rho_left.data.reshape(al, db, al, db)
        y = blk.rho_right.data.reshape(ar, dc, ar, dc)
        # (A_l, B, A_l', B') x (A_r, C, A_r', C') -> (A_l A_r, B, C, A_l' A_r', B', C')
        z = np.einsum("ibkd,jcle->ijbcklde", x, y)
        z = z.reshape(al * ar, db, dc, al * ar, db, dc)
        w = al * ar
        out[offset:offset + w, :, :, offset:offset + w, :, :] += blk.weight * z
        offset += w
    shape = SubsystemShape((da, db, dc), ("A", "B", "C"))
    d = da * db * dc
    return DensityMatrix(shape, out.reshape(d, d))


# ---------------------------------------------------------------------------
# Counterexample search
# ---------------------------------------------------------------------------

@dataclass
class SearchHit:
    sample: int
    gap: float
    state: DensityMatrix


GENERATORS = ("ssa", "ghz", "w")


def counterexample_search(
    samples: int,
    generator: str = "ssa",
    seed: int = 0,
    basis: LocalBasisAssignment | None = None,
    threshold: float = -1e-6,
) -> list[SearchHit]:
    """Search a generator family for states violating the additivity inequality.

    Every hit is re-verified through :func:`additivity_gap` before being
    returned.  GHZ and W sweeps legitimately return an empty list.
    """
    if samples < 1:
        raise ValidationError("need a positive sample budget")
    if generator not in GENERATORS:
        raise ValidationError(f"unknown generator {generator!r}; choose from {GENERATORS}")
    streams = np.random.SeedSequence(seed).spawn(samples)
    hits = []
    for i in range(samples):
        rng = np.random.default_rng(streams[i])
        if generator == "ssa":
            state = _random_coherent_ssa_state(rng)
        elif generator == "ghz":
            psi, _ = ghz_family(math.sqrt(rng.random()))
            state = psi.density()
        else:
            a2, b2, g2 = rng.dirichlet(np.ones(3))
            psi, _ = w_family(math.sqrt(a2), math.sqrt(b2), math.sqrt(g2))
            state = psi.density()
        report = additivity_gap(state, basis)
        if report.gap < threshold:
            hits.append(SearchHit(sample=i, gap=report.gap, state=state))
    return hits


def _random_coherent_ssa_state(rng) -> DensityMatrix:
    """Single SSA block with Haar-random coherent pure factors."""
    seed_l, seed_r = rng.integers(0, 2 ** 31, size=2)
    left = random_pure(SubsystemShape((2, 2), ("A", "B")), seed=int(seed_l)).density()
    right = random_pure(SubsystemShape((1, 2), ("a", "C")), seed=int(seed_r)).density()
    spec = SSABlockSpec(
        blocks=(SSABlock(weight=1.0, a_left=2, a_right=1, rho_left=left, rho_right=right),)
    )
    return ssa_saturating_state(spec)


# ---------------------------------------------------------------------------
# Interchange format
# ---------------------------------------------------------------------------

def ssa_spec_to_doc(spec: SSABlockSpec) -> dict:
    return {
        "blocks": [
            {
                "weight": b.weight,
                "a_left": b.a_left,
                "a_right": b.a_right,
                "rho_left": matrix_to_doc(
                    b.rho_left.data, b.rho_left.shape.dims, b.rho_left.shape.labels
                ),
                "rho_right": matrix_to_doc(
                    b.rho_right.data, b.rho_right.shape.dims, b.rho_right.shape.labels
                ),
            }
            for b in spec.blocks
        ]
    }


def doc_to_ssa_spec(doc: dict) -> SSABlockSpec:
    if "blocks" not in doc:
        raise ValidationError("SSA block document missing 'blocks'")
    blocks = []
    for entry in doc["blocks"]:
        left_m, left_s = doc_to_matrix(entry["rho_left"])
        right_m, right_s = doc_to_matrix(entry["rho_right"])
        blocks.append(
            SSABlock(
                weight=float(entry["weight"]),
                a_left=int(entry["a_left"]),
                a_right=int(entry["a_right"]),
                rho_left=DensityMatrix(left_s, left_m),
                rho_right=DensityMatrix(right_s, right_m),
            )
        )
    return SSABlockSpec(tuple(blocks))


def load_ssa_spec(path) -> SSABlockSpec:
    with open(path) as fh:
        return doc_to_ssa_spec(json.load(fh))


def save_ssa_spec(path, spec: SSABlockSpec) -> None:
    with open(path, "w") as fh:
        json.dump(ssa_spec_to_doc(spec), fh, sort_keys=True)
        fh.write("\n")
