"""Backend selection for the optimizer inner-loop kernels.

Prefers the compiled Cython extension and falls back to the pure-numpy
implementation when the extension is unavailable.  Set ``QCOH_BACKEND`` to
``pure`` or ``compiled`` to force a choice (the benchmark uses this).
"""

from __future__ import annotations

import os

_forced = os.environ.get("QCOH_BACKEND", "").strip().lower()

if _forced == "pure":
    from . import _kernels_py as _impl
elif _forced == "compiled":
    from . import _kernels as _impl  # type: ignore[attr-defined]
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

backend_name: str = _impl.BACKEND

n_params = _impl.n_params
rotation_pairs = _impl.rotation_pairs
unitary_from_params = _impl.unitary_from_params
product_unitary = _impl.product_unitary
conjugation_probs = _impl.conjugation_probs
basis_probs = _impl.basis_probs
shannon_entropy = _impl.shannon_entropy
DephasingObjective = _impl.DephasingObjective
