"""Command-line front end.

Verbs map one-to-one onto library operations; every run echoes the resolved
seed and tolerances, reports are machine-readable (JSON by default, CSV for
tables), and numeric field names are stable.  Exit codes: 0 success, 2 input
validation failure, 3 optimizer non-convergence (the report is still
printed).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import channels, gates, kernels, measures, multiparty, qmat
from .qmat import ValidationError

SWEEP_BUDGET = 10 ** 6

TOLERANCES = {
    "hermitian": qmat.TOL_HERM,
    "trace": qmat.TOL_TRACE,
    "psd": qmat.TOL_PSD,
    "unitary": qmat.TOL_UNITARY,
    "support": qmat.SUPPORT_TOL,
}


def _optimizer_from_args(args) -> measures.OptimizerConfig:
    return measures.OptimizerConfig(
        restarts=args.restarts,
        max_iterations=args.max_iter,
        step_tol=args.tol,
        seed=args.seed,
    )


def _parse_floats(text: str, n: int, what: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise ValidationError(f"{what} needs {n} comma-separated values, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError as e:
        raise ValidationError(f"could not parse {what}: {e}") from None


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as e:
        raise ValidationError(f"could not parse complex amplitude {text!r}: {e}") from None


def _load_state(path) -> qmat.DensityMatrix:
    try:
        return qmat.load_state(path)
    except FileNotFoundError:
        raise ValidationError(f"state file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed state file {path}: {e}") from None


# ---------------------------------------------------------------------------
# Verb handlers: each returns (results, quantities, exit_code, rows)
# rows is None for scalar reports or (columns, list-of-rows) for tables.
# ---------------------------------------------------------------------------

def _hv_coherence(args):
    rho = _load_state(args.state)
    c = measures.coherence_rel_entropy(rho)
    results = {"coherence_bits": c}
    quantities = {"coherence_bits": "relative entropy of coherence, computational basis"}
    if args.l1:
        results["coherence_l1"] = measures.coherence_l1(rho)
        quantities["coherence_l1"] = "sum of off-diagonal magnitudes, computational basis"
    return results, quantities, 0, None


def _hv_discord(args):
    rho = _load_state(args.state)
    rep = measures.discord_rel_entropy(rho, _optimizer_from_args(args))
    results = {"discord_bits": rep.value, "optimizer": rep.to_dict()}
    quantities = {"discord_bits": "relative-entropy discord via product-basis minimization"}
    return results, quantities, 0 if rep.converged else 3, None


def _hv_basis_free(args):
    rho = _load_state(args.state)
    rep = measures.basis_free_coherence(rho, _optimizer_from_args(args))
    results = {"basis_free_bits": rep.value, "optimizer": rep.to_dict()}
    quantities = {"basis_free_bits": "minimum coherence over product-unitary reframings"}
    return results, quantities, 0 if rep.converged else 3, None


def _hv_hierarchy(args):
    rho = _load_state(args.state)
    rep = measures.hierarchy_check(rho, optimizer=_optimizer_from_args(args))
    results = {"coherence_bits": rep.coherence, "discord_bits": rep.discord.value}
    quantities = {
        "coherence_bits": "relative entropy of coherence, computational basis",
        "discord_bits": "relative-entropy discord",
    }
    if rep.entanglement is not None:
        results["entanglement_bits"] = rep.entanglement
        quantities["entanglement_bits"] = "entanglement entropy across the first-label cut"
    return results, quantities, 0 if rep.discord.converged else 3, None


def _hv_validate_kraus(args):
    try:
        ops = channels.load_kraus(args.file, require_complete=False)
    except FileNotFoundError:
        raise ValidationError(f"Kraus file not found: {args.file}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed Kraus file {args.file}: {e}") from None
    per_op = []
    all_ok = True
    for i, k in enumerate(ops):
        ok, col = channels.is_incoherent_kraus(k)
        all_ok &= ok
        per_op.append({"index": i, "incoherent": ok, "offending_column": col})
    t = ops[0].shape[1]
    comp = sum(k.conj().T @ k for k in ops)
    residual = float(np.max(np.abs(comp - np.eye(t))))
    results = {
        "operators": per_op,
        "all_incoherent": all_ok,
        "completeness_residual": residual,
        "complete": residual <= channels.TOL_COMPLETE,
    }
    quantities = {
        "operators": "column-structure scan per Kraus operator",
        "completeness_residual": "max |sum K^dag K - I|",
    }
    code = 0 if (all_ok and residual <= channels.TOL_COMPLETE) else 2
    return results, quantities, code, None


def _hv_channel(args):
    rho = _load_state(args.state)
    try:
        ks = channels.load_kraus(args.kraus)
    except FileNotFoundError:
        raise ValidationError(f"Kraus file not found: {args.kraus}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed Kraus file {args.kraus}: {e}") from None
    quantities = {"coherence_in_bits": "coherence before the channel",
                  "coherence_out_bits": "coherence after the channel"}
    c_in = measures.coherence_rel_entropy(rho)
    if args.selective:
        outcomes = channels.apply_selective(rho, ks)
        rows = []
        for i, out in enumerate(outcomes):
            rows.append(
                {
                    "outcome": i,
                    "probability": out.probability,
                    "null": out.null,
                    "coherence_bits": (
                        measures.coherence_rel_entropy(out.state) if not out.null else 0.0
                    ),
                }
            )
        results = {"coherence_in_bits": c_in, "outcomes": rows}
        return results, quantities, 0, None
    out = channels.apply_channel(rho, ks)
    results = {
        "coherence_in_bits": c_in,
        "coherence_out_bits": measures.coherence_rel_entropy(out),
        "state": qmat.state_to_doc(out),
    }
    if args.out:
        qmat.save_state(args.out, out)
    return results, quantities, 0, None


_FAMILY_MAP = {
    "one-side": "one_side",
    "two-side": "two_side",
    "kernel": "kernel",
    "full-u4": "full_u4",
}


def _hv_copt(args):
    delta = gates.DiagonalSpectrum(tuple(_parse_floats(args.delta, 4, "--delta")))
    quantities = {
        "one_side_bits": "best coherence from one-side local rotations",
        "kernel_bits": "best coherence from a canonical nonlocal kernel",
        "two_side_bits": "best coherence from two-side local rotations",
    }
    if args.family == "ordering":
        rep = gates.copt_ordering(delta)
        results = {
            "one_side_bits": rep.one_side,
            "kernel_bits": rep.kernel,
            "two_side_bits": rep.two_side,
        }
        return results, quantities, 0, None
    family = _FAMILY_MAP[args.family]
    closed = {
        "one_side": gates.copt_one_side,
        "two_side": gates.copt_two_side,
        "kernel": gates.copt_kernel,
    }
    results = {}
    code = 0
    if family in closed:
        results["closed_form_bits"] = closed[family](delta)
        quantities["closed_form_bits"] = f"best coherence for the {args.family} family"
    if args.numeric or family == "full_u4":
        rep = gates.copt_numeric(delta, family, _optimizer_from_args(args))
        results["numeric_bits"] = rep.value
        results["optimizer"] = rep.to_dict()
        quantities["numeric_bits"] = "multi-start search over the family"
        code = 0 if rep.converged else 3
    return results, quantities, code, None


def _hv_cartan(args):
    c = gates.CartanVector(*_parse_floats(args.c, 3, "--c"))
    u = gates.cartan_kernel(c)
    results = {
        "matrix": qmat.matrix_to_doc(u.data, [2, 2], ["A", "B"]),
        "phases": [float(x) for x in gates.magic_phases(c)],
        "magic_offdiag_residual": gates.magic_diagonality_residual(u),
    }
    quantities = {
        "phases": "kernel eigenphases in the magic basis",
        "magic_offdiag_residual": "max off-diagonal magnitude in the magic basis",
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(qmat.matrix_to_doc(u.data, [2, 2], ["A", "B"]), fh, sort_keys=True)
            fh.write("\n")
    return results, quantities, 0, None


def _hv_power(args):
    try:
        u = qmat.load_unitary(args.gate)
    except FileNotFoundError:
        raise ValidationError(f"gate file not found: {args.gate}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed gate file {args.gate}: {e}") from None
    mode = "incoherent_inputs" if args.mode == "incoherent" else "all_inputs"
    rep = gates.coherent_power(u, mode, _optimizer_from_args(args))
    results = {"coherent_power_bits": rep.value, "optimizer": rep.to_dict()}
    quantities = {"coherent_power_bits": f"coherent power over {args.mode} inputs"}
    return results, quantities, 0 if rep.converged else 3, None


def _hv_additivity(args):
    rho = _load_state(args.state)
    rep = multiparty.additivity_gap(rho)
    quantities = {"gap": "three-party coherence minus the two marginal coherences"}
    return rep.to_dict(), quantities, 0, None


def _hv_delta(args):
    rho = _load_state(args.state)
    rep = multiparty.delta_decomposition(rho)
    add = multiparty.additivity_gap(rho)
    results = rep.to_dict()
    results["identity_residual"] = abs(rep.total - (-(add.gap)))
    quantities = {
        "d1": "strong-subadditivity combination of the exact entropies (<= 0)",
        "d2": "the same combination for the dephased states, reversed (>= 0)",
        "d3": "entropy gained by dephasing the A marginal (>= 0)",
        "identity_residual": "|d1 + d2 + d3 - (c_ab + c_ac - c_abc)|",
    }
    return results, quantities, 0, None


def _hv_search(args):
    hits = multiparty.counterexample_search(
        samples=args.samples, generator=args.generator, seed=args.seed
    )
    results = {
        "samples": args.samples,
        "generator": args.generator,
        "n_hits": len(hits),
        "hits": [{"sample": h.sample, "gap": h.gap} for h in hits],
    }
    if args.save_dir:
        import os

        os.makedirs(args.save_dir, exist_ok=True)
        for h in hits:
            qmat.save_state(f"{args.save_dir}/hit_{h.sample:05d}.json", h.state)
    quantities = {"hits": "states with additivity gap below -1e-6, re-verified"}
    return results, quantities, 0, None


def _hv_ghz(args):
    if args.alpha_sq is not None:
        if not 0.0 <= args.alpha_sq <= 1.0:
            raise ValidationError("--alpha-sq must lie in [0, 1]")
        alpha = math.sqrt(args.alpha_sq)
    else:
        alpha = _parse_complex(args.alpha)
    psi, rep = multiparty.ghz_family(alpha)
    numeric = multiparty.additivity_gap(psi.density())
    results = {"analytic": rep.to_dict(), "numeric": numeric.to_dict()}
    if args.out:
        qmat.save_state(args.out, psi.density())
    quantities = {"analytic": "closed-form coherences", "numeric": "dephase-and-entropy pipeline"}
    return results, quantities, 0, None


def _hv_w(args):
    amps = [_parse_complex(p.strip()) for p in args.amps.split(",")]
    if len(amps) != 3:
        raise ValidationError("--amps needs three comma-separated amplitudes")
    psi, rep = multiparty.w_family(*amps)
    numeric = multiparty.additivity_gap(psi.density())
    results = {"analytic": rep.to_dict(), "numeric": numeric.to_dict()}
    if args.out:
        qmat.save_state(args.out, psi.density())
    quantities = {"analytic": "closed-form coherences", "numeric": "dephase-and-entropy pipeline"}
    return results, quantities, 0, None


def _hv_sweep(args):
    if args.kind == "ghz":
        n = args.points
        if n > SWEEP_BUDGET:
            raise ValidationError(f"grid budget exceeded: {n} > {SWEEP_BUDGET}")
        cols = ["alpha_sq", "c_abc", "c_ab", "c_ac", "gap"]
        rows = []
        for i in range(n):
            a2 = i / (n - 1) if n > 1 else 0.0
            _, rep = multiparty.ghz_family(math.sqrt(a2))
            rows.append([a2, rep.c_abc, rep.c_ab, rep.c_ac, rep.gap])
        return {}, {}, 0, (cols, rows)
    if args.kind == "one-side":
        delta = gates.DiagonalSpectrum(tuple(_parse_floats(args.delta, 4, "--delta")))
        n = args.points
        if n > SWEEP_BUDGET:
            raise ValidationError(f"grid budget exceeded: {n} > {SWEEP_BUDGET}")
        d1, d2, d3, d4 = delta.delta
        s_in = delta.entropy()
        cols = ["a_sq", "entropy_bits", "coherence_bits"]
        rows = []
        for i in range(n):
            a = i / (n - 1) if n > 1 else 0.0
            probs = [
                a * d1 + (1 - a) * d3,
                a * d2 + (1 - a) * d4,
                a * d3 + (1 - a) * d1,
                a * d4 + (1 - a) * d2,
            ]
            h = qmat.shannon(probs)
            rows.append([a, h, h - s_in])
        return {}, {}, 0, (cols, rows)
    # w simplex sweep
    n = args.points
    if n * n > SWEEP_BUDGET:
        raise ValidationError(f"grid budget exceeded: {n * n} > {SWEEP_BUDGET}")
    cols = ["alpha_sq", "beta_sq", "gamma_sq", "c_abc", "c_ab", "c_ac", "gap"]
    rows = []
    for i in range(n):
        for j in range(n):
            a2 = i / (n - 1) if n > 1 else 0.0
            b2 = (j / (n - 1) if n > 1 else 0.0) * (1.0 - a2)
            g2 = max(1.0 - a2 - b2, 0.0)
            _, rep = multiparty.w_family(math.sqrt(a2), math.sqrt(b2), math.sqrt(g2))
            rows.append([a2, b2, g2, rep.c_abc, rep.c_ab, rep.c_ac, rep.gap])
    return {}, {}, 0, (cols, rows)


HANDLERS = {
    "coherence": _hv_coherence,
    "discord": _hv_discord,
    "basis-free": _hv_basis_free,
    "hierarchy": _hv_hierarchy,
    "validate-kraus": _hv_validate_kraus,
    "channel": _hv_channel,
    "copt": _hv_copt,
    "cartan": _hv_cartan,
    "power": _hv_power,
    "additivity": _hv_additivity,
    "delta": _hv_delta,
    "search": _hv_search,
    "ghz": _hv_ghz,
    "w": _hv_w,
    "sweep": _hv_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qcoh",
        description="Coherence and correlation measures for multi-qudit states.",
    )
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--restarts", type=int, default=32)
        sp.add_argument("--max-iter", type=int, default=2000)
        sp.add_argument("--tol", type=float, default=1e-8, help="optimizer step tolerance")
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        return sp

    sp = common(sub.add_parser("coherence", help="relative entropy of coherence"))
    sp.add_argument("--state", required=True)
    sp.add_argument("--l1", action="store_true", help="also report the l1 measure")

    sp = common(sub.add_parser("discord", help="relative-entropy discord"))
    sp.add_argument("--state", required=True)

    sp = common(sub.add_parser("basis-free", help="basis-free coherence"))
    sp.add_argument("--state", required=True)

    sp = common(sub.add_parser("hierarchy", help="coherence >= discord (>= entanglement)"))
    sp.add_argument("--state", required=True)

    sp = common(sub.add_parser("validate-kraus", help="column-structure validation"))
    sp.add_argument("--file", required=True)

    sp = common(sub.add_parser("channel", help="apply a Kraus channel"))
    sp.add_argument("--state", required=True)
    sp.add_argument("--kraus", required=True)
    sp.add_argument("--selective", action="store_true")
    sp.add_argument("--out", default=None, help="write the output state here")

    sp = common(sub.add_parser("copt", help="optimal coherence creation from a spectrum"))
    sp.add_argument("--delta", required=True, help="four comma-separated weights")
    sp.add_argument(
        "--family",
        choices=["one-side", "two-side", "kernel", "ordering", "full-u4"],
        default="ordering",
    )
    sp.add_argument("--numeric", action="store_true", help="also run the multi-start search")

    sp = common(sub.add_parser("cartan", help="canonical nonlocal kernel"))
    sp.add_argument("--c", required=True, help="three comma-separated coefficients")
    sp.add_argument("--out", default=None, help="write the gate matrix here")

    sp = common(sub.add_parser("power", help="coherent power of a two-qubit gate"))
    sp.add_argument("--gate", required=True)
    sp.add_argument("--mode", choices=["incoherent", "all"], default="incoherent")

    sp = common(sub.add_parser("additivity", help="tripartite additivity gap"))
    sp.add_argument("--state", required=True)

    sp = common(sub.add_parser("delta", help="signed entropy decomposition of the gap"))
    sp.add_argument("--state", required=True)

    sp = common(sub.add_parser("search", help="additivity counterexample search"))
    sp.add_argument("--generator", choices=list(multiparty.GENERATORS), default="ssa")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--save-dir", default=None)

    sp = common(sub.add_parser("ghz", help="generalized GHZ family"))
    sp.add_argument("--alpha", default=None, help="complex amplitude of |000>")
    sp.add_argument("--alpha-sq", type=float, default=None)
    sp.add_argument("--out", default=None)

    sp = common(sub.add_parser("w", help="generalized W family"))
    sp.add_argument("--amps", required=True, help="three comma-separated amplitudes")
    sp.add_argument("--out", default=None)

    sp = common(sub.add_parser("sweep", help="parameter-grid tables (CSV)"))
    sp.add_argument("--kind", choices=["ghz", "one-side", "w"], required=True)
    sp.add_argument("--points", type=int, default=101)
    sp.add_argument("--delta", default=None, help="spectrum for the one-side sweep")

    return p


def _fmt(x) -> str:
    return f"{x:.17g}" if isinstance(x, float) else str(x)


def _emit(args, results, quantities, rows) -> None:
    seed_line = {
        "seed": args.seed,
        "tolerances": dict(TOLERANCES, step=args.tol),
    }
    if rows is not None:
        cols, data = rows
        print(f"# seed={args.seed} step_tol={args.tol:.17g}")
        print(",".join(cols))
        for row in data:
            print(",".join(_fmt(v) for v in row))
        return
    if args.format == "csv":
        flat = _flatten(results)
        print(f"# seed={args.seed} step_tol={args.tol:.17g}")
        print(",".join(flat.keys()))
        print(",".join(_fmt(v) for v in flat.values()))
        return
    report = {
        "command": args.verb,
        **seed_line,
        "results": results,
        "quantities": quantities,
        "backend": kernels.backend_name,
    }
    print(json.dumps(report, sort_keys=True, indent=2))


def _flatten(d, prefix="") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, prefix=f"{key}."))
        elif isinstance(v, list):
            out[key] = "|".join(_fmt(x) if not isinstance(x, dict) else "..." for x in v)
        else:
            out[key] = v
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb == "ghz" and args.alpha is None and args.alpha_sq is None:
        print("error: ghz needs --alpha or --alpha-sq", file=sys.stderr)
        return 2
    if args.verb == "sweep" and args.kind == "one-side" and args.delta is None:
        print("error: the one-side sweep needs --delta", file=sys.stderr)
        return 2
    try:
        results, quantities, code, rows = HANDLERS[args.verb](args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except measures.HierarchyViolation as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    _emit(args, results, quantities, rows)
    return code


if __name__ == "__main__":
    sys.exit(main())
