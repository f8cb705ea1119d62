"""Command-line pipeline: build, color, plan, synthesize, estimate, verify.

Artifacts are JSON (models, colorings, plans, circuits), OpenQASM 3, or
CSV; identical inputs and seed produce byte-identical output files.  Exit
codes: 0 on success, 2 on a validation problem (bad input, invalid file,
oracle size cap), 1 on an internal failure.
"""
from __future__ import annotations

import functools
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import coloring as coloring_mod
from . import model as model_mod
from . import oracle, resources, synth, trotter
from .circuits import circuit_to_json, circuit_to_qasm3, counts
from .jsonutil import dump_json, format_float

DEFAULT_SEED = 0xC0FFEE


def _guard(fn):
    """Map exceptions to the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (ValueError, OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(2)
        except Exception as exc:
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            raise SystemExit(1)

    return wrapper


def _write_artifact(text: str, out: str | None, summary: str | None = None) -> None:
    """Send the artifact to --out or stdout; the summary never mixes into it."""
    if out is None:
        sys.stdout.write(text)
        if summary:
            click.echo(summary, err=True)
    else:
        Path(out).write_text(text)
        if summary:
            click.echo(summary)


def _load_model(path: str) -> model_mod.SpinModel:
    return model_mod.model_from_json(Path(path).read_text())


def _parse_floats(text: str, want: int, what: str) -> tuple[float, ...]:
    parts = [p for p in text.replace("x", ",").split(",") if p != ""]
    if len(parts) != want:
        raise ValueError(f"{what} needs {want} comma-separated values, got {text!r}")
    return tuple(float(p) for p in parts)


def _parse_dims(text: str) -> tuple[int, ...]:
    parts = [p for p in text.replace("x", ",").split(",") if p != ""]
    return tuple(int(p) for p in parts)


@click.group()
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True,
              help="Seed for every stochastic ingredient (norm power iteration).")
@click.pass_context
def main(ctx, seed: int) -> None:
    """Trotterized spin-lattice simulation compiler."""
    ctx.obj = {"seed": seed}


@main.command()
@click.option("--kind", type=click.Choice(["chain", "square", "hexagonal"]), required=True)
@click.option("--dims", required=True,
              help="Site count for chain; ROWSxCOLS for square; LXxLY cells for hexagonal.")
@click.option("--boundary", type=click.Choice(["open", "periodic"]), default="open",
              show_default=True)
@click.option("--coupling", "coupling_spec", default="1.0", show_default=True,
              help="Isotropic J, or JX,JY,JZ for a diagonal tensor.")
@click.option("--field", "field_spec", default=None, help="Uniform site field HX,HY,HZ.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_guard
def lattice(kind, dims, boundary, coupling_spec, field_spec, out) -> None:
    """Build a lattice model and write it as JSON."""
    parts = coupling_spec.split(",")
    if len(parts) == 1:
        coupling = model_mod.CouplingTensor.heisenberg(float(parts[0]))
    else:
        coupling = model_mod.CouplingTensor.diagonal(
            *_parse_floats(coupling_spec, 3, "--coupling")
        )
    field = _parse_floats(field_spec, 3, "--field") if field_spec else None
    model = model_mod.build_lattice(kind, _parse_dims(dims), boundary, coupling, field)
    summary = f"n={model.n} edges={len(model.edges)} lattice={model.lattice.value}"
    _write_artifact(model_mod.model_to_json(model), out, summary)


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_guard
def color(model_path, out) -> None:
    """Color a model's edges into commuting classes."""
    model = _load_model(model_path)
    coloring = coloring_mod.color_model(model)
    coloring_mod.validate(model, coloring)
    _write_artifact(coloring_mod.coloring_to_json(coloring), out,
                    f"K={coloring.num_classes}")


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--order", type=int, default=1, show_default=True)
@click.option("--epsilon", type=float, required=True)
@click.option("--time", "t", type=float, required=True)
@click.option("--c3", type=float, default=1.0, show_default=True,
              help="Higher-order step-rule constant.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_guard
def plan(model_path, order, epsilon, t, c3, out) -> None:
    """Choose the Trotter step count for an accuracy target."""
    model = _load_model(model_path)
    coloring = coloring_mod.color_model(model)
    step_plan = trotter.steps_for_accuracy(
        order, coloring.num_classes, model.n, model.j_max, t, epsilon, c3=c3
    )
    doc = {
        "order": step_plan.order,
        "m": step_plan.m,
        "K": step_plan.num_classes,
        "n": model.n,
        "J": model.j_max,
        "t": step_plan.t,
        "epsilon": step_plan.epsilon,
        "bound_used": step_plan.bound_used,
    }
    summary = f"K={step_plan.num_classes} m={step_plan.m} bound={step_plan.bound_used}"
    _write_artifact(dump_json(doc), out, summary)


@main.command("synth")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--coloring", "coloring_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Coloring JSON; computed from the model when omitted.")
@click.option("--order", type=int, default=1, show_default=True)
@click.option("--steps", type=int, default=None, help="Explicit m; overrides --epsilon.")
@click.option("--epsilon", type=float, default=None)
@click.option("--time", "t", type=float, required=True)
@click.option("--mode", type=click.Choice(list(synth.MODES)), default="decomposed",
              show_default=True)
@click.option("--emit", type=click.Choice(["json", "qasm"]), default="json",
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_guard
def synth_cmd(model_path, coloring_path, order, steps, epsilon, t, mode, emit, out) -> None:
    """Compile a Trotter circuit for a model."""
    model = _load_model(model_path)
    if coloring_path is None:
        coloring = coloring_mod.color_model(model)
    else:
        coloring = coloring_mod.coloring_from_json(Path(coloring_path).read_text())
    coloring_mod.validate(model, coloring)
    if steps is None:
        if epsilon is None:
            raise ValueError("provide --steps or --epsilon")
        steps = trotter.steps_for_accuracy(
            order, coloring.num_classes, model.n, model.j_max, t, epsilon
        ).m
    formula = trotter.formula_for_order(order, coloring.num_classes)
    circuit = synth.build_trotter_circuit(model, coloring, formula, steps, t, mode=mode)
    tally = counts(circuit)
    summary = (
        f"m={steps} depth={tally['depth']} gates={tally['total']} "
        f"cx={tally['cx']} interaction={tally['interaction']}"
    )
    if emit == "qasm":
        _write_artifact(circuit_to_qasm3(circuit, model), out, summary)
    else:
        _write_artifact(circuit_to_json(circuit), out, summary)


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Take n, K, J, and the edge count from a model file.")
@click.option("--n", "n_sites", type=int, default=None)
@click.option("--classes", "k_classes", type=int, default=None, help="Color count K.")
@click.option("--coupling", "j_val", type=float, default=1.0, show_default=True)
@click.option("--order", type=int, default=1, show_default=True)
@click.option("--epsilon", type=float, required=True)
@click.option("--time", "t", type=float, required=True)
@click.option("--t-inf", type=float, default=1.0, show_default=True)
@click.option("--slope", type=float, default=0.0, show_default=True,
              help="Scaled-gate slope s; adds the K*s*t bound to the report.")
@click.option("--heisenberg", is_flag=True, help="Count 3 CNOTs per interaction gate.")
@click.option("--compare-orders", default=None, help="e.g. 1,2,4: emit CSV of m,N,T.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_guard
def estimate(model_path, n_sites, k_classes, j_val, order, epsilon, t, t_inf, slope,
             heisenberg, compare_orders, out) -> None:
    """Closed-form resource estimates."""
    edges_per_sweep = None
    if model_path is not None:
        model = _load_model(model_path)
        n_sites = model.n
        k_classes = coloring_mod.color_model(model).num_classes
        j_val = model.j_max
        edges_per_sweep = len(model.edges)
    if n_sites is None or k_classes is None:
        raise ValueError("provide --model, or both --n and --classes")
    timing = resources.GateTimingModel(t_inf=t_inf, s=slope)

    def one(order_i: int) -> resources.ResourceReport:
        if order_i == 1:
            return resources.estimate_first_order(
                n_sites, k_classes, j_val, t, epsilon, timing=timing,
                heisenberg=heisenberg, edges_per_sweep=edges_per_sweep,
            )
        return resources.estimate_higher_order(
            order_i // 2, n_sites, k_classes, j_val, t, epsilon, timing=timing,
            heisenberg=heisenberg, edges_per_sweep=edges_per_sweep,
        )

    if compare_orders:
        orders = [int(p) for p in compare_orders.split(",") if p]
        lines = ["order,m,N,T"]
        for order_i in orders:
            rep = one(order_i)
            lines.append(
                f"{order_i},{rep.m},{rep.interaction_gates},"
                f"{format_float(rep.simulation_time)}"
            )
        _write_artifact("\n".join(lines) + "\n", out)
        return
    rep = one(order)
    doc = {
        "order": rep.order,
        "m": rep.m,
        "interaction_gates": rep.interaction_gates,
        "cnots": rep.cnots,
        "depth": rep.depth,
        "simulation_time": rep.simulation_time,
        "assumptions": rep.assumptions,
    }
    if slope > 0:
        doc["scaled_time_bound"] = resources.estimate_scaled(k_classes, slope, t)
    table = "\n".join(
        [
            f"order              {rep.order}",
            f"steps m            {rep.m}",
            f"interaction gates  {rep.interaction_gates}",
            f"CNOTs              {rep.cnots}",
            f"depth              {rep.depth}",
            f"simulation time    {format_float(rep.simulation_time)}",
        ]
        + (
            [f"scaled-gate bound  {format_float(doc['scaled_time_bound'])}"]
            if slope > 0
            else []
        )
    )
    _write_artifact(dump_json(doc), out, table)


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--order", type=int, default=1, show_default=True)
@click.option("--time", "t", type=float, default=1.0, show_default=True)
@click.option("--m-grid", default="4,8,16,32,64", show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
@_guard
def verify(ctx, model_path, order, t, m_grid, jobs, out) -> None:
    """Measure Trotter error against the dense oracle over a step grid.

    Writes CSV with header m,error,bound,order (bound only for order 1)
    and reports the fitted log-log slope of error versus m.
    """
    seed = ctx.obj["seed"]
    model = _load_model(model_path)
    coloring = coloring_mod.color_model(model)
    formula = trotter.formula_for_order(order, coloring.num_classes)
    ms = [int(p) for p in m_grid.split(",") if p]
    if not ms or any(m < 1 for m in ms):
        raise ValueError(f"bad --m-grid {m_grid!r}")
    reference = oracle.exact_evolution(model, t)

    def measure(m: int) -> float:
        return oracle.trotter_error(
            model, coloring, formula, m, t, reference=reference, seed=seed
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            errors = list(pool.map(measure, ms))
    else:
        errors = [measure(m) for m in ms]
    lines = ["m,error,bound,order"]
    for m, err in zip(ms, errors):
        if order == 1:
            bound = trotter.first_order_error_bound(
                coloring.num_classes, model.n, model.j_max, t, m
            )
            bound_txt = format_float(bound)
        else:
            bound_txt = ""
        lines.append(f"{m},{format_float(err)},{bound_txt},{order}")
    slope = _loglog_slope(ms, errors)
    _write_artifact("\n".join(lines) + "\n", out)
    click.echo(f"slope={slope:.4f}", err=True)


def _loglog_slope(ms: list[int], errors: list[float]) -> float:
    xs = np.log(np.asarray(ms, dtype=float))
    ys = np.log(np.asarray(errors, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


if __name__ == "__main__":
    main()
