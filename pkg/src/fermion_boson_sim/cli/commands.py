"""Subcommand handlers; each returns the process exit code."""
import argparse
import math
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from fermion_boson_sim.core.errors import ConfigurationError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.model.hamiltonian import coupling_for_alpha, holstein, holstein_alpha, load_model
from fermion_boson_sim.oracle.fock import ed_holstein, ed_zn
from fermion_boson_sim.oracle.operators import load_fock_state
from fermion_boson_sim.prep.gaussian import gaussian_amplitudes, product_state
from fermion_boson_sim.prep.variational import prepare_gaussian_variational
from fermion_boson_sim.qpe.estimator import ground_energy_estimate, load_reference_config, qpe_run
from fermion_boson_sim.qpe.phonons import phonon_distribution
from fermion_boson_sim.schemas.hamiltonian_models import HamiltonianSpec
from fermion_boson_sim.schemas.run_models import OutputFormat, QpeConfig, RunConfig
from fermion_boson_sim.services import figures
from fermion_boson_sim.services.golden_service import GoldenService
from fermion_boson_sim.services.storage_service import get_storage_service, render_csv, render_json
from fermion_boson_sim.synth.resources import resource_report

logger = get_logger(__name__)

_INTERNAL = {"handler", "command", "action", "out", "format"}


def run_config(args: argparse.Namespace) -> RunConfig:
    """Echo of the invocation; validation enforces seeds on stochastic subcommands"""
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _INTERNAL}
    return RunConfig(
        command=args.command,
        action=args.action,
        params=params,
        out=getattr(args, "out", None),
        format=getattr(args, "format", OutputFormat.CSV.value),
    )


def _write(text: str, out: str) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    get_storage_service(".").save_file(text, out)


def emit_table(run: RunConfig, columns: Sequence[str], rows: List[Dict[str, Any]]) -> None:
    echo = run.model_dump(mode="json")
    if run.format == OutputFormat.JSON:
        _write(render_json({"config": echo, "columns": list(columns), "rows": rows}), run.out)
    else:
        _write(render_csv(rows, columns, echo), run.out)


def emit_json(run: RunConfig, payload: Any) -> None:
    _write(render_json(payload), run.out)


def _spec(args: argparse.Namespace) -> HamiltonianSpec:
    if getattr(args, "model", None):
        return load_model(args.model)
    return holstein_alpha(args.alpha, args.t, args.omega, args.sites)


def build_holstein(args: argparse.Namespace) -> int:
    run = run_config(args)
    if (args.g is None) == (args.alpha is None):
        raise ConfigurationError("give exactly one of --g and --alpha")
    g = args.g if args.g is not None else coupling_for_alpha(args.alpha, args.t, args.omega)
    spec = holstein(args.t, g, args.omega, args.sites, periodic=not args.open)
    _write(spec.to_json() + "\n", run.out)
    return 0


def oscdiag_spectrum(args: argparse.Namespace) -> int:
    run = run_config(args)
    emit_table(run, *figures.fig1(args.nx, args.levels))
    return 0


def oscdiag_commutator(args: argparse.Namespace) -> int:
    run = run_config(args)
    emit_table(run, *figures.fig2(args.nx, args.eps))
    return 0


def synth_report(args: argparse.Namespace) -> int:
    run = run_config(args)
    spec = _spec(args)
    layout = QubitLayout.standard(spec.n_orbitals, spec.n_oscillators, args.nx)
    report = resource_report(spec, layout, args.dt)
    emit_json(run, {"config": run.model_dump(mode="json"), "report": report.model_dump()})
    return 0


def prep_gaussian(args: argparse.Namespace) -> int:
    run = run_config(args)
    schedule, _ = prepare_gaussian_variational(args.nx, args.ns, args.seed, args.restarts, args.budget)
    emit_json(run, schedule.model_dump())
    return 0


def polaron_input(spec: HamiltonianSpec, n_x: int, register: Optional[np.ndarray] = None) -> Any:
    """One register state per site (exact Gaussian by default) times the symmetric one-electron superposition"""
    layout = QubitLayout.standard(spec.n_orbitals, spec.n_oscillators, n_x)
    fermion = np.zeros(2 ** spec.n_orbitals, dtype=complex)
    for orbital in range(spec.n_orbitals):
        fermion[1 << orbital] = 1.0 / math.sqrt(spec.n_orbitals)
    if register is None:
        register = gaussian_amplitudes(n_x)
    registers = [register] * spec.n_oscillators
    return layout, product_state(layout, fermion, registers)


def qpe_polaron(args: argparse.Namespace) -> int:
    run = run_config(args)
    reference = load_reference_config(args.reference)
    overrides = {
        "ancillas": args.ancillas,
        "steps_per_unit": args.steps_per_unit,
        "shots": args.shots,
        "seed": args.seed,
        "mode": args.mode,
    }
    config = QpeConfig(**{**reference.model_dump(), **{k: v for k, v in overrides.items() if v is not None}})
    spec = _spec(args)
    register = None
    if args.prep == "variational":
        schedule, prepared = prepare_gaussian_variational(args.nx, args.ns, args.seed, args.restarts, args.budget)
        register = prepared.physical()
        logger.info("Polaron registers prepared variationally", steps=args.ns, fidelity=schedule.fidelity)
    layout, state = polaron_input(spec, args.nx, register)
    histogram = qpe_run(config, state, spec, layout)
    logger.info("Polaron energy estimate", energy=ground_energy_estimate(histogram), modal=histogram.modal_energy())
    emit_table(run, ["bin", "phase", "energy", "count"], histogram.rows())
    return 0


def qpe_zn(args: argparse.Namespace) -> int:
    run = run_config(args)
    g = coupling_for_alpha(args.alpha)
    result = ed_holstein(1.0, g, 1.0, sites=2, n_ph=args.nph)
    layout = QubitLayout.standard(2, 2, args.nx)
    state = load_fock_state(result.ground, layout, args.nph)
    measured = phonon_distribution(state, layout, args.shots, args.seed, ancillas=args.ancillas)
    exact = ed_zn(result)
    rows = [
        {"n": n, "Z_qpe": float(z), "Z_ed": float(exact[n]) if n < exact.size else 0.0}
        for n, z in enumerate(measured.z)
    ]
    emit_table(run, ["n", "Z_qpe", "Z_ed"], rows)
    return 0


def oracle_ed(args: argparse.Namespace) -> int:
    run = run_config(args)
    result = ed_holstein(1.0, coupling_for_alpha(args.alpha), 1.0, sites=args.sites, n_ph=args.nph)
    emit_json(run, {
        "config": run.model_dump(mode="json"),
        "alpha": args.alpha,
        "E0": result.ground_energy,
        "Z": result.z.tolist(),
        "nph": args.nph,
    })
    return 0


def oracle_golden(args: argparse.Namespace) -> int:
    service = GoldenService(get_storage_service(args.out_dir) if args.out_dir else None)
    kwargs = {"n_ph": args.nph, "n_check": args.nph_check}
    if args.alphas:
        kwargs["alphas"] = args.alphas
    path = service.generate(**kwargs)
    sys.stdout.write(path + "\n")
    return 0


def fig_fig1(args: argparse.Namespace) -> int:
    emit_table(run_config(args), *figures.fig1(args.nx, args.levels))
    return 0


def fig_fig2(args: argparse.Namespace) -> int:
    emit_table(run_config(args), *figures.fig2(args.nx, args.eps))
    return 0


def fig_fig3(args: argparse.Namespace) -> int:
    emit_table(run_config(args), *figures.fig3(args.nx, args.levels, args.eps))
    return 0


def fig_fig9(args: argparse.Namespace) -> int:
    emit_table(run_config(args), *figures.fig9(args.alphas, args.nph, args.show))
    return 0
