import argparse
from typing import List

from fermion_boson_sim import __version__
from fermion_boson_sim.cli import commands
from fermion_boson_sim.schemas.run_models import EvolutionMode, OutputFormat


def int_list(value: str) -> List[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def float_list(value: str) -> List[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


def _output(parser: argparse.ArgumentParser, default: OutputFormat = OutputFormat.CSV) -> None:
    parser.add_argument("--out", default=None, help="Output file (stdout when omitted)")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=default.value)


def _holstein(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", default=None, help="Model JSON file (overrides the Holstein flags)")
    parser.add_argument("--alpha", type=float, default=1.0)
    parser.add_argument("--t", type=float, default=1.0)
    parser.add_argument("--omega", type=float, default=1.0)
    parser.add_argument("--sites", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermion-boson-sim", description="Fermion-boson lattice simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="command", required=True)

    model = groups.add_parser("model", help="Build model files").add_subparsers(dest="action", required=True)
    p = model.add_parser("build-holstein")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--sites", type=int, default=2)
    p.add_argument("--open", action="store_true", help="Open chain")
    _output(p, OutputFormat.JSON)
    p.set_defaults(handler=commands.build_holstein)

    osc = groups.add_parser("oscdiag", help="Oscillator grid diagnostics").add_subparsers(dest="action", required=True)
    p = osc.add_parser("spectrum")
    p.add_argument("--nx", type=int, default=6)
    p.add_argument("--levels", type=int, default=16)
    _output(p)
    p.set_defaults(handler=commands.oscdiag_spectrum)
    p = osc.add_parser("commutator")
    p.add_argument("--nx", type=int_list, default=[6])
    p.add_argument("--eps", type=float, default=1e-3)
    _output(p)
    p.set_defaults(handler=commands.oscdiag_commutator)

    synth = groups.add_parser("synth", help="Circuit synthesis").add_subparsers(dest="action", required=True)
    p = synth.add_parser("report")
    _holstein(p)
    p.add_argument("--nx", type=int, default=4)
    p.add_argument("--dt", type=float, default=None)
    _output(p, OutputFormat.JSON)
    p.set_defaults(handler=commands.synth_report)

    prep = groups.add_parser("prep", help="State preparation").add_subparsers(dest="action", required=True)
    p = prep.add_parser("gaussian")
    p.add_argument("--nx", type=int, default=6)
    p.add_argument("--ns", type=int, default=3)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    _output(p, OutputFormat.JSON)
    p.set_defaults(handler=commands.prep_gaussian)

    qpe = groups.add_parser("qpe", help="Phase estimation").add_subparsers(dest="action", required=True)
    p = qpe.add_parser("polaron")
    _holstein(p)
    p.add_argument("--nx", type=int, default=6)
    p.add_argument("--reference", default=None, help="QPE config JSON (defaults to the versioned reference)")
    p.add_argument("--ancillas", type=int, default=None)
    p.add_argument("--steps-per-unit", type=int, default=None)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=[m.value for m in EvolutionMode], default=None)
    p.add_argument("--prep", choices=["variational", "exact"], default="variational",
                   help="Register preparation; variational runs SPSA with --seed")
    p.add_argument("--ns", type=int, default=3)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    _output(p)
    p.set_defaults(handler=commands.qpe_polaron)
    p = qpe.add_parser("zn")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--nx", type=int, default=6)
    p.add_argument("--nph", type=int, default=45)
    p.add_argument("--ancillas", type=int, default=8)
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    _output(p)
    p.set_defaults(handler=commands.qpe_zn)

    oracle = groups.add_parser("oracle", help="Classical references").add_subparsers(dest="action", required=True)
    p = oracle.add_parser("ed")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--nph", type=int, default=45)
    p.add_argument("--sites", type=int, default=2)
    _output(p, OutputFormat.JSON)
    p.set_defaults(handler=commands.oracle_ed)
    p = oracle.add_parser("golden")
    p.add_argument("--alphas", type=float_list, default=None)
    p.add_argument("--nph", type=int, default=45)
    p.add_argument("--nph-check", type=int, default=60)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(handler=commands.oracle_golden)

    fig = groups.add_parser("fig", help="Figure data tables").add_subparsers(dest="action", required=True)
    p = fig.add_parser("fig1")
    p.add_argument("--nx", type=int, default=6)
    p.add_argument("--levels", type=int, default=16)
    _output(p)
    p.set_defaults(handler=commands.fig_fig1)
    p = fig.add_parser("fig2")
    p.add_argument("--nx", type=int_list, default=[4, 5, 6, 7])
    p.add_argument("--eps", type=float, default=1e-3)
    _output(p)
    p.set_defaults(handler=commands.fig_fig2)
    p = fig.add_parser("fig3")
    p.add_argument("--nx", type=int_list, default=[3, 4, 5, 6, 7, 8])
    p.add_argument("--levels", type=int_list, default=[0, 1, 2, 5, 10, 20, 40])
    p.add_argument("--eps", type=float, default=1e-3)
    _output(p)
    p.set_defaults(handler=commands.fig_fig3)
    p = fig.add_parser("fig9")
    p.add_argument("--alphas", type=float_list, default=[0.25, 0.5, 1.0, 1.5, 2.0, 3.0])
    p.add_argument("--nph", type=int, default=45)
    p.add_argument("--show", type=int, default=15)
    _output(p)
    p.set_defaults(handler=commands.fig_fig9)

    return parser
