#!/usr/bin/env python3
"""
dipolar - nonlocal isoperimetric energies of planar shapes

Command line front end binding the evaluators, the ansatz and phase analysis,
the gradient flow and the property suite.

Usage:
    dipolar energy --shape disk:1 --lambda 1 --delta 0.001
    dipolar energy --shape disk:1 --evaluator gamma
    dipolar ansatz --ansatz stripe --a 1 --m 4
    dipolar phase-scan --l 0.275:0.5:0.005 --with-mass
    dipolar optimize --start ellipse:1.5 --lambda 0.5 --delta 1e-3
    dipolar verify --quick
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv

from dipolar.config import RunConfig, dump_effective_config, get_config, load_run_config
from dipolar.evaluators.base_evaluator import EvaluatorTag
from dipolar.evaluators.gamma_evaluator import gamma_limit_energy_modified
from dipolar.geometry.shapes import parse_shape_spec
from dipolar.services import output_service
from dipolar.services.ansatz_service import disk_result, stripe_energy_delta, stripe_result
from dipolar.services.energy_service import EnergyService, disk_energy_delta
from dipolar.services.flow_service import FlowState, gradient_flow, osc_curvature
from dipolar.services.logging_service import RunLogger, setup_logging
from dipolar.services.phase_service import crossover_scan, phase_curves
from dipolar.services.verify_service import VerifyService
from dipolar.utils.exceptions import (
    EXIT_OK,
    FlowAbortedError,
    ValidationError,
    VerificationError,
    handle_cli_error,
)
from dipolar.utils.validators import parse_range

load_dotenv()

logger = logging.getLogger(__name__)

FLOW_NODES = 128


def _add_kernel_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--lambda", dest="lam", type=float, help="Dipolar strength (default: 1)")
    parser.add_argument("--delta", type=float, help="Cutoff length in (0, 1/2)")
    parser.add_argument("--ell", help="Layer separation, a positive number or 'inf' (default)")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one sub-parser per command."""
    parser = argparse.ArgumentParser(
        prog="dipolar",
        description="Nonlocal isoperimetric energies of planar shapes",
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=None,
        help="Set the logging level (default: INFO)",
    )
    parser.add_argument("--workers", type=int, help="Worker threads (default: available cores)")
    parser.add_argument("--config", help="JSON file with run settings")
    parser.add_argument("--output-dir", help="Directory for result files")
    parser.add_argument("--seed", type=int, help="Seed for randomized shapes")

    commands = parser.add_subparsers(dest="command", required=True)

    energy = commands.add_parser("energy", help="Evaluate the energy of a shape")
    energy.add_argument("--shape", help="disk:r, ellipse:a,b, ellipse:aspect, stripe:a,m[,rho] or a JSON file")
    _add_kernel_arguments(energy)
    energy.add_argument("--evaluator", help="grid, boundary, gamma, gamma-modified or gamma-subcritical")
    energy.add_argument("--h", type=float, help="Grid spacing (default: delta/8)")
    energy.add_argument("--nodes", type=int, help="Boundary nodes per component")
    energy.add_argument("--gamma-nodes", type=int, help="Nodes for the limit evaluators")
    energy.add_argument("--all", dest="compare_all", action="store_true", default=None,
                        help="Run every applicable evaluator")
    energy.add_argument("--plot", action="store_true", help="Also draw the shape as SVG")

    ansatz = commands.add_parser("ansatz", help="Closed-form disk and stripe energies")
    ansatz.add_argument("--ansatz", choices=["disk", "stripe", "curves"], help="Ansatz (default: disk)")
    ansatz.add_argument("--r", type=float, help="Disk radius")
    ansatz.add_argument("--a", type=float, help="Inverse stripe width")
    ansatz.add_argument("--m", type=float, help="Stripe mass")
    _add_kernel_arguments(ansatz)

    scan = commands.add_parser("phase-scan", help="Disk against stripe across layer separations")
    scan.add_argument("--l", dest="l_range", help="start:stop:step or a comma list")
    scan.add_argument("--with-mass", action="store_true", default=None,
                      help="Estimate the mass threshold of STRIPE rows")

    optimize = commands.add_parser("optimize", help="Area-preserving gradient flow")
    optimize.add_argument("--start", dest="shape", help="Initial shape spec")
    _add_kernel_arguments(optimize)
    optimize.add_argument("--evaluator", help="Line-search energy: boundary (default) or grid")
    optimize.add_argument("--nodes", type=int, help=f"Curve nodes (default: {FLOW_NODES})")
    optimize.add_argument("--tol", type=float, help="Residual tolerance (default: 1e-3)")
    optimize.add_argument("--max-steps", type=int, help="Step limit (default: 2000)")
    optimize.add_argument("--dt0", type=float, help="Initial time step")
    optimize.add_argument("--frames", type=int, help="Write an SVG frame every N steps")

    verify = commands.add_parser("verify", help="Run the property suite")
    verify.add_argument("--quick", action="store_true", default=None, help="Cheaper checks, no flow")

    return parser


def _cli_values(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"config", "log_level", "plot"}
    values = {key: value for key, value in vars(args).items() if key not in skip}
    if "lam" in values:
        values["lambda"] = values.pop("lam")
    return values


class CommandRunner:
    """Dispatches one parsed command and writes its outputs."""

    def __init__(self, run_config: RunConfig, parser: argparse.ArgumentParser,
                 args: argparse.Namespace):
        self.config = run_config
        self.parser = parser
        self.args = args
        self.output_dir = Path(run_config.output_dir)
        self.headline: Optional[float] = None
        self.evaluator: Optional[str] = None

    def run(self) -> int:
        handler = {
            "energy": self.cmd_energy,
            "ansatz": self.cmd_ansatz,
            "phase-scan": self.cmd_phase_scan,
            "optimize": self.cmd_optimize,
            "verify": self.cmd_verify,
        }[self.config.command]
        return handler()

    def _require_shape(self):
        if not self.config.shape:
            self.parser.error(f"{self.config.command} requires a shape")
        return parse_shape_spec(self.config.shape)

    def _gamma_nodes(self) -> int:
        return self.config.gamma_nodes or get_config().GAMMA_NODES

    def _emit(self, name: str, data: Any) -> Path:
        path = output_service.write_json(self.output_dir / name, data)
        print(output_service.to_json_text(data))
        return path

    def cmd_energy(self) -> int:
        config = self._require_shape()
        params = self.config.kernel_params()
        service = EnergyService(
            nodes=self.config.nodes or get_config().NODES,
            gamma_nodes=self._gamma_nodes(),
            grid_h=self.config.h,
            workers=self.config.workers,
            direct_limit=get_config().GRID_DIRECT_LIMIT,
        )

        if self.config.compare_all:
            comparison = service.evaluate_all(config, params)
            self._emit("energy_all.json", comparison.to_dict())
            self.evaluator = "all"
            return EXIT_OK

        tag = service.resolve(self.config.evaluator)
        self.evaluator = tag.value
        if params is None and service.requires_params(tag):
            self.parser.error(f"evaluator {tag.value} requires --delta")
        if tag is EvaluatorTag.GAMMA_LIMIT_MODIFIED and params is None:
            result = gamma_limit_energy_modified(config, self.config.ell, self._gamma_nodes(),
                                                 self.config.workers)
        else:
            result = service.evaluate(config, params, tag)

        document = result.to_dict()
        if params is not None and tag in (EvaluatorTag.GRID, EvaluatorTag.BOUNDARY):
            document["log_delta_total"] = params.log_delta * result.total
        self.headline = result.total
        self._emit("energy.json", document)
        if self.args.plot:
            output_service.plot_shape_svg(self.output_dir / "shape.svg", config, title=tag.value)
        return EXIT_OK

    def cmd_ansatz(self) -> int:
        kind = self.config.ansatz or "disk"
        ell = self.config.ell
        params = self.config.kernel_params()

        if kind == "curves":
            if ell == "inf":
                raise ValidationError("phase curves need a finite --ell")
            a_values = np.linspace(0.01, 3.0, 300)
            disk, stripe = phase_curves(ell, a_values)
            rows = [{"a": a, "f_disk": d, "f_stripe": s} for a, d, s in zip(a_values, disk, stripe)]
            output_service.write_csv(self.output_dir / "phase_curves.csv", rows, ["a", "f_disk", "f_stripe"])
            output_service.plot_phase_svg(self.output_dir / "phase_curves.svg", ell, a_values)
            logger.info(f"Wrote phase curves for ell={ell}")
            return EXIT_OK

        if kind == "disk":
            r = self.config.r or 1.0
            result = disk_result(r, ell)
            document = result.to_dict()
            if params is not None:
                document["energy_delta"] = disk_energy_delta(r, params)
        else:
            if self.config.a is None or self.config.m is None:
                self.parser.error("the stripe ansatz requires --a and --m")
            result = stripe_result(self.config.a, self.config.m, ell)
            document = result.to_dict()
            if params is not None:
                document["energy_delta"] = stripe_energy_delta(self.config.a, self.config.m, params)
        self.headline = result.energy
        self._emit(f"ansatz_{kind}.json", document)
        return EXIT_OK

    def cmd_phase_scan(self) -> int:
        if not self.config.l_range:
            self.parser.error("phase-scan requires --l")
        grid = parse_range(self.config.l_range)
        points = crossover_scan(grid, workers=self.config.workers, with_mass=bool(self.config.with_mass))
        output_service.write_phase_csv(self.output_dir / "phase_scan.csv", points)
        output_service.plot_scan_svg(self.output_dir / "phase_scan.svg", points)
        for point in points:
            print(f"l={point.ell:.6g}  a_opt={point.a_opt}  winner={point.winner.value}  M_est={point.m_est}")
        return EXIT_OK

    def _write_flow(self, state: FlowState, prefix: str = "flow"):
        rows = state.trace_rows()
        output_service.write_flow_trace(self.output_dir / f"{prefix}_trace.csv", rows)
        if rows:
            output_service.plot_trace_svg(self.output_dir / f"{prefix}_trace.svg", rows)
        output_service.write_json(self.output_dir / f"{prefix}_state.json", state.to_dict())

    def cmd_optimize(self) -> int:
        config = self._require_shape()
        params = self.config.kernel_params()
        if params is None:
            self.parser.error("optimize requires --delta")
        on_step = None
        if self.config.frames:
            on_step = output_service.frame_recorder(self.output_dir / "frames", self.config.frames)
        energy = EvaluatorTag.GRID if self.config.evaluator.lower() == "grid" else EvaluatorTag.BOUNDARY
        try:
            state = gradient_flow(
                config, params, energy=energy,
                max_steps=self.config.max_steps, dt0=self.config.dt0, tol=self.config.tol,
                n=self.config.nodes or FLOW_NODES, workers=self.config.workers, on_step=on_step,
            )
        except FlowAbortedError as e:
            if e.state is not None:
                self._write_flow(e.state, prefix="aborted")
            raise
        self._write_flow(state)
        self.headline = state.energy
        self.evaluator = energy.value
        logger.info(f"Flow stopped after {state.step} steps ({state.stop_reason}); "
                    f"osc kappa={osc_curvature(state.jordan):.3e}")
        print(output_service.to_json_text({k: v for k, v in state.to_dict().items() if k != "shape"}))
        return EXIT_OK

    def cmd_verify(self) -> int:
        service = VerifyService(quick=bool(self.config.quick), seed=self.config.seed,
                                workers=self.config.workers)
        report = service.run(raise_on_failure=False)
        output_service.write_json(self.output_dir / "verify.json", report.to_dict())
        for check in report.checks:
            print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}  ({check.seconds:.2f}s)  {check.detail}")
        if not report.passed:
            raise VerificationError(
                f"{len(report.failures)} of {len(report.checks)} checks failed",
                [f"{c.name}: {c.detail}" for c in report.failures],
            )
        return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = get_config()
    setup_logging(args.log_level or settings.LOG_LEVEL, settings.LOG_DIR)

    run_logger = RunLogger(settings.LOG_DIR)
    run_id = run_logger.new_run_id()
    runner: Optional[CommandRunner] = None
    try:
        run_config = load_run_config(_cli_values(args), args.config)
        runner = CommandRunner(run_config, parser, args)
        dump_effective_config(run_config, run_config.output_dir)
        run_logger.log_metadata(run_id, run_config.to_dict())
        logger.info(f"Run {run_id}: {run_config.command}")
        code = runner.run()
        run_logger.log_run(run_id, run_config.command, runner.evaluator, runner.headline)
        return code
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        run_logger.log_run(run_id, args.command, status="error", error="interrupted")
        return 130
    except SystemExit:
        raise
    except Exception as e:
        evaluator = runner.evaluator if runner is not None else None
        run_logger.log_run(run_id, args.command, evaluator, status="error", error=str(e))
        return handle_cli_error(e)


if __name__ == "__main__":
    sys.exit(main())
