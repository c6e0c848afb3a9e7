"""
Property suite behind the ``verify`` command.

Each check evaluates one mathematical property with the package's own
evaluators and records pass/fail with a short detail string. Quick mode runs
cheaper variants and skips the gradient flow.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from dipolar.evaluators.boundary_evaluator import energy_boundary
from dipolar.evaluators.gamma_evaluator import gamma_limit_energy, gamma_limit_energy_modified
from dipolar.geometry.curves import curve_perimeter, make_disk, make_ellipse, make_random_star, make_stripe
from dipolar.geometry.raster import rasterize
from dipolar.geometry.shapes import ShapeConfig
from dipolar.kernels.elliptic import elliptic_E, elliptic_K
from dipolar.kernels.params import KernelParams
from dipolar.services.ansatz_service import (
    disk_energy_gamma,
    f_stripe,
    g_second,
    h1,
    h2,
    h2_majorant,
    stripe_energy_gamma,
)
from dipolar.services.energy_service import cut_disk_delta, lower_bound, rescale_params, rescaling_excess
from dipolar.services.flow_service import circle_rigidity_check, gradient_flow, osc_curvature
from dipolar.services.phase_service import CRITICAL_ELL, Winner, compare_phases
from dipolar.utils.exceptions import DipolarError, VerificationError

logger = logging.getLogger(__name__)

DISK_GAMMA = -2.0 * math.pi * math.log(4.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "seconds": round(self.seconds, 3)}


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


class VerifyService:
    """Runs the property checks."""

    def __init__(self, quick: bool = False, seed: int = 20190101, workers: int = 1):
        self.quick = quick
        self.seed = seed
        self.workers = workers

    def checks(self) -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
        suite = [
            ("elliptic_regression", self.check_elliptic),
            ("convexity_certificate", self.check_convexity),
            ("disk_gamma_oracle", self.check_disk_gamma),
            ("stripe_oracle", self.check_stripe),
            ("phase_transition", self.check_phase),
            ("delta_monotonicity", self.check_monotonicity),
            ("rescaling_identity", self.check_rescaling),
            ("lower_bound", self.check_lower_bound),
            ("supercritical_cutting", self.check_cutting),
        ]
        if not self.quick:
            suite.append(("subcritical_flow", self.check_flow))
        return suite

    def run(self, raise_on_failure: bool = True) -> VerificationReport:
        """
        Run every check in order.

        Raises:
            VerificationError: If a check fails and ``raise_on_failure`` is set
        """
        report = VerificationReport()
        for name, check in self.checks():
            start = time.perf_counter()
            try:
                passed, detail = check()
            except DipolarError as e:
                passed, detail = False, f"{type(e).__name__}: {e}"
            result = CheckResult(name, bool(passed), detail, time.perf_counter() - start)
            report.checks.append(result)
            level = logging.INFO if result.passed else logging.ERROR
            logger.log(level, f"{name}: {'PASS' if result.passed else 'FAIL'} ({detail})")
        if raise_on_failure and not report.passed:
            raise VerificationError(
                f"{len(report.failures)} of {len(report.checks)} checks failed",
                [f"{c.name}: {c.detail}" for c in report.failures],
            )
        return report

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    # -- checks -------------------------------------------------------------
    def check_elliptic(self) -> Tuple[bool, str]:
        majorant = h2_majorant(0.85)
        ok = abs(majorant + 0.850922) < 1e-6
        ok &= abs(elliptic_K(0.0) - 0.5 * math.pi) < 1e-15 and elliptic_E(1.0) == 1.0
        return ok, f"1 + 7E(0.85) - 4.125 K(0.85) = {majorant:.7f}"

    def check_convexity(self) -> Tuple[bool, str]:
        count = 200 if self.quick else 2000
        alphas = np.geomspace(1e-3, 1e3, count)
        worst_g = min(g_second(a) for a in alphas)
        ts = np.linspace(0.0, 1.0, (1000 if self.quick else 10000) + 1)[1:-1]
        worst_h2 = min(h2(t) for t in ts)
        ordered = all(h1(t) >= h2(t) for t in ts)
        minorant = all(h2(t) >= t - 0.375 * math.pi * t ** 3 for t in ts if t < 0.85)
        ok = worst_g > 0 and worst_h2 > 0 and ordered and minorant and h2_majorant(0.85) < 0
        return ok, (f"min g''={worst_g:.3e}, min h2={worst_h2:.3e}, h1>=h2: {ordered}, "
                    f"cubic minorant: {minorant}")

    def check_disk_gamma(self) -> Tuple[bool, str]:
        n = 512 if self.quick else 2048
        tol = 1e-5 if self.quick else 1e-6
        disk = ShapeConfig.from_curves(make_disk(1.0))
        plain = gamma_limit_energy(disk, n, self.workers).total
        modified = gamma_limit_energy_modified(disk, 2.0, n, self.workers).total
        expected = disk_energy_gamma(1.0, 2.0)
        ok = abs(plain - DISK_GAMMA) <= tol and abs(modified - expected) <= tol
        return ok, f"E10={plain:.9f} (exact {DISK_GAMMA:.9f}), F10l={modified:.9f} (exact {expected:.9f})"

    def check_stripe(self) -> Tuple[bool, str]:
        value = stripe_energy_gamma(1.0, 4.0)
        swapped = stripe_energy_gamma(0.25, 4.0)
        per_mass = f_stripe(0.5, 1.0)
        ok = abs(value - swapped) < 1e-10 and abs(per_mass - (0.5 * math.log(5.0) - 2.0)) < 1e-12
        return ok, f"E(S_1,4)={value:.10f}, swapped={swapped:.10f}, f_stripe(1/2,1)={per_mass:.6f}"

    def check_phase(self) -> Tuple[bool, str]:
        offsets = [0.005, 0.01, 0.02]
        points = [compare_phases(CRITICAL_ELL + d) for d in offsets]
        degenerate = compare_phases(0.25)
        ok = all(p.winner is Winner.STRIPE for p in points) and degenerate.winner is Winner.DEGENERATE
        winners = ", ".join(f"{d}: {p.winner.value}" for d, p in zip(offsets, points))
        return ok, winners

    def check_monotonicity(self) -> Tuple[bool, str]:
        shapes = {"disk": make_disk(1.0)}
        if not self.quick:
            shapes["ellipse"] = make_ellipse(1.5, 1.0 / 1.5)
            shapes["rounded_stripe"] = make_stripe(0.5, 8.0, 0.3)
        deltas = [1e-2, 1e-3, 1e-4]
        n = 256 if self.quick else 512
        details, ok = [], True
        for name, curve in shapes.items():
            config = ShapeConfig.from_curves(curve)
            limit = gamma_limit_energy(config, None, self.workers).total
            scaled = [KernelParams(1.0, d).log_delta * energy_boundary(config, KernelParams(1.0, d), n,
                                                                       self.workers).total
                      for d in deltas]
            gaps = [value - limit for value in scaled]
            ok &= all(b <= a for a, b in zip(scaled, scaled[1:])) and all(g > 0 for g in gaps)
            details.append(f"{name}: gaps " + ", ".join(f"{g:.4f}" for g in gaps))
        return ok, "; ".join(details)

    def _random_configs(self, count: int) -> List[ShapeConfig]:
        rng = self._rng()
        return [ShapeConfig.from_curves(make_random_star(rng)) for _ in range(count)]

    def check_rescaling(self) -> Tuple[bool, str]:
        params = KernelParams(1.0, 1e-2)
        worst, slack = 0.0, math.inf
        n = 256 if self.quick else 512
        alphas = (0.5, 2.0) if self.quick else (0.5, 1.5, 2.0, 4.0)
        for config in self._random_configs(2 if self.quick else 20):
            base = energy_boundary(config, params, n, self.workers).total
            for alpha in alphas:
                scaled_params, _ = rescale_params(alpha, params, config.mass)
                scaled = energy_boundary(config.dilate(1.0 / alpha), scaled_params, n, self.workers).total
                worst = max(worst, abs(alpha * scaled - base) / abs(base))
                if alpha > 1.0:
                    excess, bound = rescaling_excess(config, params, alpha, n, self.workers)
                    slack = min(slack, bound - excess)
        ok = worst <= 1e-6 and slack >= -1e-9
        return ok, f"max relative defect {worst:.3e}, min slack {slack:.3e}"

    def check_lower_bound(self) -> Tuple[bool, str]:
        count = 5 if self.quick else 50
        n = 256 if self.quick else 512
        worst = math.inf
        for lam in (0.3, 0.7, 1.0):
            params = KernelParams(lam, 1e-2)
            for config in self._random_configs(count):
                perimeter = curve_perimeter(config.single_curve)
                total = energy_boundary(config, params, n, self.workers).total
                bound = lower_bound(perimeter, config.mass, params)
                worst = min(worst, (total - bound) / perimeter)
        return worst >= -1e-6, f"min (E - bound)/P = {worst:.3e}"

    def check_cutting(self) -> Tuple[bool, str]:
        omega = rasterize(ShapeConfig.from_curves(make_disk(5.0)), 0.05)
        strong = cut_disk_delta(omega, 2.0, KernelParams(2.0, 1e-3))
        weak = cut_disk_delta(omega, 2.0, KernelParams(0.5, 1e-3))
        return strong < 0 < weak, f"lambda=2: {strong:.4f}, lambda=0.5: {weak:.4f}"

    def check_flow(self) -> Tuple[bool, str]:
        params = KernelParams(0.5, 1e-3)
        start = ShapeConfig.from_curves(make_ellipse(math.sqrt(1.5), 1.0 / math.sqrt(1.5)))
        state = gradient_flow(start, params, max_steps=20000, tol=1e-3, workers=self.workers)
        osc = osc_curvature(state.jordan)
        report = circle_rigidity_check(state.jordan)
        disk = energy_boundary(ShapeConfig.from_curves(make_disk(1.0)), params, 128, self.workers).total
        close = abs(state.energy - disk) <= 1e-3 * abs(disk)
        ok = osc < 1e-2 and report.holds and state.energy < state.energy_trace[0] and close
        return ok, f"steps={state.step}, osc kappa={osc:.3e}, E={state.energy:.8f}, disk={disk:.8f}"
