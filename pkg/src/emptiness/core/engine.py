"""
Emptiness Core Engine

This module contains the EmptinessEngine class that orchestrates EFP runs
over the four routes, L- and beta-scans with scaling fits, the numerical
verification suites and the osculating-path demo.
"""

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger
from tqdm import tqdm

from .config import Config, RunConfig
from .errors import BudgetExceededError, CheckFailure, EmptinessError, ValidationError
from .logger import log_function_call, log_run
from ..bounds import (
    VerifyResult,
    boundary_volume_bound,
    boundary_volume_exact,
    chessboard_exponent,
    chessboard_verify,
    den_verify,
    entropy_bound,
    fit_scaling,
    holder_verify,
    num_bound,
    pf_lower_bound,
    rp_verify,
    window_count,
)
from ..exact import (
    block_weight,
    build_hamiltonian,
    identity_operator,
    log_partition_function,
    projector_contour,
    projector_q,
    sector_basis,
    sector_ground_state,
    thermal_expectation,
)
from ..lattice import build_torus
from ..loops import ESTIMATORS
from ..opc import (
    C_MINUS,
    AlignedRunReport,
    BlockadeReport,
    aligned_run_rate,
    apply_move,
    blockade_check,
    flippable_plaquettes,
    height,
    highest_opc,
    raise_randomly,
    random_fixture,
    render_ascii,
)
from ..sixvertex import (
    delta_from_kappa,
    efp_sixvertex,
    enumerate_configs,
    row_structure_checks,
    sutherland_check,
    transfer_trace_power,
    weight,
)
from ..utils.reporting import ReportGenerator
from ..utils.resources import set_memory_budget


SUITES = ("holder", "chessboard", "rp", "den", "sutherland", "opc", "sixvertex-structure", "bounds")
SUTHERLAND_TOL = 1e-10
SUTHERLAND_CONTROL = 1e-3
TRACE_RTOL = 1e-9
HAND_VALUE_TOL = 1e-12


@dataclass
class EfpRow:
    """One row of an EFP table."""
    L: int
    efp: float
    stderr: Optional[float]
    route: str
    delta: Optional[float]
    beta: Optional[float]
    n: int
    d: int
    seed: Optional[int]
    wall_ms: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ScanResult:
    """EFP rows of a scan with the fit parameters for the footer."""
    rows: List[EfpRow]
    route: str
    fit: Optional[Dict[str, Any]] = None


@dataclass
class VerifySummary:
    """Results of one or more verification suites."""
    suite: str
    results: Dict[str, List[VerifyResult]] = field(default_factory=dict)
    duration: float = 0.0

    @property
    def total(self) -> int:
        return sum(len(checks) for checks in self.results.values())

    @property
    def failures(self) -> int:
        return sum(not check.passed for checks in self.results.values() for check in checks)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def counts(self) -> Dict[str, Dict[str, int]]:
        return {
            name: {"total": len(checks), "failures": sum(not check.passed for check in checks)}
            for name, checks in self.results.items()
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "total": self.total,
            "failures": self.failures,
            "passed": self.passed,
            "suites": self.counts(),
            "failed_checks": [
                check.to_dict() for checks in self.results.values() for check in checks if not check.passed
            ],
        }

    def raise_for_failures(self):
        if not self.passed:
            raise CheckFailure(self.failures, self.total)


@dataclass
class OpcDemo:
    """A fixture, one + move on it and its highest configuration."""
    width: int
    height: int
    seed: int
    fixture: str
    plaquettes: List[Tuple[Tuple[int, int], str]]
    heights: Dict[str, int]
    moved: Optional[str]
    move: Optional[Tuple[int, int]]
    highest: str
    blockade: BlockadeReport
    aligned: Optional[AlignedRunReport] = None

    def to_text(self) -> str:
        title = f"# fixture {self.width}x{self.height} seed={self.seed} height={self.heights['fixture']}"
        lines = [title, self.fixture]
        listed = ", ".join(f"({a},{b}) {kind}" for (a, b), kind in self.plaquettes) or "none"
        lines.append(f"# flippable plaquettes: {listed}")
        if self.moved is not None:
            lines.append(f"# + move at ({self.move[0]},{self.move[1]}): height={self.heights['moved']}")
            lines.append(self.moved)
        else:
            lines.append("# no + move available: the fixture is already highest")
        status = "ok" if self.blockade.ok else f"{len(self.blockade.violations)} violations"
        lines.append(
            f"# highest configuration: height={self.heights['highest']} "
            f"blockade={status} ({self.blockade.checked} vertices checked)"
        )
        lines.append(self.highest)
        if self.aligned is not None:
            a = self.aligned
            lines.append(
                f"# aligned runs: l={a.l} rho={a.rho} m2={a.m2} kappa={a.kappa!r} "
                f"hits={a.hits}/{a.samples} rate={a.rate!r}"
            )
        return "\n".join(line.rstrip("\n") for line in lines) + "\n"


def _record(name: str, lhs: float, rhs: float, slack: float = 0.0, **details: Any) -> VerifyResult:
    passed = bool(lhs <= rhs + slack)
    if not passed:
        logger.warning(f"{name} failed: {lhs:.6e} > {rhs:.6e} {details}")
    return VerifyResult(name, float(lhs), float(rhs), passed, details)


def _equal(name: str, value: float, expected: float, tol: float = HAND_VALUE_TOL) -> VerifyResult:
    return _record(name, abs(value - expected), tol, value=value, expected=expected)


class EmptinessEngine:
    """
    Main engine for the emptiness toolkit.

    Runs EFP computations on the exact, loop Monte Carlo and six-vertex
    routes, fits scaling laws to their output and drives the verification
    suites. Results are returned as dataclasses; the display methods render
    them on stderr.
    """

    def __init__(self, config: Config, progress: bool = False, timing: bool = False):
        """
        Initialize the emptiness engine.

        Args:
            config: Configuration object containing all settings
            progress: Show tqdm progress bars
            timing: Fill the wall_ms column; off by default so output is reproducible
        """
        self.config = config
        self.progress = progress and config.loops.progress
        self.timing = timing
        set_memory_budget(config.general.memory_budget_mb)
        self.report_generator = ReportGenerator(config)

        self.operation_history: List[Dict[str, Any]] = []
        self._suites: Dict[str, Callable[[int], List[VerifyResult]]] = {
            "holder": self._verify_holder,
            "chessboard": self._verify_chessboard,
            "rp": self._verify_rp,
            "den": self._verify_den,
            "sutherland": self._verify_sutherland,
            "opc": self._verify_opc,
            "sixvertex-structure": self._verify_sixvertex_structure,
            "bounds": self._verify_bounds,
        }

        logger.debug("EmptinessEngine initialized")

    # EFP routes

    def _exact_thermal(self, run: RunConfig) -> Callable[[int], Tuple[float, None]]:
        torus = build_torus(run.d, run.n)
        if run.beta > 0 and torus.num_sites > self.config.exact.dense_max_sites:
            raise BudgetExceededError(
                f"thermal EFP on {torus.num_sites} sites (limit exact.dense_max_sites="
                f"{self.config.exact.dense_max_sites})",
                (1 << torus.num_sites) ** 2 * 8,
                self.config.memory_budget_bytes,
            )
        h = build_hamiltonian(torus, run.delta)
        if run.beta > 0:
            log_den = log_partition_function(h, run.beta) - run.beta * torus.num_edges / 4.0
            if log_den < -self.config.bounds.slack:
                raise EmptinessError(f"partition function lower bound violated: log Den = {log_den:.3e}")

        def compute(l: int) -> Tuple[float, None]:
            return thermal_expectation(h, projector_q(torus, l), run.beta), None

        return compute

    def _exact_ground(self, run: RunConfig) -> Callable[[int], Tuple[float, None]]:
        torus = build_torus(run.d, run.n)
        if torus.num_sites > self.config.exact.sector_max_sites:
            raise ValidationError(
                f"{torus.num_sites} sites exceed exact.sector_max_sites={self.config.exact.sector_max_sites}"
            )
        basis = sector_basis(torus.num_sites, run.m2)
        h = build_hamiltonian(torus, run.delta, basis=basis)
        ground = sector_ground_state(
            h, run.m2,
            degeneracy_tol=self.config.exact.degeneracy_tol,
            lanczos_tol=self.config.exact.lanczos_tol,
        )

        def compute(l: int) -> Tuple[float, None]:
            return block_weight(basis, ground.vector, torus.block(l).mask), None

        return compute

    def _stochastic(self, run: RunConfig) -> Callable[[int], Tuple[float, float]]:
        torus = build_torus(run.d, run.n)
        estimator = ESTIMATORS[run.route]
        samples = run.samples or self.config.loops.n_samples
        chains = max(self.config.loops.chains, self.config.general.threads)

        def compute(l: int) -> Tuple[float, float]:
            estimate = estimator(
                torus, run.delta, run.beta, l, samples,
                seed=run.seed,
                n_batches=self.config.loops.n_batches,
                chains=chains,
                progress=self.progress,
            )
            return estimate.value, estimate.stderr

        return compute

    def _sixvertex(self, run: RunConfig) -> Callable[[int], Tuple[float, None]]:
        if run.n > self.config.transfer.max_sites:
            raise ValidationError(f"n={run.n} exceeds transfer.max_sites={self.config.transfer.max_sites}")
        m2 = 0 if run.m2 is None else run.m2

        def compute(l: int) -> Tuple[float, None]:
            value = efp_sixvertex(
                run.n, run.kappa, m2, l,
                tol=self.config.transfer.power_tol,
                max_iter=self.config.transfer.power_max_iter,
            )
            return value, None

        return compute

    def _route(self, run: RunConfig) -> Callable[[int], Tuple[float, Optional[float]]]:
        if run.route == "exact":
            if run.m2 is not None:
                return self._exact_ground(run)
            if run.beta is None or run.beta < 0:
                raise ValidationError("route=exact needs beta >= 0 or a sector m2")
            return self._exact_thermal(run)
        if run.route == "sixvertex":
            return self._sixvertex(run)
        return self._stochastic(run)

    def _row(self, run: RunConfig, l: int, value: float, stderr: Optional[float], started: float) -> EfpRow:
        ground = run.route == "sixvertex" or (run.route == "exact" and run.m2 is not None)
        delta = delta_from_kappa(run.kappa) if run.route == "sixvertex" else run.delta
        wall_ms = round((time.perf_counter() - started) * 1000.0, 3) if self.timing else None
        return EfpRow(
            L=l,
            efp=float(value),
            stderr=None if stderr is None else float(stderr),
            route=run.route,
            delta=float(delta),
            beta=None if ground else float(run.beta),
            n=run.n,
            d=run.d,
            seed=run.seed,
            wall_ms=wall_ms,
        )

    def efp_rows(self, run: Optional[RunConfig] = None) -> List[EfpRow]:
        """
        One EFP row per L of the run's L-range.

        Args:
            run: Run record (defaults to the configured one)

        Returns:
            List of EfpRow, ordered by L
        """
        run = run or self.config.run
        run.validate()
        start_time = time.time()
        logger.info(f"EFP run: route={run.route} d={run.d} n={run.n} L={run.l_min}..{run.l_max}")

        compute = self._route(run)
        rows = []
        for l in run.l_values:
            started = time.perf_counter()
            value, stderr = compute(l)
            rows.append(self._row(run, l, value, stderr, started))
            logger.debug(f"L={l}: efp={value!r}" + ("" if stderr is None else f" +- {stderr:.3e}"))

        self.operation_history.append({
            "operation": "efp",
            "timestamp": start_time,
            "duration": time.time() - start_time,
            "route": run.route,
            "rows": len(rows),
        })
        log_run("efp", time.time() - start_time, route=run.route, rows=len(rows))
        return rows

    @log_function_call
    def scan(self, run: Optional[RunConfig] = None, mode: str = "free") -> ScanResult:
        """
        EFP over the L-range with a fit of log EFP = log C - c L^nu.

        L = 0 rows are reported but left out of the fit.
        """
        run = run or self.config.run
        rows = self.efp_rows(run)
        fit = None
        if run.fit:
            points = [(row.L, row.efp) for row in rows if row.L >= 1]
            scaling = fit_scaling(
                points, d=run.d, mode=mode,
                resamples=self.config.bounds.bootstrap_resamples,
                seed=run.seed,
            )
            fit = scaling.to_dict()
        return ScanResult(rows=rows, route=run.route, fit=fit)

    @log_function_call
    def beta_scan(self, run: Optional[RunConfig] = None) -> ScanResult:
        """
        EFP at L = l_max for every beta in ``run.beta_values``, with a
        linear fit of -log EFP against beta.
        """
        run = run or self.config.run
        if not run.beta_values:
            raise ValidationError("beta scan needs at least one beta value")
        if run.route == "sixvertex" or (run.route == "exact" and run.m2 is not None):
            raise ValidationError("beta scans need a thermal route (exact without m2, mc or potential)")
        rows = []
        for beta in run.beta_values:
            point = RunConfig(**{**asdict(run), "beta": float(beta), "l_min": run.l_max, "beta_values": []})
            rows.extend(self.efp_rows(point))

        fit = None
        if run.fit:
            usable = [(row.beta, -math.log(row.efp)) for row in rows if row.efp > 0]
            if len({beta for beta, _ in usable}) < 2:
                raise ValidationError("beta fit needs at least two distinct beta values with EFP > 0")
            betas, values = np.array(usable).T
            slope, intercept = np.polyfit(betas, values, 1)
            residual = values - (slope * betas + intercept)
            fit = {
                "mode": "beta",
                "L": run.l_max,
                "slope": float(slope),
                "intercept": float(intercept),
                "max_residual": float(np.max(np.abs(residual))),
            }
            logger.info(f"-log EFP ~ {slope:.4f} beta + {intercept:.4f} at L={run.l_max}")
        return ScanResult(rows=rows, route=run.route, fit=fit)

    # Verification suites

    @log_function_call
    def verify(self, suite: str = "all", seed: Optional[int] = None) -> VerifySummary:
        """
        Run one verification suite, or all of them.

        Args:
            suite: A name from SUITES or ``all``
            seed: Seed for the randomized suites (defaults to run.seed)

        Returns:
            VerifySummary; call ``raise_for_failures`` to turn failures into CheckFailure
        """
        if suite != "all" and suite not in self._suites:
            raise ValidationError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
        seed = self.config.run.seed if seed is None else seed
        names = SUITES if suite == "all" else (suite,)
        start_time = time.time()
        summary = VerifySummary(suite=suite)
        for name in names:
            logger.info(f"Running verification suite: {name}")
            summary.results[name] = self._suites[name](seed)
        summary.duration = time.time() - start_time

        self.operation_history.append({
            "operation": "verify",
            "timestamp": start_time,
            "duration": summary.duration,
            "suite": suite,
            "total": summary.total,
            "failures": summary.failures,
        })
        if summary.passed:
            logger.info(f"Verification {suite}: {summary.total} checks passed")
        else:
            logger.warning(f"Verification {suite}: {summary.failures} of {summary.total} checks failed")
        return summary

    def _verify_holder(self, seed: int) -> List[VerifyResult]:
        slack = self.config.bounds.slack
        torus = build_torus(1, 4)
        h = build_hamiltonian(torus, -0.5)
        results = [holder_verify(h, identity_operator(torus.num_sites), 1, 1.0, slack)]
        for beta in (0.5, 1.0, 2.0):
            for n_half in (1, 2, 4):
                results.append(holder_verify(h, projector_contour(torus, 2), n_half, beta, slack))
                results.append(holder_verify(h, projector_q(torus, 2), n_half, beta, slack))

        chain6 = build_torus(1, 6)
        h6 = build_hamiltonian(chain6, -1.0)
        for n_half in (1, 2):
            results.append(holder_verify(h6, projector_q(chain6, 3), n_half, 1.0, slack))

        children = np.random.SeedSequence(seed).spawn(self.config.bounds.holder_trials)
        for k, child in enumerate(children):
            raw = np.random.default_rng(child).uniform(-1.0, 1.0, size=(h.dim, h.dim))
            a = (raw + raw.T) / 2.0 if k % 2 == 0 else raw
            results.append(holder_verify(h, a, 1 + k % 3, 1.0, slack))
        return results

    def _verify_chessboard(self, seed: int) -> List[VerifyResult]:
        slack = self.config.bounds.slack
        results = []
        for n, blocks in ((4, (1, 2)), (8, (2, 4))):
            torus = build_torus(1, n)
            for delta in (-2.0, -1.0, -0.5, 0.0):
                for beta in (0.0, 0.5, 1.0, 2.0):
                    for l in blocks:
                        results.append(chessboard_verify(torus, delta, beta, l, slack))
        return results

    def _verify_rp(self, seed: int) -> List[VerifyResult]:
        slack = self.config.bounds.slack
        trials = self.config.bounds.rp_trials
        grid = [(4, -0.7, 1.0), (4, -1.0, 0.5), (4, 0.0, 2.0), (6, -0.5, 1.0)]
        results = []
        seeds = np.random.SeedSequence(seed).generate_state(len(grid))
        for (n, delta, beta), child in zip(grid, seeds):
            torus = build_torus(1, n)
            report = rp_verify(torus, delta, beta, trials=trials, seed=int(child), slack=slack, progress=self.progress)
            results.extend(
                _record("rp", 0.0, value, slack, n=n, delta=delta, beta=beta, trial=k)
                for k, value in enumerate(report.values)
            )
        return results

    def _verify_den(self, seed: int) -> List[VerifyResult]:
        slack = self.config.bounds.slack
        results = []
        for n in (4, 6):
            torus = build_torus(1, n)
            for delta in (-2.0, -1.0, 0.0, 0.5, 0.9):
                for beta in (0.5, 1.0, 2.0):
                    results.append(den_verify(torus, delta, beta, slack))
        return results

    def _verify_sutherland(self, seed: int) -> List[VerifyResult]:
        results = []
        for n in (4, 6):
            for kappa in (-0.5, 0.0, 0.4):
                norm = sutherland_check(n, kappa)
                results.append(_record("sutherland", norm, SUTHERLAND_TOL, n=n, kappa=kappa))
        mismatched = delta_from_kappa(0.0) + 0.5
        norm = sutherland_check(4, 0.0, delta=mismatched)
        results.append(_record("sutherland-control", SUTHERLAND_CONTROL, norm, n=4, kappa=0.0, delta=mismatched))
        return results

    def _verify_opc(self, seed: int) -> List[VerifyResult]:
        opc = self.config.opc
        results = []
        children = np.random.SeedSequence(seed).spawn(opc.fixtures)
        for k, child in enumerate(tqdm(children, desc="opc fixtures", disable=not self.progress, leave=False)):
            rng = np.random.default_rng(child)
            width, height_ = int(rng.integers(2, opc.width + 1)), int(rng.integers(2, opc.height + 1))
            x = random_fixture(width, height_, rng)
            x_max = highest_opc(x)
            shuffled, heights = raise_randomly(x, rng)
            steps = np.diff(heights)
            results.append(_record("opc-confluence", float(shuffled != x_max), 0.0, fixture=k))
            results.append(_record(
                "opc-height", float(np.count_nonzero(steps != 1)), 0.0,
                fixture=k, start=heights[0], end=heights[-1], highest=height(x_max).value,
            ))
            blockade = blockade_check(x_max)
            results.append(_record(
                "opc-blockade", float(len(blockade.violations)), 0.0,
                fixture=k, checked=blockade.checked, violations=blockade.violations,
            ))
        return results

    def _verify_sixvertex_structure(self, seed: int) -> List[VerifyResult]:
        results = []
        for t in (2, 3, 4):
            configs = enumerate_configs(4, t)
            for kappa in (-0.3, 0.0, 0.3):
                trace = transfer_trace_power(4, kappa, t)
                brute = math.fsum(weight(config, kappa) for config in configs)
                results.append(_record(
                    "transfer-trace", abs(trace - brute) / abs(brute), TRACE_RTOL,
                    n=4, t=t, kappa=kappa, trace=trace, brute=brute,
                ))
        for n, t in ((4, 2), (4, 3), (4, 4), (6, 2)):
            configs = enumerate_configs(n, t)
            failed = [k for k, config in enumerate(configs) if not row_structure_checks(config).ok]
            results.append(_record("row-structure", float(len(failed)), 0.0, n=n, t=t, configs=len(configs)))
        return results

    def _verify_bounds(self, seed: int) -> List[VerifyResult]:
        ln2 = math.log(2.0)
        results = [
            _equal("chessboard_exponent", chessboard_exponent(8, 4, 1), 4),
            _equal("chessboard_exponent", chessboard_exponent(16, 4, 2), 64),
            _equal("chessboard_exponent", chessboard_exponent(8, 2, 1), 8),
            _equal("entropy_bound", entropy_bound(0.5, 1), 2.0 * ln2),
            _equal("entropy_bound", entropy_bound(0.5, 10 ** 9), ln2, tol=1e-8),
            _equal("pf_lower_bound", pf_lower_bound(8, 2, 0.0), 2.0 / 8.0 * ln2),
            _equal("num_bound", num_bound(1.0 - 1e-12, 1, 32, 24, 24 / 1536).value, ln2, tol=1e-9),
            _equal("boundary_volume_bound", boundary_volume_bound(1, 8, 2, 1), 24),
            _equal("boundary_volume_exact", boundary_volume_exact(build_torus(1, 8), 2, 1), 8),
            _equal("window_count", window_count(4, 1), 36),
        ]
        log_z = math.log(math.fsum(weight(config, 0.0) for config in enumerate_configs(4, 2))) / 8.0
        for r_tile in (1, 2):
            results.append(_record("pf_lower_bound", pf_lower_bound(4, r_tile, 0.0), log_z, r_tile=r_tile))
        return results

    # OPC demo

    @log_function_call
    def opc_demo(
        self,
        width: Optional[int] = None,
        height_: Optional[int] = None,
        seed: Optional[int] = None,
        aligned_samples: int = 0,
        l: int = 2,
        kappa: float = 0.0
    ) -> OpcDemo:
        """
        Random fixture, its flippable plaquettes, one + move and the highest
        configuration with its blockade report.

        With ``aligned_samples`` > 0 the aligned-run hit rate on Gamma_{2L,R},
        R = opc.sample_rows * L, is added.
        """
        width = width or self.config.opc.width
        height_ = height_ or self.config.opc.height
        seed = self.config.run.seed if seed is None else seed
        rng = np.random.default_rng(seed)

        x = random_fixture(width, height_, rng)
        plaquettes = flippable_plaquettes(x)
        heights = {"fixture": height(x).value}
        minus = [p for p, kind in plaquettes if kind == C_MINUS]
        move, moved = None, None
        if minus:
            move = minus[0]
            after = apply_move(x, move, "+")
            moved = render_ascii(after)
            heights["moved"] = height(after).value
        x_max = highest_opc(x)
        heights["highest"] = height(x_max).value

        aligned = None
        if aligned_samples > 0:
            aligned = aligned_run_rate(
                l, self.config.opc.sample_rows, kappa, aligned_samples, seed=seed, progress=self.progress
            )
        return OpcDemo(
            width=width,
            height=height_,
            seed=seed,
            fixture=render_ascii(x),
            plaquettes=[(tuple(int(c) for c in p), kind) for p, kind in plaquettes],
            heights=heights,
            moved=moved,
            move=move,
            highest=render_ascii(x_max),
            blockade=blockade_check(x_max),
            aligned=aligned,
        )

    # Display

    def display_efp_results(self, rows: List[EfpRow], fit: Optional[Dict[str, Any]] = None):
        """Display EFP rows and an optional fit in formatted tables."""
        from ..utils.cli_utils import print_metrics, print_results_table

        print_results_table(
            "📉 Emptiness Formation Probability",
            ["L", "EFP", "stderr", "delta", "beta"],
            [(row.L, f"{row.efp:.10g}", None if row.stderr is None else f"{row.stderr:.3g}", row.delta, row.beta)
             for row in rows],
        )
        if fit:
            print_metrics("📈 Fit", {key: value for key, value in fit.items()})

    def display_verify_results(self, summary: VerifySummary):
        """Display suite counts; failed checks are listed in a panel."""
        from ..utils.cli_utils import print_panel, print_results_table

        print_results_table(
            "🧪 Verification Results",
            ["Suite", "Checks", "Failures", "Status"],
            [(name, c["total"], c["failures"], "✅" if c["failures"] == 0 else "❌")
             for name, c in summary.counts().items()],
        )
        failed = [check for checks in summary.results.values() for check in checks if not check.passed]
        if failed:
            body = "\n".join(
                f"• {check.name}: {check.lhs:.6e} > {check.rhs:.6e} {check.details}" for check in failed[:20]
            )
            if len(failed) > 20:
                body += f"\n... and {len(failed) - 20} more"
            print_panel(body, "❌ Failed Checks", style="red")

    def display_opc_demo(self, demo: OpcDemo):
        from ..utils.cli_utils import print_metrics

        metrics: Dict[str, Any] = {
            "Rectangle": f"{demo.width}x{demo.height}",
            "Flippable plaquettes": len(demo.plaquettes),
            "Height (fixture)": demo.heights["fixture"],
            "Height (highest)": demo.heights["highest"],
            "Blockade": "✅" if demo.blockade.ok else f"❌ {len(demo.blockade.violations)} violations",
        }
        if demo.aligned is not None:
            metrics["Aligned-run rate"] = f"{demo.aligned.hits}/{demo.aligned.samples}"
        print_metrics("🧭 Osculating Paths", metrics)
