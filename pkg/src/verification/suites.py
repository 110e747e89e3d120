"""
Property Suites

Randomized checks of the guarantees the autoencoder relies on. Each
suite draws its own random instances from a seeded generator, so a
(seed, trials) pair always produces the same report.

Suites:
    cptp         Encoder, decoder and their composition are CPTP
                 (N_X=2, N_Z=1, N_A and N_B in {0, 1}).
    elbo         ELBO-style bound -S(ρ_glob|σ_gen) ≥ -S(ρ_glob|σ_glob)
                 - S(ζ_glob|ζ_gen). Enforced where it is guaranteed
                 (N_Z = N_X, no auxiliary qubits) and in the equality case
                 ζ_glob = ζ_gen. Compressive models are evaluated for
                 information only; the bound can fail there.
    equivalence  Global objective equals instance objective / N for the
                 Wasserstein reconstruction loss at β = 0, with a fidelity
                 loss negative control that must break the equality.
    divergence   Non-negativity, identity of indiscernibles, exact JSD
                 symmetry, KLD against classical KL on commuting pairs and
                 Tr[(ρ⊗ρ)C] = (1 - Tr ρ²)/2 for the swap cost.

Output Format:
{
    "passed": false,
    "suites": [
        {"name": "cptp", "status": "FAIL", "trials": 1000, "failures": 1000,
         "details": {"max_trace_error": 1e-06, ...}},
        ...
    ]
}
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.special import rel_entr

from losses.divergences import default_cost, fidelity, jsd, kld
from ml.model import ModelSpec, QVAEModel
from ml.objective import (
    ObjectiveSpec,
    check_elbo_bound,
    check_global_instance_equiv,
    eval_global,
    eval_instance,
)
from quantum.channel import verify_cptp, random_encoder_decoder
from quantum.linalg import dagger, draw_seed, kron, make_rng, random_density, random_pure, random_unitary
from quantum.states import global_state, purity

logger = logging.getLogger(__name__)

TRACE_TOL = 1e-9
EIGENVALUE_TOL = 1e-9
LINEARITY_TOL = 1e-10
ELBO_SLACK = 1e-6
ELBO_EQUALITY_TOL = 1e-9
EQUIVALENCE_TOL = 1e-9
NEGATIVE_CONTROL_GAP = 1e-3
NONNEGATIVE_TOL = 1e-9
IDENTITY_TOL = 1e-8
CLASSICAL_KL_TOL = 1e-9
SWAP_TRICK_TOL = 1e-10

FAULT_SCALE = 1.0 + 1e-6


class SuiteStatus(Enum):
    """Outcome of one suite."""
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass
class SuiteResult:
    """
    Result of one property suite.

    Attributes:
        name: Suite name
        trials: Random instances drawn
        failures: Instances violating an enforced property
        details: Worst residuals and informational counts
    """
    name: str
    trials: int
    failures: int
    details: Dict = field(default_factory=dict)

    @property
    def status(self) -> SuiteStatus:
        return SuiteStatus.PASS if self.failures == 0 else SuiteStatus.FAIL

    @property
    def passed(self) -> bool:
        return self.status is SuiteStatus.PASS

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "status": self.status.value,
            "trials": self.trials,
            "failures": self.failures,
            "details": self.details,
        }


@dataclass
class CheckReport:
    """All suite results of one check run."""
    seed: int
    suites: List[SuiteResult]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_dict(self) -> Dict:
        return {
            "seed": self.seed,
            "passed": self.passed,
            "suites": [s.to_dict() for s in self.suites],
        }


def _faulty(channel: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    """Channel whose outputs lose trace preservation."""
    return lambda mats: FAULT_SCALE * np.asarray(channel(mats))


class PropertyChecker:
    """
    Runs the property suites.

    Usage:
        checker = PropertyChecker(seed=1, trials=5000)
        report = checker.run()

        if not report.passed:
            for suite in report.suites:
                print(suite.name, suite.status.value)
    """

    DEFAULT_TRIALS = {
        "cptp": 1000,
        "elbo": 1000,
        "equivalence": 200,
        "divergence": 500,
    }
    SUITES = tuple(DEFAULT_TRIALS)

    def __init__(
        self,
        seed: int = 0,
        trials: Union[None, int, Dict[str, int]] = None,
        inject_fault: bool = False,
    ):
        self.seed = int(seed)
        self.inject_fault = inject_fault
        self.trials = dict(self.DEFAULT_TRIALS)
        if isinstance(trials, int):
            if trials < 1:
                raise ValueError(f"trials must be >= 1, got {trials}")
            self.trials = {name: trials for name in self.SUITES}
        elif trials:
            unknown = set(trials) - set(self.SUITES)
            if unknown:
                raise ValueError(f"Unknown suite(s): {sorted(unknown)}")
            self.trials.update(trials)

    def _rng(self, suite: str) -> np.random.Generator:
        return make_rng([self.seed, self.SUITES.index(suite)])

    def run(self, suites: Optional[Sequence[str]] = None) -> CheckReport:
        """
        Run the selected suites (all by default) in a fixed order.

        Raises:
            ValueError: On an unknown suite name
        """
        selected = list(self.SUITES) if not suites else list(suites)
        unknown = [s for s in selected if s not in self.SUITES]
        if unknown:
            raise ValueError(f"Unknown suite(s): {unknown} (expected some of {list(self.SUITES)})")
        results = []
        for name in self.SUITES:
            if name not in selected:
                continue
            result = getattr(self, f"{name}_suite")()
            log = logger.info if result.passed else logger.error
            log("Suite %-11s %s (%d trials, %d failures)", name, result.status.value, result.trials, result.failures)
            results.append(result)
        return CheckReport(seed=self.seed, suites=results)

    def cptp_suite(self) -> SuiteResult:
        rng = self._rng("cptp")
        trials = self.trials["cptp"]
        combos = [(a, b) for a in (0, 1) for b in (0, 1)]
        worst = {"max_trace_error": 0.0, "min_eigenvalue": np.inf, "max_linearity_error": 0.0}
        failures = 0
        for k in range(trials):
            n_aux_enc, n_aux_dec = combos[k % len(combos)]
            n_layers = int(rng.integers(1, 4))
            enc, dec = random_encoder_decoder(draw_seed(rng), 2, 1, n_aux_enc, n_aux_dec, n_layers)
            maps = [(enc.apply, 2), (dec.apply, 1), (enc.then(dec), 2)]
            ok = True
            for channel, n_in in maps:
                if self.inject_fault:
                    channel = _faulty(channel)
                report = verify_cptp(channel, n_in, 1, rng)
                worst["max_trace_error"] = max(worst["max_trace_error"], report.max_trace_error)
                worst["min_eigenvalue"] = min(worst["min_eigenvalue"], report.min_eigenvalue)
                worst["max_linearity_error"] = max(worst["max_linearity_error"], report.max_linearity_error)
                ok &= (
                    report.max_trace_error <= TRACE_TOL
                    and report.min_eigenvalue >= -EIGENVALUE_TOL
                    and report.max_linearity_error <= LINEARITY_TOL
                )
            failures += not ok
        worst["min_eigenvalue"] = float(worst["min_eigenvalue"]) if trials else 0.0
        return SuiteResult("cptp", trials, failures, worst)

    def elbo_suite(self) -> SuiteResult:
        rng = self._rng("elbo")
        trials = self.trials["elbo"]
        failures = 0
        min_gap = np.inf
        max_equality_error = 0.0
        compressive_violations = 0
        for k in range(trials):
            # guaranteed regime: unitary encoder and decoder
            n = 1 + k % 2
            model = _random_model(rng, ModelSpec(n_x=n, n_z=n, n_layers=int(rng.integers(1, 4))))
            points = _random_points(rng, n, int(rng.integers(1, 9)))
            report = check_elbo_bound(model, points, slack=ELBO_SLACK)
            min_gap = min(min_gap, report.gap)
            ok = report.passed

            # equality case: the maximally mixed input encodes to the prior
            compressive = _random_model(
                rng,
                ModelSpec(n_x=2, n_z=1, n_aux_decoder=int(rng.integers(0, 2)), n_layers=int(rng.integers(1, 4))),
            )
            basis = np.stack([np.diag(np.eye(4)[i]).astype(complex) for i in range(4)])
            equality = check_elbo_bound(compressive, basis)
            max_equality_error = max(max_equality_error, abs(equality.gap))
            ok &= abs(equality.gap) <= ELBO_EQUALITY_TOL

            informational = check_elbo_bound(compressive, _random_points(rng, 2, int(rng.integers(1, 9))))
            compressive_violations += not informational.passed
            failures += not ok
        details = {
            "min_gap": float(min_gap) if trials else 0.0,
            "max_equality_error": max_equality_error,
            "compressive_violations": compressive_violations,
        }
        if compressive_violations:
            logger.info(
                "ELBO bound fails for %d of %d compressive models (not enforced)", compressive_violations, trials
            )
        return SuiteResult("elbo", trials, failures, details)

    def equivalence_suite(self) -> SuiteResult:
        rng = self._rng("equivalence")
        trials = self.trials["equivalence"]
        wasserstein = ObjectiveSpec(recon="wasserstein", reg="jsd", beta=0.0)
        control = ObjectiveSpec(recon="fidelity", reg="jsd", beta=0.0)
        failures = 0
        max_residual = 0.0
        max_control_gap = 0.0
        for _ in range(trials):
            spec = ModelSpec(
                n_x=2,
                n_z=1,
                n_aux_encoder=int(rng.integers(0, 2)),
                n_aux_decoder=int(rng.integers(0, 2)),
                n_layers=int(rng.integers(1, 3)),
            )
            model = _random_model(rng, spec)
            n_points = int(rng.integers(1, 9))
            states = np.stack([random_pure(rng, 2) for _ in range(n_points)])
            report = check_global_instance_equiv(wasserstein, model, states, tolerance=EQUIVALENCE_TOL)
            max_residual = max(max_residual, report.residual)
            failures += not report.passed
            if n_points > 1:
                glob = eval_global(control, model, global_state(states)).total
                inst = eval_instance(control, model, states).total
                max_control_gap = max(max_control_gap, abs(glob - inst / n_points))
        if self.inject_fault or max_control_gap <= NEGATIVE_CONTROL_GAP:
            failures += 1
            logger.error("Negative control did not separate global and instance objectives")
        details = {"max_residual": max_residual, "max_control_gap": max_control_gap}
        return SuiteResult("equivalence", trials, failures, details)

    def divergence_suite(self) -> SuiteResult:
        rng = self._rng("divergence")
        trials = self.trials["divergence"]
        worst = {
            "min_value": np.inf,
            "max_self_divergence": 0.0,
            "jsd_asymmetries": 0,
            "max_classical_kl_error": 0.0,
            "max_swap_trick_error": 0.0,
        }
        failures = 0
        for _ in range(trials):
            n = int(rng.integers(1, 3))
            rho = random_density(rng, n, rank=int(rng.integers(1, 2**n + 1)))
            sigma = random_density(rng, n)
            values = [kld(rho, sigma), jsd(rho, sigma), 1.0 - fidelity(rho, sigma)]
            self_values = [kld(sigma, sigma), jsd(rho, rho), 1.0 - fidelity(rho, rho)]
            asymmetric = jsd(rho, sigma) != jsd(sigma, rho)

            u = random_unitary(rng, 2**n)
            p, q = rng.dirichlet(np.ones(2**n)), rng.dirichlet(np.ones(2**n))
            rho_c = u @ np.diag(p) @ dagger(u)
            sigma_c = u @ np.diag(q) @ dagger(u)
            classical_error = abs(kld(rho_c, sigma_c) - float(np.sum(rel_entr(p, q))))

            cost = default_cost(n).mat
            swap_value = np.trace(kron(rho, rho) @ cost).real
            swap_error = abs(swap_value - (1.0 - float(purity(rho))) / 2.0)

            worst["min_value"] = min(worst["min_value"], min(values))
            worst["max_self_divergence"] = max(worst["max_self_divergence"], max(self_values))
            worst["jsd_asymmetries"] += int(asymmetric)
            worst["max_classical_kl_error"] = max(worst["max_classical_kl_error"], classical_error)
            worst["max_swap_trick_error"] = max(worst["max_swap_trick_error"], swap_error)
            failures += not (
                min(values) >= -NONNEGATIVE_TOL
                and max(self_values) <= IDENTITY_TOL
                and not asymmetric
                and classical_error <= CLASSICAL_KL_TOL
                and swap_error <= SWAP_TRICK_TOL
            )
        worst["min_value"] = float(worst["min_value"]) if trials else 0.0
        return SuiteResult("divergence", trials, failures, worst)


def _random_model(rng: np.random.Generator, spec: ModelSpec) -> QVAEModel:
    return QVAEModel.from_flat(spec, rng.uniform(-np.pi, np.pi, spec.n_params))


def _random_points(rng: np.random.Generator, n_qubits: int, count: int) -> np.ndarray:
    return np.stack([random_density(rng, n_qubits) for _ in range(count)])


def run_checks(
    seed: int = 0,
    trials: Union[None, int, Dict[str, int]] = None,
    suites: Optional[Sequence[str]] = None,
    inject_fault: bool = False,
) -> CheckReport:
    """Convenience wrapper around PropertyChecker."""
    return PropertyChecker(seed=seed, trials=trials, inject_fault=inject_fault).run(suites)
