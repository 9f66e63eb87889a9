"""Small-size invariant checks run by ``discord-witness selftest``."""
from dataclasses import dataclass
from typing import Callable, List
import logging

import numpy as np

from discord_witness.postprocessing.discord import cq_reconstruct
from discord_witness.preprocessing.loo import gell_mann_basis
from discord_witness.preprocessing.states import (BipartiteState, assemble_cq, bell_state, random_cq_spec,
                                                  random_state)
from discord_witness.utils.colors import status_line
from discord_witness.witness.circuit import simulate_exact
from discord_witness.witness.witness import (eval_commutator, eval_commutator_norms, eval_permutation,
                                             x_direct, x_from_swaps)

SMALL_DIMS = [(2, 2), (2, 3), (3, 2)]
STATES_PER_DIM = 3


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual)) and self.residual <= self.tolerance

    def line(self) -> str:
        return status_line(self.name, self.passed, f"residual={self.residual:.3e} tol={self.tolerance:.1e}")


def _random_states(seed: int) -> List[BipartiteState]:
    rng = np.random.default_rng(seed)
    return [random_state(dA, dB, seed=rng) for dA, dB in SMALL_DIMS for _ in range(STATES_PER_DIM)]


def run_selftest(commutator_fn: Callable[[BipartiteState], float] = eval_commutator, seed: int = 0,
                 reconstruct_tol: float = 1e-8, max_retries: int = 8) -> List[CheckResult]:
    """Run every check; ``commutator_fn`` is the evaluator under test."""
    states = _random_states(seed)
    checks = []

    checks.append(CheckResult(
        "loo-completeness",
        max(gell_mann_basis(d).completeness_defect() for d in range(2, 6)),
        1e-10))

    checks.append(CheckResult(
        "x-from-swaps",
        max(float(np.max(np.abs(x_from_swaps(d) - x_direct(d)))) for d in (2, 3)),
        0.0))

    checks.append(CheckResult(
        "commutator-identity",
        max(abs(commutator_fn(s) - eval_commutator_norms(s)) for s in states),
        1e-10))

    checks.append(CheckResult(
        "permutation-agreement",
        max(abs(commutator_fn(s) - eval_permutation(s, path="contraction")) for s in states),
        1e-9))

    checks.append(CheckResult(
        "circuit-agreement",
        max(abs(commutator_fn(s) - simulate_exact(s).witness) for s in states[:STATES_PER_DIM]),
        1e-9))

    checks.append(CheckResult("bell-value", abs(commutator_fn(bell_state()) + 0.375), 1e-9))

    rng = np.random.default_rng(seed + 1)
    cq_states = [assemble_cq(random_cq_spec(dA, dB, seed=rng)) for dA, dB in SMALL_DIMS]
    checks.append(CheckResult("cq-zero", max(abs(commutator_fn(s)) for s in cq_states), 1e-10))

    residuals = []
    for s in cq_states:
        spec = cq_reconstruct(s, tol=reconstruct_tol, seed=rng, max_retries=max_retries)
        residuals.append(np.inf if spec is None else float(np.linalg.norm(assemble_cq(spec).rho - s.rho)))
    checks.append(CheckResult("cq-roundtrip", max(residuals), 1e-7))

    for check in checks:
        if check.passed:
            logging.debug(f"Self-test {check.name} passed ({check.residual:.3e})")
        else:
            logging.error(f"Self-test {check.name} failed: residual {check.residual:.3e} > {check.tolerance:.1e}")
    return checks
