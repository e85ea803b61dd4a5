"""Objective Bayes factors for order-constrained models in contingency tables.

Compares a null model (equal success probabilities, or row/column
independence), an inequality-constrained model and the unrestricted
encompassing model, using intrinsic priors and the encompassing-prior
identity BF_c0 = BF_ce * BF_e0.
"""

from .binomial import (
    bf_ce,
    bf_default_e0,
    bf_intrinsic_e0,
    bf_intrinsic_e0_exact,
    log_marginal_encompassing,
    log_marginal_null,
    posterior_constraint_prob,
    prior_constraint_prob,
)
from .compare import ComparisonReport, ModelSet, compose_bf_c0, posterior_model_probs, sweep_q
from .constraints import ConstraintExpr, always, descending_chain, evaluate, mirror, parse_constraint
from .errors import BudgetExceeded, ConstraintSyntaxError, DomainError, EstimationError, InputError
from .io import emit_report, load_report, load_table
from .kernel import RngStream, log_beta, log_mvbeta
from .multinomial import (
    bf_default_e0_mult,
    bf_intrinsic_e0_mult,
    bf_intrinsic_e0_mult_exact,
    log_marginal_encompassing_mult,
    log_marginal_null_mult,
    posterior_constraint_prob_mult,
    prior_constraint_prob_mult,
)
from .simulate import SCENARIOS, SimScenario, effect_size_h, get_scenario, run_simulation
from .tables import (
    BinomialHyper,
    BinomialTable,
    Estimate,
    McConfig,
    MultinomialHyper,
    MultinomialTable,
    TrainingSpec,
)

__version__ = "0.1.0"
