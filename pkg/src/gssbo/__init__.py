"""Gradient-subset Bayesian optimization: a GP-UCB engine that, once
iterations become expensive, fits its surrogate on a gradient-diversity
selected subset of the observations, with random-subset and full-data
baselines and the low-rank approximation theory backing the method."""

from .acquisition import (AcquisitionSearchConfig, BetaSchedule, beta,
                          optimize_acquisition, ucb_score)
from .buffer import BufferPolicyState, establish_baseline, observe_iteration
from .gp import (Dataset, GPModel, HyperparamSearchConfig, NotPositiveDefinite,
                 fit, fit_hyperparameters, log_marginal_likelihood, posterior,
                 posterior_batch)
from .kernels import (MATERN52, SQUARED_EXPONENTIAL, KernelHyperparams,
                      build_gram, cross_gram, kernel_eval)
from .loop import (FULL, GSSBO, RSSBO, ExperimentRecord, IterationRow,
                   ModelSnapshot, RunConfig, information_gain,
                   instantaneous_regret, run, two_phase_split)
from .nystrom import (NystromReport, build_report, build_sor_approx,
                      c_m_factor, eps_g, greedy_nystrom_select,
                      min_subset_size, selection_equivalence_check,
                      spectral_norm, theorem1_bounds, theorem2_penalties)
from .objectives import Objective, make_objective
from .select import (EmbeddingTracker, GradientEmbedding, SubsetSelection,
                     compute_embeddings, compute_scalar_gradients,
                     cosine_sum, diversity_score, select_subset)

__version__ = "0.1.0"
