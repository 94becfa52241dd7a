"""betascale: beta random scaling of distributions, its inversion via
fractional integrals, tail asymptotics in the three extreme value classes,
elliptical conditional limits, and the matching estimator pipeline."""

from .distributions import (Beta, Distribution, Exponential, Gamma, Kotz,
                            MdaClass, Pareto, PointMass, Rayleigh,
                            ScalingFunction, TabulatedCdf, Uniform,
                            WeibullTailModel, beta_moment, dist_from_json,
                            dist_to_json, ln_gamma, load_tabulated_csv,
                            make_rng, mda_classify, reg_inc_beta,
                            scaling_function_w)
from .elliptical import (EllipticalModel, conditional_density_point,
                         conditional_sf_exceed, convergence_diagnostic,
                         gaussian_approx_sf, sample_elliptical)
from .errors import DomainError, NoDensityError, NumericError, StageError
from .estimation import (EstimatorConfig, PipelineResult, SampleBatch,
                         TailFitResult, gg_theta, h_hat, kendall_rho,
                         pipeline, pseudo_radii, psi_hat, quantile_hat,
                         r_hat, w_hat)
from .fractional import (QuadratureConfig, power_weight, weyl_integral,
                         weyl_stieltjes)
from .scaling import (IterationPlan, ScalingParams, chain_forward,
                      corollary_check, forward_cdf, forward_pdf, forward_sf,
                      forward_tabulated, invert_iterative, invert_onestep,
                      invert_step)
from .tails import (TailPrediction, biased_tail_asymptote, density_ratio,
                    fractional_asymptote, general_multiplier_tail,
                    max_stability_check, power_transform_w, predict_frechet,
                    predict_gumbel, predict_weibull, rapid_variation_profile)

__version__ = "0.1.0"
