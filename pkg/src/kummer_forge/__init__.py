"""Kummer and gamma laws, the HV and KV independence-preserving maps,
characterization recovery maps, and statistical verification suites."""

from .characterize import (LawPair, RatioConstants, RegressionConstants, TiltSpec,
                           characterize_from_samples, recover_hv_ratio,
                           recover_hv_regression, recover_kv_ratio,
                           recover_kv_regression, tilt_params)
from .distributions import (BetaParams, GammaParams, KummerParams, cdf, log_pdf,
                            moment, pdf, sample, survival_power_moment)
from .errors import (BinningError, ConstraintError, DomainError, KummerForgeError,
                     MomentDomainError, QuadratureError, SampleSizeError,
                     SamplerDegenerateError, SeriesTruncationError, ShapeError)
from .report import Check, SuiteReport
from .rng import DEFAULT_SEED, generator
from .specfun import QuadratureConfig, log_tricomi_u, tricomi_u
from .stats import TestResult, independence_test, ks_test, regression_constancy_test
from .transforms import PositivePair, hv_forward, hv_inverse, kv_forward, kv_inverse
from .trees import TreeSpec, corollary_marginals, phi_forward, phi_inverse

__version__ = "0.1.0"
