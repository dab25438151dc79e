"""roughheat: numerical laboratory for the fractional heat kernel, rough
spatial noise, and mild solutions of the driven fractional heat equation.

Subpackages by responsibility:

- kernel: evaluate the alpha-stable heat kernel, its derivatives and
  spatial differences, with closed-form and series oracles.
- quadrature: singular-weight and tail-aware integration, plus the exact
  frequency-side constants for the squared-difference integrals.
- estimates: every kernel inequality and scaling law as a machine check.
- noise: spectral synthesis of noise that is white in time and rough
  (Hurst < 1/2) in space, with covariance/isometry verification.
- solver: exponential-Euler mild solutions, mollified-noise Picard
  iteration, and smoothing-parameter sweeps.
- analysis: weighted norms, increment seminorms, Holder-exponent fits,
  moment-inequality checks.
- cli: batch front end over run-config documents.
"""
from .exceptions import (
    AccuracyError,
    BlowUpError,
    CheckFailure,
    ConfigError,
    ConvergenceError,
    DomainError,
    InputError,
    RoughHeatError,
)
from .kernel import (
    KernelSlice,
    KernelSpec,
    KernelValue,
    KernelValues,
    closed_form_oracle,
    eval_kernel,
    eval_kernel_grid,
    first_difference,
    kernel_derivative,
    second_difference,
)
from .quadrature import (
    Integrand,
    QuadResult,
    integrate_adaptive,
    parseval_constant_Box,
    parseval_constant_D,
    parseval_lhs_Box,
    parseval_lhs_D,
    tail_integral_check,
    weighted_box_integral,
    weighted_difference_integral,
    weighted_singular_integral,
)
from .fitting import PowerLawFit, fit_power_law
from .estimates import (
    LEMMA_SLUGS,
    EstimateReport,
    LemmaCheck,
    LemmaId,
    VerificationRun,
    WeightFn,
    lemma_slug,
    make_check,
    make_weight,
    run_lemma,
    run_to_csv,
    run_to_json,
    run_verification,
)

__version__ = "0.1.0"
