"""Python access to the flucast transmission model and sampler."""

from ._flucast import (
    DataError,
    SamplerError,
    __version__,
    delay_kernel,
    fit,
    log_prior,
    negbin_logpmf,
    param_names,
    reproduction_numbers,
    simulate,
    weekly_incidence,
)

__all__ = [
    "DataError",
    "SamplerError",
    "__version__",
    "delay_kernel",
    "fit",
    "log_prior",
    "negbin_logpmf",
    "param_names",
    "reproduction_numbers",
    "simulate",
    "weekly_incidence",
]
