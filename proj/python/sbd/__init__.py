"""Bayesian semi-blind deconvolution on extended cyclic lattices."""

from ._core import (
    CorrelationSpec,
    HmcConfig,
    HyperParams,
    LatticeSpec,
    Model,
    ModelState,
    SbdError,
    autocorrelation,
    central_rows,
    ess,
    gibbs_sweeps,
    grad_potential,
    initial_state,
    log_posterior,
    msjd,
    potential,
    prior_state,
    rmse,
    run_chain,
    sign_changes,
    simulate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
