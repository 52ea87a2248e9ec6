"""Replica-group simulator bindings."""

from ._vnet import (
    check_loss_grid,
    closed_form,
    experiments,
    format_scenario,
    merkle_compare,
    resolve_master,
    run_experiment,
    simulate,
)

__all__ = [
    "check_loss_grid",
    "closed_form",
    "experiments",
    "format_scenario",
    "merkle_compare",
    "resolve_master",
    "run_experiment",
    "simulate",
]
