"""Scenario simulation and Monte Carlo truth"""
from .scenarios import (AlphaTruth, Residual, ScenarioSpec, SimulatedData, Transform,
                        default_beta, simulate_dataset, simulate_design, true_conditional)

__all__ = [
    "AlphaTruth", "Residual", "ScenarioSpec", "SimulatedData", "Transform",
    "default_beta", "simulate_dataset", "simulate_design", "true_conditional",
]
