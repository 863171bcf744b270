"""Federated ground-station downlink scheduling and simulation."""

__version__ = "0.1.0"

from skygs.model import Scenario, ScenarioError, validate_scenario

__all__ = ["Scenario", "ScenarioError", "validate_scenario", "__version__"]
