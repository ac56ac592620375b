"""Declarative end-to-end scenarios: coffee-pod selection and pasta QC."""

from .client import GatewayClient
from .coffee import CoffeeRun, ScenarioAssertionError, run_coffee_scenario
from .config import ScenarioConfig, ScenarioError, build_service, data_path, load_scenario
from .pasta import BeltItem, QcItemRecord, QcReport, run_pasta_qc_cycle

__all__ = [
    "BeltItem",
    "CoffeeRun",
    "GatewayClient",
    "QcItemRecord",
    "QcReport",
    "ScenarioAssertionError",
    "ScenarioConfig",
    "ScenarioError",
    "build_service",
    "data_path",
    "load_scenario",
    "run_coffee_scenario",
    "run_pasta_qc_cycle",
]
