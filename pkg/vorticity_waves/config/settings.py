"""
Configuration module for the wave solver
"""
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml
from pydantic_settings import BaseSettings

from vorticity_waves.errors import ConfigError

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Solver settings, overridable through WAVES_* environment variables or .env"""

    # Truncation
    truncation: int = 256
    escalated_truncation: int = 1024
    dealias_factor: int = 4
    tail_energy_threshold: float = 1e-8
    symmetry_tol: float = 1e-8

    # Newton
    newton_tol: float = 1e-11
    max_newton_iters: int = 25
    damping_factor: float = 0.5
    max_halvings: int = 10
    fd_step: float = 1e-6
    denominator_floor: float = 1e-10

    # Geometry
    slope_tol: float = 1e-6
    gap_tol: float = 1e-3
    guard_band: float = 0.5
    stagnation_floor: float = 1e-8
    geometry_oversample: int = 8

    # Continuation
    da_initial: float = 1e-3
    da_min: float = 1e-7
    da_max: float = 1e-2
    step_grow: float = 1.3
    step_shrink: float = 0.5
    grow_after_iters: int = 3
    max_branch_points: int = 4000
    switch_amplitude: float = 1e-2
    bifurcation_bracket: Tuple[float, float] = (-0.5, 0.5)
    bifurcation_a_bracket: Tuple[float, float] = (-0.3, 0.3)
    event_tol: float = 1e-8

    # Critical layers
    analytic_tail_tol: float = 1e-8
    crit_half_width: float = 0.05
    crit_gravity_scale: float = 0.25
    crit_columns: int = 400
    crit_rows: int = 200

    # Runtime
    log_level: str = "INFO"
    log_format: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    output_dir: str = "./runs"
    workers: int = 1
    validate_perturb: Optional[str] = None

    class Config:
        env_file = ".env"
        env_prefix = "WAVES_"
        case_sensitive = False


settings = Settings()


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a YAML run configuration

    Args:
        path: Path to a YAML file whose top level is a mapping

    Returns:
        The parsed mapping (empty for an empty file)
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Config file {path} is not valid YAML: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a mapping, got {type(data).__name__}")

    logger.debug(f"Loaded {len(data)} config keys from {path}")
    return data
