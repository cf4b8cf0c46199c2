"""Command-line front end."""

from .config import COMMANDS, ScenarioConfig, build_config, load_config, parse_lambda_spec
from .runner import replay, run

__all__ = ["COMMANDS", "ScenarioConfig", "build_config", "load_config", "parse_lambda_spec",
           "replay", "run"]
