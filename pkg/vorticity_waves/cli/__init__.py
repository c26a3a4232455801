"""
Command-line package: subcommands, persistence and the validation suite
"""
from .main import build_parser, main, resolve_config

__all__ = ['build_parser', 'main', 'resolve_config']
