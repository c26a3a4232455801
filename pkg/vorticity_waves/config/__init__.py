"""
Configuration package
"""
from .settings import settings, Settings, load_config_file

__all__ = ['settings', 'Settings', 'load_config_file']
