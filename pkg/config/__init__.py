# config/__init__.py
"""Configuration modules for experiment runs"""

from .app_config import RunConfig, ConfigError, load_config, parse_config, KNOWN_SUITES
from .logging_config import setup_logging, get_logger, get_log_directory

__all__ = ['RunConfig', 'ConfigError', 'load_config', 'parse_config', 'KNOWN_SUITES',
           'setup_logging', 'get_logger', 'get_log_directory']
