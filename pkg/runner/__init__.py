# runner/__init__.py
"""Experiment runner: suite loading, task fan-out, result files"""

__version__ = "0.1.0"

from .core import ExperimentRunner, Suite, Task, create_runner, SUITE_MODULES
from .output import make_row, sort_rows, write_results, write_manifest

__all__ = ['__version__', 'ExperimentRunner', 'Suite', 'Task', 'create_runner', 'SUITE_MODULES',
           'make_row', 'sort_rows', 'write_results', 'write_manifest']
