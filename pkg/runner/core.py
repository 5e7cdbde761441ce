# runner/core.py
from __future__ import annotations
import importlib
import logging
from typing import Callable, Dict, List, NamedTuple, Optional, Protocol, Tuple, TYPE_CHECKING

from config.logging_config import get_logger
from field.disorder import DisorderLaw
from field.model import BoundarySpec, ModelParams
from models.models import ResultRow
from .scheduler import TaskScheduler

if TYPE_CHECKING:
    from config.app_config import RunConfig

SUITE_MODULES: List[str] = [
    "suites.oracle",
    "suites.coupling",
    "suites.ti_curve",
    "suites.scaling",
    "suites.kgap",
    "suites.superadd",
    "suites.marginal",
    "suites.second_moment",
]


class Task(NamedTuple):
    key: Tuple
    fn: Callable[[], List[ResultRow]]


class Suite(Protocol):
    name: str
    description: str

    def tasks(self, config: "RunConfig") -> List[Task]:
        ...


def model_params(config: "RunConfig", **changes) -> ModelParams:
    """ModelParams for the configured model, with optional per-task changes"""
    base = dict(
        d=config.d, N=config.N, beta=config.beta, h=config.h, K=config.K,
        law=DisorderLaw(config.law), seed=config.seed, origin_mode=config.origin_mode,
        boundary=BoundarySpec(config.boundary, config.u, config.pad),
        window=config.window, reward=config.reward,
    )
    base.update(changes)
    return ModelParams(**base)


class ExperimentRunner:
    """Holds the loaded suites and runs one of them on a configuration"""

    def __init__(self, *, log: Optional[logging.Logger] = None, workers: int = 1) -> None:
        self.log: logging.Logger = log or get_logger()
        self.workers = workers
        self.suites: Dict[str, Suite] = {}

    def add_suite(self, suite: Suite) -> None:
        self.suites[suite.name] = suite

    async def load_extension(self, module_name: str) -> None:
        module = importlib.import_module(module_name)
        setup = getattr(module, "setup", None)
        if setup is None:
            raise ImportError(f"{module_name} has no setup(runner) function")
        await setup(self)

    async def setup_hook(self) -> None:
        """Load every suite module, logging failures individually"""
        for module_name in SUITE_MODULES:
            try:
                await self.load_extension(module_name)
                self.log.debug(f"Successfully loaded {module_name}")
            except Exception as e:
                self.log.error(f"Failed to load {module_name}: {e}")
        self.log.info(f"Loaded suites: {', '.join(sorted(self.suites)) if self.suites else 'None'}")

    def list_suites(self) -> List[Tuple[str, str]]:
        return [(name, self.suites[name].description) for name in sorted(self.suites)]

    def get_suite(self, name: str) -> Suite:
        if name not in self.suites:
            raise KeyError(f"unknown suite {name!r}; valid suites are {', '.join(sorted(self.suites))}")
        return self.suites[name]

    async def run(self, config: "RunConfig") -> List[ResultRow]:
        suite = self.get_suite(config.suite)
        tasks = sorted(suite.tasks(config), key=lambda t: repr(t.key))
        self.log.info(f"Running suite {suite.name} with {len(tasks)} task(s), seed={config.seed}")
        scheduler = TaskScheduler(self.workers, self.log.getChild("scheduler"))
        return await scheduler.run(tasks)


async def create_runner(log: Optional[logging.Logger] = None, workers: int = 1) -> ExperimentRunner:
    runner = ExperimentRunner(log=log, workers=workers)
    await runner.setup_hook()
    return runner
