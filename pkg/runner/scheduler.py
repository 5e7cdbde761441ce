# runner/scheduler.py - Fan grid tasks out to worker threads
import asyncio
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

from models.models import ResultRow


class TaskScheduler:
    """Run independent grid tasks on a thread pool and collect their rows"""

    def __init__(self, workers: int, log: Optional[logging.Logger] = None):
        self.workers = max(1, int(workers))
        self.log = log or logging.getLogger("Wetting.scheduler")
        self.completed = 0

    def _timed(self, key, fn: Callable[[], List[ResultRow]]) -> List[ResultRow]:
        start = time.perf_counter()
        rows = fn()
        elapsed = time.perf_counter() - start
        for row in rows:
            row["wall_seconds"] = elapsed / max(len(rows), 1)
        self.completed += 1
        self.log.info(f"task {key} finished: {len(rows)} row(s) in {elapsed:.2f}s")
        return rows

    async def run(self, tasks: Sequence) -> List[ResultRow]:
        """Run tasks (objects with .key and .fn); rows come back in task order"""
        loop = asyncio.get_running_loop()
        self.log.info(f"Scheduling {len(tasks)} task(s) on {self.workers} worker(s)")
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = [loop.run_in_executor(pool, self._timed, task.key, task.fn) for task in tasks]
            results = await asyncio.gather(*futures)
        return [row for rows in results for row in rows]
