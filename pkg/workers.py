"""
Parallel fan-out with an order-stable merge.

Chunks run on a process pool (the work is CPU-bound), complete in any order
under a tqdm bar, and come back in submission order so results never depend
on the worker count.
"""
import logging
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Callable, Iterable, TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_chunks(
    worker: Callable[[T], R],
    chunks: Iterable[T],
    jobs: int = 1,
    desc: str = "Working",
    show_progress: bool = False,
) -> list[R]:
    """
    Apply a picklable, module-level worker to every chunk.

    Args:
        worker: function of one chunk
        chunks: work items, in the order results should come back
        jobs: process count; 1 runs inline
        desc: progress bar label
        show_progress: draw a tqdm bar on stderr

    Returns:
        List of worker results, one per chunk, in chunk order
    """
    chunks = list(chunks)
    results: list = [None] * len(chunks)

    with tqdm(total=len(chunks), desc=desc, file=sys.stderr, disable=not show_progress) as pbar:
        if jobs <= 1 or len(chunks) <= 1:
            for idx, chunk in enumerate(chunks):
                results[idx] = worker(chunk)
                pbar.update(1)
            return results

        logger.debug("%s: %d chunks on %d processes", desc, len(chunks), jobs)
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = {executor.submit(worker, chunk): idx for idx, chunk in enumerate(chunks)}
            for future in as_completed(futures):
                idx = futures[future]
                results[idx] = future.result()
                pbar.update(1)
    return results
