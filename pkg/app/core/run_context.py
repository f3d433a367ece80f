"""
Utilities for storing per-run correlation IDs using `contextvars`.

Why this exists
---------------
A single process can be busy with several units of work at once: an HTTP
request served by the API, a CLI invocation, or one Monte Carlo trial of an
experiment running inside a worker. Log lines emitted deep inside the filter
or the samplers should still be attributable to the unit of work that caused
them, without threading an identifier through every function signature.

`contextvars.ContextVar` gives us that scoped storage. It is safe in async
code (the API) and each worker process of the experiment pool has its own
copy.

Two identifiers are kept:

- ``current_run_id``: one per CLI invocation, HTTP request or experiment.
- ``current_trial_id``: the Monte Carlo trial currently being processed,
  formatted as ``"<grid>/<trial>"``.

The JSON log formatter (:mod:`app.core.logging`) reads both and attaches them
to every record.
"""

from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional
import uuid

current_run_id: ContextVar[Optional[str]] = ContextVar(
    "current_run_id",
    default=None,
)

current_trial_id: ContextVar[Optional[str]] = ContextVar(
    "current_trial_id",
    default=None,
)


def new_run_id() -> str:
    return str(uuid.uuid4())


def get_run_id() -> Optional[str]:
    """
    Get the current run ID stored in the context.

    Returns
    -------
    Optional[str]
        The run ID for the current execution context, or ``None`` if no run
        has been started (e.g. library use from a notebook).
    """
    return current_run_id.get()


def set_run_id(rid: str) -> None:
    """Set the run ID for the current execution context."""
    current_run_id.set(rid)


@contextmanager
def trial_scope(grid_index: int, trial_index: int) -> Iterator[str]:
    """
    Bind ``current_trial_id`` for the duration of one Monte Carlo trial.

    The previous value is restored on exit so nested or sequential trials in
    the same thread do not leak into each other.
    """
    trial_id = f"{grid_index}/{trial_index}"
    token = current_trial_id.set(trial_id)
    try:
        yield trial_id
    finally:
        current_trial_id.reset(token)
