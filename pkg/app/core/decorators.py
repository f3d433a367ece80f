"""
Infrastructure for action-level logging using a decorator.

Why this exists
---------------
One CLI invocation or one experiment trial triggers several coarse-grained
"actions": simulating a scenario, running the filter over it, benchmarking a
kernel, writing reports. When a run misbehaves it is very helpful to know:

- *which* action ran,
- *with what* input,
- *how long* it took, and
- *which* error it raised,

tied back to the run and trial identifiers from :mod:`app.core.run_context`.

What this module provides
-------------------------
- :func:`log_action` wraps a function (sync or async) and emits structured
  log records on entry, on completion (with duration) and on error (with the
  traceback), then re-raises the original exception unchanged.

The decorator is **non-invasive**: if building the log payload fails for any
reason, the wrapped function still runs normally. It is meant for top-level
operations only; sampler inner loops are never decorated.

Typical usage
-------------

    from app.core.decorators import log_action

    @log_action(action_type="filter", action_name="run_filter")
    def run_filter(frames, models, budget, seed):
        ...
"""

from functools import wraps
from typing import Callable, Any, Optional, Mapping
import inspect
import logging
import time
import traceback
import json

import numpy as np

from app.core.config import settings

logger = logging.getLogger(__name__)


def _safe_jsonable(obj: Any, max_len: int = 2_000) -> Any:
    """
    Convert arbitrary objects into something JSON/log friendly (best effort).

    Strategy
    --------
    - numpy arrays are summarized by shape and dtype, never dumped.
    - pydantic models are dumped through ``model_dump``.
    - Values whose JSON form fits in ``max_len`` are returned unchanged.
    - Anything else falls back to a truncated ``repr``.
    """
    if isinstance(obj, np.ndarray):
        return {"ndarray": list(obj.shape), "dtype": str(obj.dtype)}
    if hasattr(obj, "model_dump"):
        try:
            obj = obj.model_dump(mode="json")
        except Exception:
            pass
    try:
        s = json.dumps(obj, default=str)
        if len(s) <= max_len:
            return obj
        return f"<JSON too large: {len(s)} bytes, truncated>"
    except Exception:
        pass

    rep = repr(obj)
    return rep if len(rep) <= max_len else rep[:max_len] + "...<truncated>"


def _filter_params(bound: inspect.BoundArguments) -> Mapping[str, Any]:
    """
    Filter and sanitize function arguments for logging.

    ``self`` / ``cls`` are stripped out; remaining values are passed through
    :func:`_safe_jsonable`.
    """
    limit = int(getattr(settings, "MAX_PARAM_LOG_SIZE", 2_000))
    filtered: dict[str, Any] = {}
    for name, value in bound.arguments.items():
        if name in ("self", "cls"):
            continue
        filtered[name] = _safe_jsonable(value, max_len=limit)
    return filtered


def log_action(
    action_type: str,
    action_name: Optional[str] = None,
    log_result: bool = False,
    log_params: bool = True,
) -> Callable:
    """
    Decorator for recording structured action logs around a function call.

    Parameters
    ----------
    action_type : str
        High-level category of the action (e.g. ``"simulate"``, ``"filter"``,
        ``"bench"``).
    action_name : Optional[str], optional
        Logical name of the action. Defaults to the wrapped function's name.
    log_result : bool, optional
        Whether to log a sanitized representation of the return value.
    log_params : bool, optional
        Whether to log sanitized input parameters, by default True.

    Returns
    -------
    Callable
        A decorator that wraps the target function.
    """
    def decorator(func: Callable) -> Callable:
        is_coro = inspect.iscoroutinefunction(func)
        resolved_action_name = action_name if action_name else func.__name__

        def capture_params(args, kwargs) -> Optional[Mapping[str, Any]]:
            if not log_params:
                return None
            try:
                bound = inspect.signature(func).bind(*args, **kwargs)
                bound.apply_defaults()
                return _filter_params(bound)
            except Exception as exc:
                logger.debug("Could not capture parameters: %s", exc, exc_info=True)
                return None

        def on_start(params: Optional[Mapping[str, Any]]) -> None:
            logger.info(
                "action started: %s", resolved_action_name,
                extra={"extra_data": {
                    "action_type": action_type,
                    "action_name": resolved_action_name,
                    "input_params": params,
                }},
            )

        def on_success(started: float, result: Any) -> None:
            duration_ms = (time.perf_counter() - started) * 1000.0
            payload = {
                "action_type": action_type,
                "action_name": resolved_action_name,
                "duration_ms": round(duration_ms, 3),
            }
            if log_result:
                payload["output_result"] = _safe_jsonable(result)
            logger.info("action finished: %s", resolved_action_name, extra={"extra_data": payload})

        def on_error(started: float, err: BaseException) -> None:
            duration_ms = (time.perf_counter() - started) * 1000.0
            logger.error(
                "action failed: %s: %s", resolved_action_name, err,
                extra={"extra_data": {
                    "action_type": action_type,
                    "action_name": resolved_action_name,
                    "duration_ms": round(duration_ms, 3),
                    "error_traceback": traceback.format_exc(),
                }},
            )

        @wraps(func)
        def sync_wrapper(*args, **kwargs) -> Any:
            on_start(capture_params(args, kwargs))
            started = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as exc:
                on_error(started, exc)
                raise
            on_success(started, result)
            return result

        @wraps(func)
        async def async_wrapper(*args, **kwargs) -> Any:
            on_start(capture_params(args, kwargs))
            started = time.perf_counter()
            try:
                result = await func(*args, **kwargs)
            except Exception as exc:
                on_error(started, exc)
                raise
            on_success(started, result)
            return result

        return async_wrapper if is_coro else sync_wrapper

    return decorator
