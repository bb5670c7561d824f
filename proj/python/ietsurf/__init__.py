"""Interval exchanges, suspended translation surfaces, recurrence experiments.

Thin wrapper over the compiled extension.  The fast path for scripting is the
direct functions (double backend); `run(...)` drives the same command dispatch
as the `ietsurf` CLI and accepts the same string-typed options, which is also
how you reach the exact backends from python.
"""

import json as _json

from ._ietsurf import (  # noqa: F401
    IetsurfError,
    __version__,
    cone_contains,
    detect_connections,
    epsilon_trace,
    evaluate,
    is_admissible,
    is_irreducible,
    is_positive_pair,
    mahler_curve,
    null_space,
    orbit,
    phi,
    q_matrix,
    recurrence_diagnostic,
    rel_deform,
    run_json,
    saddle_connections,
    stratum,
    suspend,
    universal_direction,
    vertical_return_map,
)


def run(command, **options):
    """Run a CLI-style command, e.g. run("perm.info", sigma="2,1").

    Returns (exit_code, stdout_text, stderr_text); stdout is usually JSON.
    Option names mirror the CLI flags (sigma, a, b, window, samples, ...);
    values are strings or things str() turns into the CLI syntax.
    """
    cfg = {"command": command}
    for key, value in options.items():
        if isinstance(value, bool):
            cfg[key] = value
        elif isinstance(value, (list, tuple)):
            cfg[key] = ",".join(str(v) for v in value)
        else:
            cfg[key] = str(value)
    return run_json(_json.dumps(cfg))
