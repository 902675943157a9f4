"""Heuristic (noise-level-free) regularization-parameter choice rules for
convex Tikhonov regularization: HD, HR, symmetric-QO and right-QO
functionals, FISTA and closed-form diagonal solvers, second Bregman
iterates, and the auto-regularisation / Muckenhoupt-type condition
diagnostics."""

import json as _json

try:
    from tikrules._tikrules import *  # noqa: F401,F403  (installed layout)
    from tikrules import _tikrules as _ext
except ImportError:  # in-tree build: extension sits directly on sys.path
    from _tikrules import *  # noqa: F401,F403
    import _tikrules as _ext

__version__ = "0.1.0"


def run_experiment(config_path, output_dir=None):
    """Run a TOML-configured experiment.

    Returns the report as a dict; when output_dir is given, report.csv and
    report.json are written there as well.
    """
    raw = _ext.run_experiment_json(str(config_path), str(output_dir or ""))
    return _json.loads(raw)
