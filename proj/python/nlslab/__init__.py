"""Radial cubic NLS threshold lab (Python front end to the C++ core)."""
import json as _json

from ._core import (  # noqa: F401
    LabError,
    __version__,
    ground_state,
    profile_slopes,
    spectrum,
)
from . import _core


def _cfg(config):
    return None if config is None else _json.dumps(config)


def evolve(data, t1=None, dt=1e-4, n_points=1024, r_max=30.0, scheme="implicit_cn"):
    """Evolve threshold data; `data` is a dict like {"kind": "profile", "A": -1}."""
    return _core._evolve(_json.dumps(data), t1=t1, dt=dt, n_points=n_points, r_max=r_max, scheme=scheme)


def classify(data, dt=1e-4, horizon_forward=8.0, horizon_backward=20.0, n_points=1024, r_max=30.0):
    return _json.loads(_core._classify(_json.dumps(data), dt=dt, horizon_forward=horizon_forward,
                                       horizon_backward=horizon_backward, n_points=n_points, r_max=r_max))


def cauchy_schwarz(lambdas, n_points=2048, r_max=30.0):
    return _json.loads(_core._cauchy_schwarz(list(lambdas), n_points=n_points, r_max=r_max))


def selftest(config=None):
    return _json.loads(_core._selftest(_cfg(config)))


def config_hash(config=None):
    return _core.config_hash(_cfg(config))
