"""Age of information in clocked two-agent systems."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, UnboundedError, analyze as _analyze

__version__ = "0.1.0"


def analyze(cfg, sigma=None):
    """Analysis report as a dict."""
    return _json.loads(_analyze(cfg, sigma))
