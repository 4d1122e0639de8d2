"""Python access to the Edge-ICN simulator and overhead models."""

from fractions import Fraction

from ._core import (
    EdgeIcnError,
    conformant_star_scenario,
    new_link_id,
    sweep_csv,
    theoretical_fp_rate,
)
from ._core import _edge_model, _point_model, _run_scenario

__all__ = [
    "EdgeIcnError",
    "conformant_star_scenario",
    "edge_model",
    "new_link_id",
    "point_model",
    "run_scenario",
    "sweep_csv",
    "theoretical_fp_rate",
]

__version__ = "0.1.0"


def point_model(scopes, advertisers, subscribers, l=1, **kw):
    return Fraction(*_point_model(scopes, advertisers, subscribers, l, **kw))


def edge_model(scopes, advertisers, subscribers, l=1, **kw):
    return Fraction(*_edge_model(scopes, advertisers, subscribers, l, **kw))


def run_scenario(text, mode="edge-icn", seed=None):
    """Runs scenario text; l_units comes back as a Fraction."""
    result = _run_scenario(text, mode, seed)
    result["l_units"] = Fraction(*result["l_units"])
    return result
