"""Lan-DeMets spending functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError
from ..numerics import check_probability, normal_quantile, normal_sf

__all__ = ["FAMILIES", "lan_demets", "SpendingFunction", "spending_value"]

FAMILIES = ("obf", "pocock")
_ALIASES = {
    "obf": "obf",
    "obf_lan_demets": "obf",
    "obrien_fleming": "obf",
    "pocock": "pocock",
    "pocock_lan_demets": "pocock",
}


def _family(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise DomainError(f"unknown spending family {name!r}; expected one of {FAMILIES}") from None


def _check_t(t):
    t = float(t)
    if not 0.0 < t <= 1.0:
        raise DomainError(f"information fraction t={t} must lie in (0, 1]")
    return t


def lan_demets(family: str, t: float, level: float) -> float:
    """Cumulative error spent by time ``t`` for a one-sided error ``level``.

    OBF-type: ``2 (1 - Phi(z_{1 - level/2} / sqrt(t)))``.
    Pocock-type: ``level * ln(1 + (e - 1) t)``.
    """
    fam = _family(family)
    t = _check_t(t)
    level = check_probability(level, "level", open_interval=True)
    if fam == "obf":
        if t == 1.0:
            return level
        return 2.0 * normal_sf(normal_quantile(1.0 - level / 2.0) / math.sqrt(t))
    return level * math.log1p((math.e - 1.0) * t)


@dataclass(frozen=True)
class SpendingFunction:
    """Two-sided symmetric spending of ``total_alpha``.

    Each side spends ``total_alpha / 2`` by the one-sided Lan-DeMets function
    of the chosen family, so the two-sided cumulative spend at ``t`` is
    ``2 * lan_demets(family, t, total_alpha / 2)``.
    """

    family: str
    total_alpha: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "family", _family(self.family))
        check_probability(self.total_alpha, "total_alpha", open_interval=True)

    @property
    def alpha_one_sided(self) -> float:
        return self.total_alpha / 2.0

    def one_sided(self, t: float) -> float:
        return lan_demets(self.family, t, self.alpha_one_sided)

    def __call__(self, t: float) -> float:
        return 2.0 * self.one_sided(t)


def spending_value(sf: SpendingFunction, t: float) -> float:
    """Two-sided cumulative alpha spent by information fraction ``t``."""
    return sf(t)
