"""Analytic-versus-simulated verdicts."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import DomainError

__all__ = ["Verdict", "compare"]


@dataclass(frozen=True)
class Verdict:
    """Machine-readable comparison record.

    ``gap`` is ``analytic - simulated``; ``allowed`` is ``3 se + slack``.
    """

    name: str
    analytic: float
    simulated: float
    se: float
    slack: float
    gap: float
    allowed: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def compare(analytic: float, rate: float, se: float, slack: float = 0.0, name: str = "") -> Verdict:
    """Pass iff ``|analytic - rate| <= 3 se + slack``.

    Raises:
        DomainError: If ``se`` is not positive.
    """
    if not se > 0:
        raise DomainError("standard error must be positive")
    gap = float(analytic) - float(rate)
    allowed = 3.0 * float(se) + float(slack)
    return Verdict(name, float(analytic), float(rate), float(se), float(slack), gap, allowed, abs(gap) <= allowed)
