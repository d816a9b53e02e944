"""Opinion state and the three update rules.

All agents hold two independent opinions (welfare, security) in [0, 1]. Each
dimension is gated separately: an opinion moves a fraction ``convergence`` of
the way toward the incoming value only when the two are within ``tolerance``.
Expert messages skip the gate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True, slots=True)
class OpinionPair:
    welfare: float
    security: float

    def __post_init__(self) -> None:
        _check_unit("welfare", self.welfare)
        _check_unit("security", self.security)


@dataclass(frozen=True, slots=True)
class Message:
    welfare: float
    security: float

    def __post_init__(self) -> None:
        _check_unit("welfare", self.welfare)
        _check_unit("security", self.security)


@dataclass(frozen=True, slots=True)
class UpdateParams:
    tolerance: float
    convergence: float = 0.5

    def __post_init__(self) -> None:
        _check_unit("tolerance", self.tolerance)
        if not 0.0 < self.convergence <= 0.5:
            raise ValueError(f"convergence must lie in (0, 0.5], got {self.convergence!r}")


class Role(enum.Enum):
    TELEVIEWER = "tv"
    WISE_AGENT = "wa"
    WHITE_ZONE = "wz"


@dataclass(slots=True)
class Agent:
    id: int
    role: Role
    opinions: OpinionPair


def bcm_update_scalar(x: float, y: float, tolerance: float, convergence: float) -> float:
    """Move ``x`` toward ``y`` by ``convergence`` of the gap if ``|x - y| <= tolerance``."""
    if abs(x - y) <= tolerance:
        return x + convergence * (y - x)
    return x


def peer_update(receiver: OpinionPair, sender: OpinionPair | Message, params: UpdateParams) -> OpinionPair:
    t, m = params.tolerance, params.convergence
    return OpinionPair(
        bcm_update_scalar(receiver.welfare, sender.welfare, t, m),
        bcm_update_scalar(receiver.security, sender.security, t, m),
    )


def media_update(opinions: OpinionPair, message: Message, params: UpdateParams) -> OpinionPair:
    """Gated update toward a broadcast message; same arithmetic as a peer exchange."""
    return peer_update(opinions, message, params)


def expert_update(opinions: OpinionPair, message: Message, convergence: float) -> OpinionPair:
    # ungated: the message is trusted regardless of distance
    if not 0.0 < convergence <= 0.5:
        raise ValueError(f"convergence must lie in (0, 0.5], got {convergence!r}")
    return OpinionPair(
        opinions.welfare + convergence * (message.welfare - opinions.welfare),
        opinions.security + convergence * (message.security - opinions.security),
    )
