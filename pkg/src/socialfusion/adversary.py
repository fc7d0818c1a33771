"""Byzantine capture and decision corruption."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class AdversaryProfile:
    """Capture probability ``p_b`` and corruption matrix of a Byzantine adversary.

    A captured node replaces its honest bit ``pi`` by 0 with probability
    ``c00`` (when ``pi = 0``) or ``c01`` (when ``pi = 1``). The derived pair
    ``(z0, z1)`` gives ``P{X = 0} = z0 + z1 * P{pi = 0}``; ``z1`` is negative
    for flip-heavy adversaries.
    """

    p_b: float
    c00: float = 0.0
    c01: float = 1.0
    z0: float = field(init=False)
    z1: float = field(init=False)

    def __post_init__(self):
        for name in ("p_b", "c00", "c01"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        object.__setattr__(self, "z0", self.p_b * self.c01)
        object.__setattr__(self, "z1", 1.0 - self.p_b * (1.0 - self.c00 + self.c01))

    @property
    def one_intercept(self) -> float:
        """``P{X = 1 | pi always 1} - z1``, i.e. ``1 - z0 - z1 = p_b * (1 - c00)``.

        Lets callers form ``P{X = 1}`` from ``P{pi = 1}`` without subtracting
        from one.
        """
        return self.p_b * (1.0 - self.c00)

    @classmethod
    def powerless(cls) -> "AdversaryProfile":
        return cls(0.0)

    @classmethod
    def bit_flip(cls, p_b: float) -> "AdversaryProfile":
        """Captured nodes always invert their decision."""
        return cls(p_b, c00=0.0, c01=1.0)

    @classmethod
    def blackout(cls, p_b: float) -> "AdversaryProfile":
        """Captured nodes always broadcast 0 (suppress alarms)."""
        return cls(p_b, c00=1.0, c01=1.0)


def derive_attack_constants(p_b: float, c00: float, c01: float) -> AdversaryProfile:
    return AdversaryProfile(p_b, c00, c01)


def corrupt_decision_prob(profile: AdversaryProfile, f: float) -> float:
    """Broadcast-0 probability given the honest decide-0 probability ``f``."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"f must lie in [0, 1], got {f!r}")
    return profile.z0 + profile.z1 * f
