"""Parameter bundle shared by every norm, estimate and solver."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class GevreyParams:
    """Gevrey radius ``a``, Gevrey index ``sigma``, Sobolev exponent ``s``, viscosity ``nu``."""

    a: float
    sigma: float
    s: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        for name in ("a", "sigma", "s", "nu"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.a <= 0:
            raise ValueError(f"Gevrey radius a must be > 0, got {self.a}")
        if self.sigma < 1:
            raise ValueError(f"Gevrey index sigma must be >= 1, got {self.sigma}")
        if self.nu <= 0:
            raise ValueError(f"viscosity nu must be > 0, got {self.nu}")

    def require_strict_index(self) -> None:
        if self.sigma <= 1:
            raise ValueError("this quantity needs sigma > 1 (it degenerates at sigma = 1)")

    @property
    def sigma0_twice(self) -> int:
        """Integer part of ``2 * sigma``."""
        return int(math.floor(2 * self.sigma))

    def as_dict(self) -> dict:
        return asdict(self)
