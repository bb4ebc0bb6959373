from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

KINDS = ("zero", "affine", "power", "clipped-power")


@dataclass(frozen=True)
class NonlinearitySpec:
    """Reaction term f(s).

    ``zero``: f = 0.  ``affine``: f(s) = lam*s + c.  ``power``: f(s) = s|s|**alpha.
    ``clipped-power``: s|s|**alpha for |s| <= mu, continued linearly (C^1) beyond,
    so it is globally Lipschitz with constant (1+alpha)*mu**alpha. ``mu=None``
    means "1 + sup|u|", resolved by the caller from the current field.
    """

    kind: str = "zero"
    alpha: float = 0.0
    lam: float = 0.0
    c: float = 0.0
    mu: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown nonlinearity kind {self.kind!r}")
        if self.kind in ("power", "clipped-power") and not self.alpha > 0:
            raise ValueError("power nonlinearities need alpha > 0")
        if self.kind == "clipped-power" and self.mu is not None and not self.mu > 0:
            raise ValueError("clipped-power needs mu > 0")

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def affine(cls, lam: float, c: float):
        return cls("affine", lam=lam, c=c)

    @classmethod
    def power(cls, alpha: float):
        return cls("power", alpha=alpha)

    @classmethod
    def clipped_power(cls, alpha: float, mu: Optional[float] = None):
        return cls("clipped-power", alpha=alpha, mu=mu)

    def resolved(self, u) -> "NonlinearitySpec":
        """Fix an unset truncation level from the field ``u``."""
        if self.kind == "clipped-power" and self.mu is None:
            sup = float(np.max(np.abs(u))) if np.size(u) else 0.0
            return NonlinearitySpec("clipped-power", alpha=self.alpha, mu=1.0 + sup)
        return self

    @property
    def is_nondecreasing(self) -> bool:
        return self.kind in ("zero", "power", "clipped-power") or (self.kind == "affine" and self.lam >= 0)

    @property
    def lipschitz(self) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "affine":
            return abs(self.lam)
        if self.kind == "clipped-power" and self.mu is not None:
            return (1.0 + self.alpha) * self.mu ** self.alpha
        return float("inf")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(s)
        if self.kind == "affine":
            return self.lam * s + self.c
        a = abs(s)
        if self.kind == "power":
            return s * a ** self.alpha
        mu = self.mu if self.mu is not None else 1.0 + (float(a.max()) if a.size else 0.0)
        inner = s * np.minimum(a, mu) ** self.alpha
        outer = np.sign(s) * ((1.0 + self.alpha) * mu ** self.alpha * a - self.alpha * mu ** (1.0 + self.alpha))
        return np.where(a <= mu, inner, outer)

    def primitive(self, s):
        """F(s) = int_0^s f, for the energy functional."""
        s = np.asarray(s, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(s)
        if self.kind == "affine":
            return 0.5 * self.lam * s * s + self.c * s
        a = abs(s)
        p = self.alpha + 2.0
        if self.kind == "power":
            return a ** p / p
        mu = self.mu if self.mu is not None else 1.0 + (float(a.max()) if a.size else 0.0)
        inner = np.minimum(a, mu) ** p / p
        excess = np.maximum(a - mu, 0.0)
        outer = ((1.0 + self.alpha) * mu ** self.alpha * 0.5 * (excess * (excess + 2.0 * mu))
                 - self.alpha * mu ** (1.0 + self.alpha) * excess)
        return inner + outer

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind in ("power", "clipped-power"):
            d["alpha"] = self.alpha
        if self.kind == "clipped-power" and self.mu is not None:
            d["mu"] = self.mu
        if self.kind == "affine":
            d.update(lam=self.lam, c=self.c)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NonlinearitySpec":
        return cls(d.get("kind", "zero"), alpha=float(d.get("alpha", 0.0)), lam=float(d.get("lam", 0.0)),
                   c=float(d.get("c", 0.0)), mu=None if d.get("mu") is None else float(d["mu"]))
