"""Working/high precision pair and the conversions between them."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PrecisionPair:
    """Working precision ``u`` together with a higher precision of about ``u**2``."""

    name: str
    working: type
    high: type

    def __post_init__(self):
        u, u2 = self.working_unit_roundoff, self.high_unit_roundoff
        if not (u > 0 and u2 > 0):
            raise ValueError("unit roundoffs must be positive")
        if u2 > u * u * 1e3:
            raise ValueError(
                f"{self.name}: high precision ({u2:.3g}) is not about the square "
                f"of working precision ({u:.3g})"
            )

    @property
    def working_unit_roundoff(self) -> float:
        return dtype_unit_roundoff(self.working)

    @property
    def high_unit_roundoff(self) -> float:
        return dtype_unit_roundoff(self.high)

    def unit_roundoff(self, which: str = "working") -> float:
        if which == "working":
            return self.working_unit_roundoff
        if which == "high":
            return self.high_unit_roundoff
        raise ValueError(f"expected 'working' or 'high', got {which!r}")

    def promote(self, a):
        return promote(a, self.high)

    def round(self, a):
        return round_to(a, self.working)


def dtype_unit_roundoff(dtype) -> float:
    """Unit roundoff (half machine epsilon) for round-to-nearest."""
    return float(np.finfo(dtype).eps) / 2


F32F64 = PrecisionPair("f32f64", np.float32, np.float64)

PRECISIONS = {F32F64.name: F32F64}


def get_pair(name: str) -> PrecisionPair:
    try:
        return PRECISIONS[name]
    except KeyError:
        raise ValueError(
            f"unknown precision pair {name!r}; available: {', '.join(PRECISIONS)}"
        ) from None


def unit_roundoff(which: str = "working", pair: PrecisionPair = F32F64) -> float:
    return pair.unit_roundoff(which)


def promote(a, high=np.float64):
    """Exact embedding of a working-precision array into ``high``."""
    a = np.asarray(a)
    if np.finfo(a.dtype).nmant > np.finfo(high).nmant:
        raise TypeError(f"cannot promote {a.dtype} to narrower {np.dtype(high)}")
    return a.astype(high, order="F")


def round_to(a, working=np.float32):
    """Round-to-nearest-even into ``working``; overflow is an error."""
    a = np.asarray(a)
    with np.errstate(over="ignore"):
        out = a.astype(working, order="F")
    if not np.all(np.isfinite(out[np.isfinite(a)])):
        raise OverflowError(f"value out of range for {np.dtype(working)}")
    return out
