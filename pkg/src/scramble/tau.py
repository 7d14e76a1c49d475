"""Kick periods as exact rational multiples of pi.

Sweep grids use tau values like pi/4 and k*pi/32; representing them as
reduced fractions keeps grid arithmetic exact (the pairing between tau
and pi/2 - tau in particular) and gives CSV output a lossless integer
encoding.  A raw float tau is still accepted by the single-run code
paths; only sweeps insist on the exact form.
"""

import math
import re
from dataclasses import dataclass
from functools import total_ordering

# the small detuning used throughout: eps = pi/16 (for unit coupling)
EPS_NUM, EPS_DEN = 1, 16

_PATTERNS = (
    # "3*pi/32", "3pi/32", "pi/4", "pi"
    re.compile(r"^(?:(\d+)\s*\*?\s*)?pi(?:\s*/\s*(\d+))?$"),
    # "3*eps/2", "3eps/2", "eps/2", "eps", "5*eps"
    re.compile(r"^(?:(\d+)\s*\*?\s*)?eps(?:\s*/\s*(\d+))?$"),
)


@total_ordering
@dataclass(frozen=True)
class TauSpec:
    """tau = num * pi / den, reduced, with num >= 0 and den >= 1."""

    num: int
    den: int

    def __post_init__(self):
        if self.den < 1:
            raise ValueError("denominator must be positive")
        if self.num < 0:
            raise ValueError("tau must be nonnegative")
        g = math.gcd(self.num, self.den) or 1
        object.__setattr__(self, "num", self.num // g)
        object.__setattr__(self, "den", self.den // g)

    @property
    def value(self):
        return self.num * math.pi / self.den

    def __lt__(self, other):
        return self.num * other.den < other.num * self.den

    def complement(self):
        """The mirror point pi/2 - tau, exact."""
        num = self.den - 2 * self.num
        if num < 0:
            raise ValueError(f"{self.label()} exceeds pi/2")
        return TauSpec(num, 2 * self.den)

    def label(self):
        if self.num == 0:
            return "0"
        head = "pi" if self.num == 1 else f"{self.num}pi"
        return head if self.den == 1 else f"{head}/{self.den}"

    @classmethod
    def parse(cls, text):
        """Parse symbolic forms: '0', 'pi/4', '3*pi/32', 'eps/2', '3*eps/2'."""
        s = text.strip().lower().replace(" ", "")
        if s in ("0", "0.0"):
            return cls(0, 1)
        m = _PATTERNS[0].match(s)
        if m:
            return cls(int(m.group(1) or 1), int(m.group(2) or 1))
        m = _PATTERNS[1].match(s)
        if m:
            k = int(m.group(1) or 1) * EPS_NUM
            return cls(k, EPS_DEN * int(m.group(2) or 1))
        raise ValueError(f"cannot parse tau {text!r}")


EPS = TauSpec(EPS_NUM, EPS_DEN)
SELF_DUAL = TauSpec(1, 4)


def half_eps_grid(kmax=16):
    """tau = k*eps/2 for k = 0..kmax (kmax=16 reaches pi/2)."""
    return tuple(TauSpec(k, 32) for k in range(kmax + 1))


def eps_grid(kmax=8):
    """tau = k*eps for k = 0..kmax (kmax=8 reaches pi/2)."""
    return tuple(TauSpec(k, 16) for k in range(kmax + 1))


def parse_tau(text):
    """Symbolic TauSpec when possible, else a raw float."""
    try:
        return TauSpec.parse(text)
    except ValueError:
        pass
    try:
        val = float(text)
    except ValueError:
        raise ValueError(f"cannot parse tau {text!r}") from None
    if val < 0:
        raise ValueError("tau must be nonnegative")
    return val
