"""Physical constants. Natural units (hbar = c = 1), momenta and masses in MeV.

Values follow CODATA; they are configurable so that threshold formulas like
sqrt(m_e * m_mu)/2 can be re-derived with whatever masses a run used.
"""
from __future__ import annotations

from dataclasses import dataclass
import math


@dataclass(frozen=True)
class Constants:
    m_e: float = 0.51099895       # electron mass [MeV]
    m_mu: float = 105.6583755     # muon mass [MeV]
    alpha: float = 1.0 / 137.035999084

    @property
    def e2(self) -> float:
        """Squared electromagnetic coupling e^2 = 4 pi alpha."""
        return 4.0 * math.pi * self.alpha

    @property
    def alpha3(self) -> float:
        """alpha^3, the loop-correction scale used by the switching heuristic."""
        return self.alpha ** 3


DEFAULT = Constants()
