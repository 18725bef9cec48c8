"""Independent numerical oracle: the SU(2) Verlinde sum with one marked point."""
from __future__ import annotations

import mpmath

TOLERANCE = mpmath.mpf(10) ** -20


class OracleError(ArithmeticError):
    pass


def verlinde_su2(g: int, k: int, m: int, dps: int = 60) -> int:
    """((k+2)/2)^{g-1} Σ_{j=1}^{k+1} sin(πj(m+1)/(k+2)) / sin(πj/(k+2))^{2g-1}.

    ``m`` is the highest weight λ_1 − λ_2 at the marked point.  The sum is
    evaluated at ``dps`` digits and must be within 1e-20 of an integer.
    """
    with mpmath.workdps(dps):
        kh = mpmath.mpf(k + 2)
        total = mpmath.mpf(0)
        for j in range(1, k + 2):
            total += mpmath.sin(mpmath.pi * j * (m + 1) / kh) / mpmath.sin(mpmath.pi * j / kh) ** (2 * g - 1)
        value = (kh / 2) ** (g - 1) * total
        nearest = mpmath.nint(value)
        if abs(value - nearest) >= TOLERANCE:
            raise OracleError(f"Verlinde sum not integral: {value}")
        return int(nearest)
