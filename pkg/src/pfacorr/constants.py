"""Boundary-condition constants, the parallel-plate law and gradient coefficients.

Every coefficient is stored exactly as ``a + b / pi**2`` with rational ``a``
and ``b`` (:class:`PiRational`) and converted to a float only on demand, so
identities such as ``beta_EM = (beta_D + beta_N) / 2`` hold symbolically.

Units: hbar = c = 1, all lengths in one arbitrary unit.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import pi

from .errors import DomainError, UnsupportedConfigurationError

__all__ = [
    "PiRational",
    "BoundaryCondition",
    "PlateLaw",
    "CoefficientSet",
    "plate_energy_density",
    "plate_law",
    "alpha_coefficient",
    "beta_coefficient",
    "theta1_exact",
    "coefficient_set",
    "tilt_residual",
    "SUPPORTED_PAIRS",
]


@dataclass(frozen=True)
class PiRational:
    """Exact number ``rational + inv_pi2 / pi**2``."""

    rational: Fraction = Fraction(0)
    inv_pi2: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "rational", Fraction(self.rational))
        object.__setattr__(self, "inv_pi2", Fraction(self.inv_pi2))

    @staticmethod
    def _coerce(other):
        if isinstance(other, PiRational):
            return other
        if isinstance(other, (int, Fraction)):
            return PiRational(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PiRational(self.rational + other.rational, self.inv_pi2 + other.inv_pi2)

    __radd__ = __add__

    def __neg__(self):
        return PiRational(-self.rational, -self.inv_pi2)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        # only rational scalars keep the a + b/pi^2 form closed
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return PiRational(self.rational * other, self.inv_pi2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return PiRational(self.rational / other, self.inv_pi2 / other)

    def __float__(self):
        return float(self.rational) + float(self.inv_pi2) / pi ** 2

    def __str__(self):
        if self.inv_pi2 == 0:
            return str(self.rational)
        b = abs(self.inv_pi2)
        tail = (f"{b.numerator}/pi^2" if b.denominator == 1
                else f"{b.numerator}/({b.denominator} pi^2)")
        if self.rational == 0:
            return ("-" if self.inv_pi2 < 0 else "") + tail
        sign = "-" if self.inv_pi2 < 0 else "+"
        return f"{self.rational} {sign} {tail}"

    def as_dict(self):
        return {"rational": str(self.rational), "inv_pi2": str(self.inv_pi2)}


class BoundaryCondition(str, Enum):
    """Field and boundary setup; for mixed kinds the first letter is the curved surface."""

    D = "D"
    N = "N"
    DN = "DN"
    ND = "ND"
    EM = "EM"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise UnsupportedConfigurationError(
                f"unknown boundary condition {value!r}; expected one of "
                f"{', '.join(m.value for m in cls)}") from None


_ALPHA = {
    BoundaryCondition.D: Fraction(1),
    BoundaryCondition.N: Fraction(1),
    BoundaryCondition.EM: Fraction(2),
    BoundaryCondition.DN: Fraction(-7, 8),
    BoundaryCondition.ND: Fraction(-7, 8),
}

_BETA = {
    BoundaryCondition.D: PiRational(Fraction(2, 3)),
    BoundaryCondition.N: PiRational(Fraction(2, 3), Fraction(-20)),
    BoundaryCondition.DN: PiRational(Fraction(2, 3)),
    BoundaryCondition.ND: PiRational(Fraction(2, 3), Fraction(-80, 7)),
    BoundaryCondition.EM: PiRational(Fraction(2, 3), Fraction(-10)),
}

#: the plate law exponent used by every built-in kind
PLATE_EXPONENT = 3


def alpha_coefficient(bc):
    """Exact prefactor ``alpha`` of the plate law as a :class:`~fractions.Fraction`."""
    return _ALPHA[BoundaryCondition.parse(bc)]


def beta_coefficient(bc, exact=False):
    """Gradient coefficient ``beta`` of a curved surface facing a flat one.

    Parameters
    ----------
    bc : BoundaryCondition or str
    exact : bool
        return the :class:`PiRational` instead of a float

    Returns
    -------
    float or PiRational
    """
    value = _BETA[BoundaryCondition.parse(bc)]
    return value if exact else float(value)


def theta1_exact(bc):
    """First PFA correction of the sphere-plate energy, ``2 beta - 1``, exactly."""
    return 2 * beta_coefficient(bc, exact=True) - 1


@dataclass(frozen=True)
class PlateLaw:
    """Parallel-plate interaction energy per area ``U(H) = -alpha pi^2 / (1440 H^p)``."""

    alpha: Fraction
    exponent: int = PLATE_EXPONENT

    def energy_per_area(self, H):
        """``U(H)``; raises :class:`DomainError` for ``H <= 0``."""
        import numpy as np

        H = np.asarray(H, dtype=float)
        if np.any(~(H > 0)):
            raise DomainError("plate separation must be positive")
        out = -float(self.alpha) * pi ** 2 / (1440.0 * H ** self.exponent)
        return float(out) if out.ndim == 0 else out

    __call__ = energy_per_area

    def derivative(self, H, order=1):
        """Analytic ``d^order U / dH^order``."""
        p = self.exponent
        coef = -float(self.alpha) * pi ** 2 / 1440.0
        for k in range(order):
            coef *= -(p + k)
        return coef / H ** (p + order)


def plate_law(bc):
    return PlateLaw(alpha_coefficient(bc))


def plate_energy_density(bc, H):
    """Parallel-plate energy per area for boundary condition ``bc`` at separation ``H``.

    Examples
    --------
    >>> round(plate_energy_density("D", 1.0), 10)
    -0.0068538919
    """
    return plate_law(bc).energy_per_area(H)


@dataclass(frozen=True)
class CoefficientSet:
    """Gradient-expansion coefficients of one surface pair.

    ``beta1`` multiplies ``|grad H1|^2``, ``beta2`` multiplies ``|grad H2|^2``
    and ``beta_cross`` multiplies ``grad H1 . grad H2``. The exact values are
    kept alongside; the float attributes are derived from them.
    """

    alpha: Fraction
    beta1_exact: PiRational
    beta2_exact: PiRational
    beta_cross_exact: PiRational
    pair: tuple = ("", "")
    exponent: int = PLATE_EXPONENT

    @property
    def beta1(self):
        return float(self.beta1_exact)

    @property
    def beta2(self):
        return float(self.beta2_exact)

    @property
    def beta_cross(self):
        return float(self.beta_cross_exact)

    @property
    def beta_minus(self):
        return 0.0

    @property
    def law(self):
        return PlateLaw(self.alpha, self.exponent)

    def as_dict(self):
        return {
            "pair": list(self.pair),
            "alpha": str(self.alpha),
            "beta1": float(self.beta1_exact),
            "beta2": float(self.beta2_exact),
            "beta_cross": float(self.beta_cross_exact),
            "beta_minus": 0.0,
            "exact": {
                "beta1": self.beta1_exact.as_dict(),
                "beta2": self.beta2_exact.as_dict(),
                "beta_cross": self.beta_cross_exact.as_dict(),
            },
        }


#: supported (surface 1, surface 2) pairs -> boundary condition seen from each side
SUPPORTED_PAIRS = {
    ("D", "D"): ("D", "D"),
    ("N", "N"): ("N", "N"),
    ("EM", "EM"): ("EM", "EM"),
    ("D", "N"): ("DN", "ND"),
    ("N", "D"): ("ND", "DN"),
}


def tilt_residual(beta1, beta2, beta_cross, exponent=PLATE_EXPONENT):
    """Residual of the tilt constraint ``2 (beta1 + beta2) + 2 beta_cross - p - 1``."""
    return 2 * (beta1 + beta2) + 2 * beta_cross - exponent - 1


def coefficient_set(bc1, bc2=None):
    """Coefficient set of two surfaces carrying boundary conditions ``bc1`` and ``bc2``.

    ``beta1`` belongs to surface 1 and is the coefficient that surface has
    when it is curved and faces a flat surface 2, so the D/N pair gets
    ``beta1 = beta_DN`` and ``beta2 = beta_ND``. ``beta_cross`` follows
    from tilt invariance.

    Parameters
    ----------
    bc1, bc2 : str
        ``"D"``, ``"N"`` or ``"EM"``; a single mixed kind ``"DN"``/``"ND"``
        or an identical kind may be passed as ``bc1`` alone

    Returns
    -------
    CoefficientSet
    """
    if bc2 is None:
        key = str(bc1).strip().upper()
        pairs = {"D": ("D", "D"), "N": ("N", "N"), "EM": ("EM", "EM"),
                 "DN": ("D", "N"), "ND": ("N", "D")}
        if key not in pairs:
            raise UnsupportedConfigurationError(f"unsupported boundary condition {bc1!r}")
        bc1, bc2 = pairs[key]
    pair = (str(bc1).strip().upper(), str(bc2).strip().upper())
    if pair not in SUPPORTED_PAIRS:
        raise UnsupportedConfigurationError(
            f"unsupported boundary-condition pair {pair}; supported: "
            f"{sorted(SUPPORTED_PAIRS)}")
    k1, k2 = SUPPORTED_PAIRS[pair]
    b1 = _BETA[BoundaryCondition(k1)]
    b2 = _BETA[BoundaryCondition(k2)]
    # the plate law of a pair is set by the pair's combined kind
    alpha = _ALPHA[BoundaryCondition(k1)]
    p = PLATE_EXPONENT
    # 2 (b1 + b2) + 2 bx = p + 1
    bx = Fraction(p + 1, 2) - b1 - b2
    return CoefficientSet(alpha, b1, b2, bx, pair)
