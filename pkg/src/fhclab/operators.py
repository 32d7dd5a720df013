"""Built-in operator models, their right inverses, and certificate transforms.

Three families:

* weighted backward shift (x_k) -> (w^k x_{k+1}) on l_p / c0, |w| > 1,
  with right inverse (x_k) -> (0, x_1/w, x_2/w^2, ...);
* differentiation f -> f' on the Hardy or C^k polynomial model, with
  the antiderivative vanishing at the base point as right inverse;
* the translation generator on C0(R+): one forward step maps f to
  e^lam f(.+1) clipped at 0, one inverse step to e^-lam f(.-1).

A certificate bundles an operator with its enumerated targets plus two
formal transforms: a unit-modulus scalar twist and a power r, acting as
(twist*A)^(r n) forward and (twist^-1 B)^(r n) backward.  ``swapped``
certificates exchange the two roles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .spaces import (
    C0_PLUS,
    CkModel,
    HalfLineC0,
    HardyModel,
    PiecewiseLinearFn,
    PolySeries,
    SequenceSpace,
    SparseVector,
    distance,
    enumerate_targets,
    plf_shift_left,
    plf_shift_right,
)


# --------------------------------------------------------------------------
# operator models


@dataclass(frozen=True)
class WeightedBackwardShift:
    w: object  # real/complex scalar with |w| > 1 (Fraction allowed)
    space: SequenceSpace = field(default_factory=lambda: SequenceSpace("lp", 2.0))

    def __post_init__(self):
        if abs(self.w) <= 1:
            raise ValueError(f"shift weight must satisfy |w| > 1, got {self.w}")


@dataclass(frozen=True)
class Differentiation:
    model: object = field(default_factory=HardyModel)

    def base_point(self):
        # integration starts at 0 on the Hardy model, at a on C^k[a,b]
        return 0 if isinstance(self.model, HardyModel) else self.model.a


@dataclass(frozen=True)
class TranslationGenerator:
    lam: object = 1  # growth rate lambda > 0; keep it an int/Fraction for exactness

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("translation generator requires lam > 0")


OperatorModel = (WeightedBackwardShift, Differentiation, TranslationGenerator)


def target_space(op):
    if isinstance(op, WeightedBackwardShift):
        return op.space
    if isinstance(op, Differentiation):
        return op.model
    if isinstance(op, TranslationGenerator):
        return C0_PLUS
    raise TypeError(f"unknown operator model {op!r}")


@dataclass(frozen=True)
class OperatorCertificate:
    """Operator + right inverse + enumerated dense targets (the criterion data)."""

    op: object
    target_count: int
    targets: tuple
    scalar_twist: object = 1
    power: int = 1
    swapped: bool = False

    def __post_init__(self):
        if self.power < 1:
            raise ValueError("power must be >= 1")
        if abs(abs(self.scalar_twist) - 1) > 1e-12:
            raise ValueError("scalar twist must have unit modulus")

    def target(self, l: int):
        """1-based target y_l."""
        return self.targets[l - 1]


def make_certificate(op, target_count: int, exact: bool = False,
                     scalar_twist=1, power: int = 1) -> OperatorCertificate:
    targets = tuple(enumerate_targets(target_space(op), target_count, exact=exact))
    return OperatorCertificate(op, target_count, targets, scalar_twist, power)


# --------------------------------------------------------------------------
# raw n-step actions (no twist/power bookkeeping)


def _shift_forward(op: WeightedBackwardShift, v: SparseVector, m: int) -> SparseVector:
    # entry at index i moves to i-m with weight w^((i-m) + ... + (i-1))
    out = {}
    for i, c in v.entries.items():
        if i > m:
            expo = m * i - m * (m + 1) // 2
            out[i - m] = c * op.w**expo
    return SparseVector(out, v.space)


def _shift_inverse(op: WeightedBackwardShift, v: SparseVector, m: int) -> SparseVector:
    # entry at index i moves to i+m with weight w^-(i + ... + (i+m-1));
    # a Fraction weight keeps this exact, int/float weights underflow gracefully
    out = {}
    for i, c in v.entries.items():
        expo = m * i + m * (m - 1) // 2
        if isinstance(op.w, Fraction):
            out[i + m] = c / op.w**expo
        else:
            out[i + m] = c * op.w ** (-expo)
    return SparseVector(out, v.space)


def _poly_forward(op: Differentiation, v: PolySeries, m: int) -> PolySeries:
    return PolySeries(v.derivative_coeffs(m), v.model)


def _poly_inverse(op: Differentiation, v: PolySeries, m: int) -> PolySeries:
    a = op.base_point()
    coeffs = list(v.coeffs)
    for _ in range(m):
        if not coeffs:
            break
        anti = [0]
        for j, c in enumerate(coeffs):
            if isinstance(c, Fraction) or (isinstance(c, int) and not isinstance(c, bool)):
                anti.append(Fraction(c, j + 1))
            else:
                anti.append(c / (j + 1))
        if a != 0:
            # enforce F(a) = 0
            val = 0
            for c in reversed(anti):
                val = val * a + c
            anti[0] = -val
        coeffs = anti
    return PolySeries(coeffs, v.model)


def _translation_forward(op: TranslationGenerator, f: PiecewiseLinearFn, m: int):
    return plf_shift_left(f, m, dlog=op.lam * m)


def _translation_inverse(op: TranslationGenerator, f: PiecewiseLinearFn, m: int):
    return plf_shift_right(f, m, dlog=-op.lam * m)


_FORWARD = {
    WeightedBackwardShift: _shift_forward,
    Differentiation: _poly_forward,
    TranslationGenerator: _translation_forward,
}
_INVERSE = {
    WeightedBackwardShift: _shift_inverse,
    Differentiation: _poly_inverse,
    TranslationGenerator: _translation_inverse,
}


def _twist_scale(v, factor):
    if factor == 1:
        return v
    return v.scaled(factor)


# --------------------------------------------------------------------------
# certificate-level actions


def apply_forward(cert: OperatorCertificate, v, n: int):
    """(twist*A)^(r*n) v, exactly, on the finite representation."""
    if n < 0:
        raise ValueError("iteration count must be >= 0")
    if n == 0:
        return v
    m = cert.power * n
    raw = _INVERSE if cert.swapped else _FORWARD
    out = raw[type(cert.op)](cert.op, v, m)
    tw = cert.scalar_twist
    if tw == 1:
        return out
    return _twist_scale(out, tw**-m if cert.swapped else tw**m)


def apply_inverse(cert: OperatorCertificate, v, n: int):
    """(twist^-1 * B)^(r*n) v."""
    if n < 0:
        raise ValueError("iteration count must be >= 0")
    if n == 0:
        return v
    m = cert.power * n
    raw = _FORWARD if cert.swapped else _INVERSE
    out = raw[type(cert.op)](cert.op, v, m)
    tw = cert.scalar_twist
    if tw == 1:
        return out
    return _twist_scale(out, tw**m if cert.swapped else tw**-m)


def right_inverse_identity_check(cert: OperatorCertificate, v) -> float:
    """Residual norm of A(B v) - v under the certificate's current roles."""
    return distance(apply_forward(cert, apply_inverse(cert, v, 1), 1), v)


def forward_extinction_index(cert: OperatorCertificate, v) -> int:
    """Smallest E with apply_forward(cert, v, n) = 0 for all n >= E.

    Only defined for unswapped certificates (the inverse never dies).
    """
    if cert.swapped:
        raise ValueError("swapped certificates have no forward extinction")
    r = cert.power
    op = cert.op
    if isinstance(op, WeightedBackwardShift):
        top = v.max_index()
    elif isinstance(op, Differentiation):
        top = v.degree + 1
    elif isinstance(op, TranslationGenerator):
        top = v.breakpoints[-1] if not v.is_zero() else 0
    else:
        raise TypeError(f"unknown operator model {op!r}")
    return max(0, math.ceil(top / r))


# --------------------------------------------------------------------------
# certificate transforms (the corollaries)


def transform_power(cert: OperatorCertificate, r: int) -> OperatorCertificate:
    """Certificate for the r-th power: forward (A^r)^n, inverse (B^r)^n."""
    if r < 1:
        raise ValueError("power must be >= 1")
    return replace(cert, power=cert.power * r)


def transform_rotation(cert: OperatorCertificate, lam) -> OperatorCertificate:
    """Certificate for the rotated operator lam*A, |lam| = 1."""
    if abs(abs(lam) - 1) > 1e-12:
        raise ValueError(f"rotation scalar must have |lam| = 1, got {lam}")
    return replace(cert, scalar_twist=cert.scalar_twist * lam)


def transform_inverse(cert: OperatorCertificate) -> OperatorCertificate:
    """Formally swap the forward and inverse roles (an involution)."""
    return replace(cert, swapped=not cert.swapped)
