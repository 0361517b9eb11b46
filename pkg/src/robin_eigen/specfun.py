r"""Modified Bessel functions of integer and half-integer order.

Only orders :math:`\nu \in \tfrac12\mathbb{Z}_{\ge 0}` are supported, which is
all a radial problem in integer dimension ever needs (:math:`\nu = (d-2)/2`
plus the neighbouring orders :math:`\nu \pm 1` from the derivative identity).

The exponentially scaled variants follow the factorisation

.. math::
    I_\mu(z) = \frac{e^{z}}{\sqrt{2\pi z}}\,\tilde I_\mu(z), \qquad
    K_\mu(z) = \sqrt{\frac{\pi}{2z}}\,e^{-z}\,\tilde K_\mu(z),

so that :math:`\tilde I_\mu, \tilde K_\mu \to 1` as :math:`z \to \infty`.
Solvers only ever touch the scaled values.

Evaluation paths
----------------
* :math:`I_\nu`, :math:`z \le 30`: ascending power series (all terms positive).
* :math:`I_n`, :math:`z > 30`, integer order: Hankel asymptotic series. The
  smallest term is :math:`O(e^{-2z})`, far below double precision.
* :math:`I_{n+1/2}`, :math:`z > 30`: exact elementary form.
* :math:`K_0, K_1`: logarithmic series for :math:`z \le 2`, Steed's
  continued fraction (Temme's CF2) above; higher orders by forward
  recurrence, which is stable for :math:`K`.
* :math:`K_{n+1/2}`: exact elementary form (a finite sum in :math:`1/z`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConvergenceFailure, DomainError

__all__ = [
    "ScaledBesselValue",
    "bessel_i",
    "bessel_k",
    "bessel_i_prime",
    "bessel_k_prime",
    "bessel_scaled",
    "tilde_series",
    "scaled_neighbourhood",
    "two_nu_of",
    "SERIES_CROSSOVER",
]

SERIES_CROSSOVER = 30.0
_K_SERIES_MAX = 2.0
_EPS = 1e-17
_MAXIT = 10_000
_EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class ScaledBesselValue:
    """Scaled pair :math:`(\\tilde I_\\nu(z), \\tilde K_\\nu(z))`."""

    tilde_i: float
    tilde_k: float
    z: float


def two_nu_of(nu) -> int:
    """Return ``2*nu`` as an int, rejecting anything but non-negative half-integers."""
    try:
        twice = Fraction(nu) * 2 if not isinstance(nu, float) else Fraction(2 * nu)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"unsupported Bessel order {nu!r}") from exc
    if twice.denominator != 1 or twice < 0:
        raise DomainError(f"Bessel order must be a non-negative multiple of 1/2, got {nu!r}")
    return int(twice)


def _check_arg(z: float, allow_zero: bool = False) -> float:
    z = float(z)
    if math.isnan(z) or z < 0 or (z == 0 and not allow_zero):
        raise DomainError(f"Bessel argument must be {'>= 0' if allow_zero else '> 0'}, got {z}")
    return z


# --------------------------------------------------------------------------
# first kind
# --------------------------------------------------------------------------

def _i_power_series(two_nu: int, z: float) -> float:
    """Unscaled I_{two_nu/2}(z) by the ascending series; two_nu >= -1."""
    nu = 0.5 * two_nu
    q = 0.25 * z * z
    if two_nu == 0:
        term = 1.0
    else:
        term = math.exp(nu * math.log(0.5 * z) - math.lgamma(nu + 1.0))
    total = term
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + nu))
        total += term
        if term < _EPS * total:
            return total
        if m > _MAXIT:
            raise ConvergenceFailure(f"I series did not converge (nu={nu}, z={z})")


def _i_hankel_scaled(n: int, z: float) -> float:
    """Scaled I_n(z), integer n, by the large-argument series (z > 30)."""
    four_mu2 = 4.0 * n * n
    term = 1.0
    total = 1.0
    j = 0
    while True:
        j += 1
        new = term * ((2 * j - 1) ** 2 - four_mu2) / (8.0 * j * z)
        if abs(new) > abs(term) and j > n + 1:
            # past the smallest term of a divergent series
            return total
        term = new
        total += term
        if abs(term) < _EPS * abs(total):
            return total
        if j > _MAXIT:
            raise ConvergenceFailure(f"I asymptotic series did not converge (n={n}, z={z})")


def _half_integer_coeffs(n: int):
    """a_k(n) = (n+k)! / (k! (n-k)!), k = 0..n."""
    return [math.factorial(n + k) // (math.factorial(k) * math.factorial(n - k)) for k in range(n + 1)]


def _i_half_scaled_closed(two_nu: int, z: float) -> float:
    if two_nu == -1:
        return 1.0 + math.exp(-2.0 * z)
    n = (two_nu - 1) // 2
    inv = 1.0 / (2.0 * z)
    lead = 0.0
    tail = 0.0
    p = 1.0
    for k, a in enumerate(_half_integer_coeffs(n)):
        lead += (-1) ** k * a * p
        tail += a * p
        p *= inv
    sign = -1.0 if n % 2 == 0 else 1.0
    return lead + sign * math.exp(-2.0 * z) * tail


def _tilde_i(two_nu: int, z: float) -> float:
    """Scaled first-kind value for two_nu >= -1 (I_{-1/2} is the cosh form)."""
    if two_nu % 2 == 0:
        two_nu = abs(two_nu)
        if z <= SERIES_CROSSOVER:
            return _i_power_series(two_nu, z) * math.sqrt(2.0 * math.pi * z) * math.exp(-z)
        return _i_hankel_scaled(two_nu // 2, z)
    if z <= SERIES_CROSSOVER:
        return _i_power_series(two_nu, z) * math.sqrt(2.0 * math.pi * z) * math.exp(-z)
    return _i_half_scaled_closed(two_nu, z)


# --------------------------------------------------------------------------
# second kind
# --------------------------------------------------------------------------

def _k01_series(z: float):
    """Unscaled (K_0(z), K_1(z)) for 0 < z <= 2."""
    q = 0.25 * z * z
    log_half = math.log(0.5 * z)
    i0 = _i_power_series(0, z)
    i1 = _i_power_series(2, z)

    # K_0: sum_{k>=1} H_k q^k / (k!)^2
    term = 1.0
    harmonic = 0.0
    s0 = 0.0
    # K_1: sum_{k>=0} (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
    psi_k1 = -_EULER_GAMMA
    psi_k2 = 1.0 - _EULER_GAMMA
    t1 = 1.0
    s1 = psi_k1 + psi_k2
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        harmonic += 1.0 / k
        s0 += harmonic * term
        t1 *= q / (k * (k + 1))
        psi_k1 += 1.0 / k
        psi_k2 += 1.0 / (k + 1)
        inc1 = (psi_k1 + psi_k2) * t1
        s1 += inc1
        if harmonic * term < _EPS * abs(s0) and abs(inc1) < _EPS * abs(s1):
            break
        if k > _MAXIT:
            raise ConvergenceFailure(f"K series did not converge (z={z})")
    k0 = -(log_half + _EULER_GAMMA) * i0 + s0
    k1 = 1.0 / z + log_half * i1 - 0.25 * z * s1
    return k0, k1


def _k01_scaled_cf2(z: float):
    """Scaled (K~_0(z), K~_1(z)) by Steed's evaluation of Temme's CF2, z > 2."""
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:
        raise ConvergenceFailure(f"K continued fraction did not converge (z={z})")
    h *= a1
    k0 = 1.0 / s
    k1 = k0 * (z + 0.5 - h) / z
    return k0, k1


def _tilde_k01(z: float):
    if z <= _K_SERIES_MAX:
        k0, k1 = _k01_series(z)
        scale = math.sqrt(2.0 * z / math.pi) * math.exp(z)
        return k0 * scale, k1 * scale
    return _k01_scaled_cf2(z)


def _tilde_k_half_closed(two_nu: int, z: float) -> float:
    n = (abs(two_nu) - 1) // 2
    inv = 1.0 / (2.0 * z)
    total = 0.0
    p = 1.0
    for a in _half_integer_coeffs(n):
        total += a * p
        p *= inv
    return total


def _tilde_k(two_nu: int, z: float) -> float:
    two_nu = abs(two_nu)
    if two_nu % 2 == 1:
        return _tilde_k_half_closed(two_nu, z)
    n = two_nu // 2
    k_prev, k_cur = _tilde_k01(z)
    if n == 0:
        return k_prev
    for m in range(1, n):
        k_prev, k_cur = k_cur, k_prev + (2.0 * m / z) * k_cur
    return k_cur


# --------------------------------------------------------------------------
# public surface
# --------------------------------------------------------------------------

def bessel_scaled(nu, z: float) -> ScaledBesselValue:
    """Scaled pair without overflow or underflow, usable up to ``z ~ 1e6`` and beyond.

    Raises
    ------
    DomainError
        For ``z <= 0`` or an unsupported order.
    """
    two_nu = two_nu_of(nu)
    z = _check_arg(z)
    return ScaledBesselValue(_tilde_i(two_nu, z), _tilde_k(two_nu, z), z)


def _unscaled_i(two_nu: int, z: float) -> float:
    if z <= SERIES_CROSSOVER:
        return _i_power_series(abs(two_nu) if two_nu % 2 == 0 else two_nu, z)
    return _tilde_i(two_nu, z) * math.exp(z - 0.5 * math.log(2.0 * math.pi * z))


def _unscaled_k(two_nu: int, z: float) -> float:
    return _tilde_k(two_nu, z) * math.exp(-z + 0.5 * math.log(math.pi / (2.0 * z)))


def bessel_i(nu, z: float) -> float:
    """Modified Bessel function of the first kind, :math:`I_\\nu(z)`.

    ``z = 0`` is allowed and gives 1 for order 0, 0 otherwise. Arguments
    beyond ~709 overflow a double; use :func:`bessel_scaled` there.
    """
    two_nu = two_nu_of(nu)
    z = _check_arg(z, allow_zero=True)
    if z == 0.0:
        return 1.0 if two_nu == 0 else 0.0
    return _unscaled_i(two_nu, z)


def bessel_k(nu, z: float) -> float:
    """Modified Bessel function of the second kind, :math:`K_\\nu(z)`, for ``z > 0``."""
    two_nu = two_nu_of(nu)
    z = _check_arg(z)
    return _unscaled_k(two_nu, z)


def bessel_i_prime(nu, z: float) -> float:
    """:math:`I_\\nu'(z) = \\tfrac12 (I_{\\nu-1}(z) + I_{\\nu+1}(z))`.

    For half-integer orders :math:`I_{-1/2}` is *not* :math:`I_{1/2}`; the
    cosh form is used.
    """
    two_nu = two_nu_of(nu)
    z = _check_arg(z)
    return 0.5 * (_unscaled_i(two_nu - 2, z) + _unscaled_i(two_nu + 2, z))


def bessel_k_prime(nu, z: float) -> float:
    """:math:`K_\\nu'(z) = -\\tfrac12 (K_{\\nu-1}(z) + K_{\\nu+1}(z))`, with :math:`K_{-\\mu} = K_\\mu`."""
    two_nu = two_nu_of(nu)
    z = _check_arg(z)
    return -0.5 * (_unscaled_k(two_nu - 2, z) + _unscaled_k(two_nu + 2, z))


def scaled_neighbourhood(two_nu: int, z: float):
    """Scaled values at orders nu-1, nu, nu+1, for secular-function assembly.

    Returns ``((I~_{nu-1}, I~_nu, I~_{nu+1}), (K~_{nu-1}, K~_nu, K~_{nu+1}))``.
    ``I~_{nu-1}`` comes from the downward recurrence, which is stable for ``I``.
    """
    nu = 0.5 * two_nu
    ti = _tilde_i(two_nu, z)
    ti_up = _tilde_i(two_nu + 2, z)
    ti_down = ti_up + (2.0 * nu / z) * ti

    if two_nu % 2 == 1:
        tk = _tilde_k_half_closed(two_nu, z)
        tk_up = _tilde_k_half_closed(two_nu + 2, z)
        tk_down = _tilde_k_half_closed(abs(two_nu - 2), z)
    else:
        n = two_nu // 2
        k0, k1 = _tilde_k01(z)
        ks = [k0, k1]
        for m in range(1, n + 1):
            ks.append(ks[m - 1] + (2.0 * m / z) * ks[m])
        tk, tk_up = ks[n], ks[n + 1]
        tk_down = ks[abs(n - 1)]
    return (ti_down, ti, ti_up), (tk_down, tk, tk_up)


def tilde_series(nu, z: float, terms: int = 3):
    """Truncated large-argument series for the scaled pair.

    ``terms`` counts retained terms of
    ``1 -+ (4mu^2-1)/(8z) + (4mu^2-1)(4mu^2-9)/(2(8z)^2)``.
    """
    if terms not in (1, 2, 3):
        raise DomainError(f"terms must be 1, 2 or 3, got {terms}")
    two_nu = two_nu_of(nu)
    z = _check_arg(z)
    c = float(two_nu * two_nu - 1)  # 4 mu^2 - 1
    first = c / (8.0 * z)
    second = c * (two_nu * two_nu - 9) / (2.0 * (8.0 * z) ** 2)
    ti = tk = 1.0
    if terms >= 2:
        ti -= first
        tk += first
    if terms >= 3:
        ti += second
        tk += second
    return ti, tk
