"""Fourier conventions used everywhere in the package.

Forward transform (``plus-i, unnormalized``)::

    F(z) = integral f(x) exp(+i x z) dx

Inverse transform::

    f(x) = 1/(2 pi) integral F(z) exp(-i x z) dz

Consequences that tests rely on:

* Parseval: ``integral |f|^2 dx = 1/(2 pi) integral |F|^2 dz``.
* Translation ``(tau_s f)(x) = f(x - s)`` has transform ``exp(i s z) F(z)``.
* Hilbert transform multiplier is ``-i sign(z)``; the zero bin is mapped to 0.
* Gaussian ``exp(-x^2/2)`` maps to ``sqrt(2 pi) exp(-z^2/2)``.
* Multiplication by ``x`` maps to ``-i d/dz``, so
  ``||x f||_2 = ||F'||_2 / sqrt(2 pi)``.

Annihilator pairing.  For ``K = g_hat / f_hat`` the annihilator is built with
the *unitary* inverse and a ``+i`` kernel,
``k(x) = 1/sqrt(2 pi) integral K(z) exp(+i x z) dz``.  Then

    <k, tau_lam f> = integral k(x) f(x - lam) dx = sqrt(2 pi) g(-lam).

For odd or even ``g`` (the explicit integer-vanishing function is odd) the
magnitude equals ``sqrt(2 pi) |g(lam)|``.  With the plain (1/2 pi) inverse the
constant would be 1 instead.
"""

import math

CONVENTION_TAG = "plus-i, unnormalized forward"

#: sign of the exponent in the forward transform
FORWARD_SIGN = +1

#: factor in front of the inverse integral
INVERSE_NORMALIZATION = 1.0 / (2.0 * math.pi)

#: constant C in ``<k, tau_lam f> = C g(-lam)`` for annihilators from
#: :func:`translate_lab.duality.build_annihilator`
PAIRING_CONSTANT = math.sqrt(2.0 * math.pi)

#: ratio ||x f||_2 / ||F'||_2 (Plancherel under the forward convention)
PLANCHEREL_DERIVATIVE_FACTOR = 1.0 / math.sqrt(2.0 * math.pi)
