"""Double-double ("compensated") arithmetic primitives.

A double-double value is an unevaluated sum ``hi + lo`` of two floats with
``|lo| <= ulp(hi)/2``, giving roughly 32 significant digits.  The ascending
power series for J0/Y0/K0 suffer catastrophic cancellation near the
series/asymptotic crossover (partial sums reach ~4.5e4 while the result is
O(1)), so the series are accumulated in this representation.

Every function here is branch-free straight-line arithmetic, which means the
same code runs elementwise on numpy arrays *and* compiles as a numba scalar
(via ``register_jitable``).  Requires strict IEEE semantics: do not enable
fastmath on any kernel that inlines these.

References: Dekker (1971), Knuth TAOCP vol. 2, and the QD library of
Hida/Li/Bailey.
"""

try:
    from numba.extending import register_jitable
except ImportError:  # pragma: no cover - numba is an optional accelerator
    def register_jitable(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap

# 2**27 + 1, Dekker's splitting constant for IEEE binary64.
_SPLITTER = 134217729.0


@register_jitable
def two_sum(a, b):
    """Exact sum: returns (s, err) with s = fl(a+b) and a+b = s+err."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


@register_jitable
def fast_two_sum(a, b):
    """Exact sum assuming |a| >= |b|."""
    s = a + b
    err = b - (s - a)
    return s, err


@register_jitable
def two_prod(a, b):
    """Exact product: returns (p, err) with p = fl(a*b) and a*b = p+err."""
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


@register_jitable
def dd_add(xh, xl, yh, yl):
    """Double-double + double-double (accurate to ~2 ulps of the result)."""
    s, e = two_sum(xh, yh)
    e = e + (xl + yl)
    return fast_two_sum(s, e)


@register_jitable
def dd_mul(xh, xl, yh, yl):
    """Double-double * double-double."""
    p, e = two_prod(xh, yh)
    e = e + (xh * yl + xl * yh)
    return fast_two_sum(p, e)


@register_jitable
def dd_mul_d(xh, xl, y):
    """Double-double * double."""
    p, e = two_prod(xh, y)
    e = e + xl * y
    return fast_two_sum(p, e)


@register_jitable
def dd_inv_d(d):
    """Reciprocal of an exactly-representable double, as a double-double.

    One Newton step on r = fl(1/d): the residual 1 - d*r is computed exactly
    with two_prod, so the pair is accurate to ~1 ulp**2.
    """
    r = 1.0 / d
    p, e = two_prod(r, d)
    corr = ((1.0 - p) - e) * r
    return fast_two_sum(r, corr)
