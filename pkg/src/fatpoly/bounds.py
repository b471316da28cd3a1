"""VC-dimension and sample-size calculators for fat hyperplanes and polytopes.

Conventions (surfaced by :func:`conventions` so callers can report them):

* the intersection lemma ``2 v t log(3t)`` uses log base 2;
* the consistent-learner generalization bound uses natural logs;
* every big-O constant is 1.
"""
import math

LOG_BASE_VC = 2
LOG_BASE_GENERALIZATION = "e"
BIG_O_CONSTANT = 1.0


def conventions():
    return {
        "log_base_vc_combination": LOG_BASE_VC,
        "log_base_generalization": LOG_BASE_GENERALIZATION,
        "big_o_constant": BIG_O_CONSTANT,
    }


def _check_positive_int(name, v):
    if int(v) != v or v < 1:
        raise ValueError(f"{name} must be a positive integer, got {v}")


def vc_fat_hyperplane(gamma):
    """VC bound ``(2/gamma + 1)^2`` for gamma-fat affine hyperplanes."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return (2.0 / gamma + 1.0) ** 2


def _intersection_bound(v, d, t):
    _check_positive_int("d", d)
    _check_positive_int("t", t)
    lg = math.log2(3 * t)
    return min(2.0 * (d + 1) * t * lg, 2.0 * v * t * lg)


def vc_fat_polytope(d, t, gamma):
    """``min(2(d+1) t log2(3t), 2 v t log2(3t))`` with ``v = (2/gamma + 1)^2``."""
    return _intersection_bound(vc_fat_hyperplane(gamma), d, t)


def vc_envelope_polytope(d, t, gamma):
    """VC bound for t-polytopes with gamma-envelope; same as the fat bound at ``gamma^2/2``."""
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    return vc_fat_polytope(d, t, gamma**2 / 2.0)


def generalization_error(m, d_vc, delta):
    """``(2/m) (d_vc ln(2em/d_vc) + ln(2/delta))`` for a consistent hypothesis."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if d_vc < 1:
        raise ValueError("d_vc must be >= 1")
    if m <= d_vc:
        raise ValueError(f"bound is vacuous for m={m} <= d_vc={d_vc}")
    return (2.0 / m) * (d_vc * math.log(2.0 * math.e * m / d_vc) + math.log(2.0 / delta))


def pac_sample_size(t, gamma, eps, delta):
    """``ceil(t/(eps gamma^2) ln^2(max(t/(eps gamma), e)) + ln(1/delta))``."""
    _check_positive_int("t", t)
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    for name, v in (("eps", eps), ("delta", delta)):
        if not 0 < v < 1:
            raise ValueError(f"{name} must lie in (0, 1), got {v}")
    ratio = max(t / (eps * gamma), math.e)
    m = BIG_O_CONSTANT * (t / (eps * gamma**2) * math.log(ratio) ** 2 + math.log(1.0 / delta))
    return math.ceil(m)
