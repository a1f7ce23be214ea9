from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from bdiv.convex_core.polytope import convex_hull

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(lo=-2, hi=2, den=12):
    return st.builds(Fraction, st.integers(lo * den, hi * den), st.just(den))


@st.composite
def polytopes(draw, d=2, min_points=None, max_points=9):
    """Full-dimensional hulls of random rational points."""
    n = draw(st.integers(min_points or d + 1, max_points))
    pts = draw(st.lists(st.tuples(*[rationals()] * d), min_size=n, max_size=n))
    P = convex_hull(pts)
    from hypothesis import assume

    assume(P.fulldim)
    return P


@st.composite
def dims_and_polytopes(draw):
    d = draw(st.sampled_from([2, 3]))
    return draw(polytopes(d, max_points=8 if d == 2 else 7))
