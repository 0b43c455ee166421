"""Independent reference implementations used to freeze expected test values.

These deliberately take different arithmetic routes than the production code
(exact fractions, scalar integer loops) so that agreement between the two is
evidence of correctness rather than of shared bugs.
"""

from fractions import Fraction

_MASK64 = (1 << 64) - 1


def exact_trajectory(
    injections: list[tuple],
    decay: Fraction,
    beta: Fraction,
) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
    """Fold the accumulator recurrence in exact rational arithmetic.

    ``injections`` holds per-turn 4-tuples of (keyword + emoji) weight sums.
    """
    state = (Fraction(0),) * 4
    out = []
    for inj in injections:
        state = tuple(s * decay + Fraction(i) * beta for s, i in zip(state, inj))
        out.append(state)
    return out


def splitmix64_reference(x: int) -> int:
    """Scalar splitmix64 finalizer, transcribed from the published algorithm."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def horizontal_row_pixels(y: int, x0: int, x1: int, width: int) -> set[tuple[int, int]]:
    """Naive oracle for a 1px horizontal line: every pixel in the row span."""
    lo, hi = min(x0, x1), max(x0, x1)
    return {(x, y) for x in range(max(0, lo), min(width - 1, hi) + 1)}


def geometric_bound(m: float, beta_max: float, decay: float) -> float:
    """Supremum of any component under per-turn injections bounded by m."""
    return m * beta_max / (1.0 - decay)
