"""Counter-based 64-bit pseudo-random generator.

The stream is the SplitMix64 finalizer applied to ``seed + (i+1)*PHI64``
where ``i`` is the draw counter.  Being a pure function of ``(seed, i)`` it
is trivially reproducible across platforms and backends, and draws can be
indexed without generating predecessors.

Integers in ``[0, m)`` are produced by modular reduction of the 64-bit
output.  For ``m < 2**11`` (any desk-scale vertex or list count) the bias
of any outcome is below ``m / 2**64 < 2**-53``.
"""

MASK64 = (1 << 64) - 1
PHI64 = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    x &= MASK64
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & MASK64
    return (x ^ (x >> 31)) & MASK64


def draw(seed: int, counter: int) -> int:
    """The ``counter``-th 64-bit output of the stream with the given seed."""
    return splitmix64(seed + (counter + 1) * PHI64)


def draw_below(seed: int, counter: int, m: int) -> int:
    """Uniform integer in [0, m) with bias < m/2**64."""
    return draw(seed, counter) % m
