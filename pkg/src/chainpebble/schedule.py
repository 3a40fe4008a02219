"""Hash budgets per round for binary pebbling, and their exact analysis.

A pebbler of order k reverses a length-2^k chain over 2^(k+1)-1 rounds; a
schedule fixes how many hashes it spends in each of its 2^k-1 set-up rounds,
always summing to 2^k-1.  Four families are implemented:

- ``rushing``:  do nothing until the last set-up round, then hash flat out;
- ``speed1``:   one hash per set-up round;
- ``speed2``:   idle for the first half, then two hashes per round;
- ``optimal``:  idle for the first half, then the closed-form budgets that
  attain the ceil(k/2) worst-case work bound.

The optimal family also has a recursive construction over half-integers.
Half-integer sequences are stored as doubled integers so all arithmetic stays
exact: a stored 3 means 3/2.  All functions here are pure.
"""

import math

FAMILIES = ("rushing", "speed1", "speed2", "optimal")


def bitlen(n: int) -> int:
    """Bit length of a nonnegative integer; bitlen(0) == 0."""
    if n < 0:
        raise ValueError("bitlen needs n >= 0")
    return n.bit_length()


def make_schedule(family: str, k: int) -> list[int]:
    """Per-round budgets t_1..t_{2^k-1} for the set-up stage of order k."""
    if k < 0:
        raise ValueError("order k must be >= 0")
    n = 1 << k
    if family == "rushing":
        return [0] * (n - 2) + [n - 1] if k > 0 else []
    if family == "speed1":
        return [1] * (n - 1)
    if family == "speed2":
        return [0] * (n // 2 - 1) + [2] * (n // 2 - 1) + [1] if k > 0 else []
    if family == "optimal":
        if k == 0:
            return []
        if k == 1:
            return [1]
        head = [0] * (n // 2 - 1)
        tail = [
            ((k + r) % 2 + k + 1 - bitlen((2 * r) % (1 << bitlen(n - r)))) // 2
            for r in range(n // 2, n)
        ]
        return head + tail
    raise ValueError(f"unknown schedule family {family!r}")


def unrounded_head(k: int) -> list[int]:
    """First half of the active optimal budgets, doubled (k >= 2).

    The head of order k is the head of order k-1 raised by one half,
    extended with a run of ones.
    """
    if k < 2:
        raise ValueError("unrounded schedules start at k = 2")
    if k == 2:
        return [3]
    return [u + 1 for u in unrounded_head(k - 1)] + [2] * (1 << (k - 3))


def unrounded_tail(k: int) -> list[int]:
    """Second half of the active optimal budgets, doubled (k >= 2).

    The tail of order k is the raised head of order k-1 followed by the
    raised tail of order k-1: the construction is self-similar.
    """
    if k < 2:
        raise ValueError("unrounded schedules start at k = 2")
    if k == 2:
        return [3]
    return [u + 1 for u in unrounded_head(k - 1)] + [v + 1 for v in unrounded_tail(k - 1)]


def unrounded_optimal(k: int) -> list[int]:
    """Exact optimal schedule over half-integers, doubled (k >= 2).

    Computed twice -- by the recursive head/tail construction and by the
    explicit formula -- which must agree; a mismatch is an implementation bug.
    """
    if k < 2:
        raise ValueError("unrounded schedules start at k = 2")
    n = 1 << k
    recursive = [0] * (n // 2 - 1) + unrounded_head(k) + unrounded_tail(k)
    explicit = [0] * (n // 2 - 1) + [
        k + 1 - bitlen((2 * r) % (1 << bitlen(n - r))) for r in range(n // 2, n)
    ]
    assert recursive == explicit, "recursive and explicit constructions disagree"
    return recursive


def parity_round(halves: list[int], k: int) -> list[int]:
    """Round a doubled half-integer schedule to integers.

    Entry r gains a half exactly when k+r is odd, then is floored; integral
    entries pass through unchanged.
    """
    return [((k + r) % 2 + d) // 2 for r, d in enumerate(halves, 1)]


def work_sequence(family: str, k: int) -> list[int]:
    """Hashes per round over the last 2^k-1 rounds of an order-k pebbler.

    Built from the recurrence: the child started last runs its set-up budgets
    on top of the previous work sequence, then a free round, then the
    previous work sequence again.
    """
    w: list[int] = []
    for order in range(1, k + 1):
        t = make_schedule(family, order - 1)
        w = [a + b for a, b in zip(t, w)] + [0] + w
    return w


def _half_schedule(k: int) -> list[int]:
    if k <= 1:
        return [2] * k  # orders 0 and 1 are already integral
    return unrounded_optimal(k)


def work_sequence_half(k: int) -> list[int]:
    """Unrounded optimal work sequence, doubled; same recurrence, exact."""
    w: list[int] = []
    for order in range(1, k + 1):
        t = _half_schedule(order - 1)
        w = [a + b for a, b in zip(t, w)] + [0] + w
    return w


def key_equation_holds(k: int) -> bool:
    """Exact no-gaps check for the optimal schedule (k >= 2).

    The active unrounded budgets, shifted by the previous order's unrounded
    work, must be the constant (k+1)/2: every output round spends the
    worst-case minimum exactly.
    """
    if k < 2:
        raise ValueError("key equation is defined for k >= 2")
    active = unrounded_head(k) + unrounded_tail(k)
    shifted = [0] + work_sequence_half(k - 1)
    return all(a + b == k + 1 for a, b in zip(active, shifted, strict=True))


def image_deficit(n: int) -> float:
    """Expected fraction of the value space missing from the n-th iterate image.

    For a random length-preserving function the image shrinks with each
    iteration; the deficit obeys d_0 = 0, d_n = exp(-1 + d_{n-1}).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    d = 0.0
    for _ in range(n):
        d = math.exp(-1.0 + d)
    return d


def format_halves(halves: list[int]) -> str:
    """Render a doubled sequence, printing odd entries as 'n/2'."""
    return ",".join(str(d // 2) if d % 2 == 0 else f"{d}/2" for d in halves)
