"""In-place pebblers: between rounds the whole state is a counter plus slots.

During the reversal stage, everything about the sub-pebblers running in
parallel can be read off the binary representation of the countdown
c = 2^(k+1) - r: each set bit i is a live sub-pebbler of order i, its
progress is c mod 2^(i+1), and its values sit in the slot block that ends at
index i.  The slot written next by a working pebbler is always the one just
vacated by the pebblers to its right, which is what makes a fixed array
suffice.

Two variants are provided.  The speed-2 stepper keeps k slots and hard-codes
its two-hashes-per-pebbler budget in the stepping loop.  The optimal stepper
keeps k+1 slots and draws each sub-pebbler's budget from the bit-segment
rule: split the countdown's bits into segments, one per working sub-pebbler
(ignoring the rightmost, which is emitting), each segment running from the
pebbler's own bit down to just above the next working pebbler's bit; the
budget is half the segment length, made integral by parity rounding.

A state serializes as (variant, k, r, slots) and nothing else; restoring
reproduces the remaining output and hash-count streams exactly.
"""

from dataclasses import dataclass

from .owf import Owf, evaluate
from .pebbler import ExhaustedError
from .schedule import make_schedule

IDLE = "idle"
HASHING = "hashing"
FIRST_OUTPUT = "first-output"


class DecodeError(ValueError):
    """Serialized in-place state is malformed."""


def strip_zeros(c: int) -> tuple[int, int]:
    """Count and remove trailing 0-bits; c must be positive."""
    if c <= 0:
        raise ValueError("strip_zeros needs c > 0")
    n = (c & -c).bit_length() - 1
    return n, c >> n


def strip_ones(c: int) -> tuple[int, int]:
    """Count and remove trailing 1-bits; c must be nonnegative."""
    if c < 0:
        raise ValueError("strip_ones needs c >= 0")
    n = ((c + 1) & -(c + 1)).bit_length() - 1
    return n, c >> n


@dataclass(frozen=True)
class PebblerPhase:
    """One live sub-pebbler as decoded from the countdown."""

    index: int
    phase: str
    local_counter: int


def decode_states(k: int, c: int) -> list[PebblerPhase]:
    """Read the live sub-pebblers and their phases off the countdown bits.

    A sub-pebbler of order i is emitting its first output when its local
    counter is exactly 2^i (always the lowest set bit), still idle while the
    counter is at least 3*2^(i-1) (it holds only its seed), and hashing in
    between.
    """
    if not 0 < c < (1 << k):
        raise ValueError("countdown must satisfy 0 < c < 2^k")
    found = []
    for i in range(k - 1, -1, -1):
        if not c >> i & 1:
            continue
        local = c % (1 << (i + 1))
        if local == 1 << i:
            phase = FIRST_OUTPUT
        elif i >= 1 and local >= 3 << (i - 1):
            phase = IDLE
        else:
            phase = HASHING
        found.append(PebblerPhase(i, phase, local))
    return found


def _setup_values(owf: Owf, family: str, k: int, seed: bytes) -> list:
    """Run the whole set-up stage: pin f^(2^k - 2^i)(seed) into slot i."""
    y: list = [None] * k + [seed]
    fill = k
    gap = 0
    for t in make_schedule(family, k):
        for _ in range(t):
            v = y[fill]
            if gap == 0:
                fill -= 1
                gap = 1 << fill
            y[fill] = evaluate(owf, v)
            gap -= 1
    return y


def segment_budgets(k: int, c: int) -> list[tuple[int, int]]:
    """Doubled hash budgets for the sub-pebblers that work this round.

    Returns (order, doubled budget) for every working sub-pebbler except the
    rightmost one, highest order first.  Each budget is the length of the
    pebbler's bit segment over two; bits of idle and emitting pebblers are
    absorbed into the segment of the working pebbler to their left.
    """
    if not 0 < c < (1 << k):
        raise ValueError("countdown must satisfy 0 < c < 2^k")
    working = [
        i
        for i in range(k - 1, 0, -1)
        if c >> i & 1 and 0 < c % (1 << i) <= 1 << (i - 1)
    ]
    budgets = []
    for pos, i in enumerate(working):
        low = working[pos + 1] + 1 if pos + 1 < len(working) else 0
        budgets.append((i, i - low + 1))
    return budgets


class InPlaceSpeed2:
    """Speed-2 pebbler for a length-2^k chain keeping k value slots.

    Construction runs the whole set-up stage, spending 2^k - 1 hashes and
    leaving slot i-1 holding f^(2^k - 2^i)(seed) for i = 1..k.  The element
    emitted by the free first round does not fit in the k slots, so it is
    kept as a cache that a restore recomputes with one hash from slot 0.
    Each step() emits one chain element and reports the hashes spent.
    """

    variant = "speed2"

    def __init__(self, owf: Owf, k: int, seed: bytes):
        if k < 1:
            raise ValueError("in-place pebblers need k >= 1")
        self.owf = owf
        self.k = k
        y = _setup_values(owf, "speed2", k, seed)
        self.z = y[1:]
        self._pending = y[0]  # first emission, recomputable as f(z[0])
        self.r = 1 << k

    @property
    def exhausted(self) -> bool:
        return self.r >= 1 << (self.k + 1)

    def step(self) -> tuple[bytes, int]:
        """Run round r: return (chain element, hashes spent)."""
        if self.exhausted:
            raise ExhaustedError("in-place speed-2 pebbler is exhausted")
        k, z, owf = self.k, self.z, self.owf
        if self.r == 1 << k:
            out = self._pending
            self._pending = None
            self.r += 1
            return out, 0
        out = z[0]
        c = (1 << (k + 1)) - self.r
        i, c = strip_zeros(c)
        z[:i] = z[1:i + 1]  # the emitter's pinned values seed its children
        i += 1
        c >>= 1
        q = i - 1
        hashes = 0
        while c:
            z[q] = evaluate(owf, z[i])
            hashes += 1
            if q:
                z[q] = evaluate(owf, z[q])
                hashes += 1
            n0, c = strip_zeros(c)
            n1, c = strip_ones(c)
            i += n0 + n1
            q = i
        self.r += 1
        return out, hashes


class InPlaceOptimal:
    """Optimal-schedule pebbler keeping k+1 value slots.

    Budgets come from the countdown's bit segments, parity-rounded per
    sub-pebbler, and every value is written with the same slot-filling
    discipline the set-up stage uses.  Slot occupancy is tracked so the
    k+1-slot bound can be checked by measurement rather than assumed.
    """

    variant = "optimal"

    def __init__(self, owf: Owf, k: int, seed: bytes):
        if k < 1:
            raise ValueError("in-place pebblers need k >= 1")
        self.owf = owf
        self.k = k
        self.z = _setup_values(owf, "optimal", k, seed)  # all k+1 slots occupied
        self.r = 1 << k
        self.max_occupied = k + 1
        self._prefix: dict[int, list[int]] = {}

    @property
    def exhausted(self) -> bool:
        return self.r >= 1 << (self.k + 1)

    def _hashes_done(self, i: int, rho: int) -> int:
        """Hashes an order-i sub-pebbler has spent before its local round rho."""
        pre = self._prefix.get(i)
        if pre is None:
            pre = [0, 0]
            for t in make_schedule("optimal", i):
                pre.append(pre[-1] + t)
            self._prefix[i] = pre
        return pre[rho]

    def step(self) -> tuple[bytes, int]:
        """Run round r: return (chain element, hashes spent)."""
        if self.exhausted:
            raise ExhaustedError("in-place optimal pebbler is exhausted")
        k, z, owf = self.k, self.z, self.owf
        c = (1 << (k + 1)) - self.r
        out = z[0]
        j = (c & -c).bit_length() - 1  # the emitting sub-pebbler's bit
        if j == 0:
            z[0] = None
        else:
            z[:j] = z[1:j + 1]  # its pinned values seed its children
            z[j] = None
        hashes = 0
        if c < 1 << k:
            for i, doubled in segment_budgets(k, c):
                local = c % (1 << (i + 1))
                rho = (1 << (i + 1)) - local
                n = ((i + rho) % 2 + doubled) // 2
                if n == 0:
                    continue
                done = self._hashes_done(i, rho)
                if done == 0:
                    m, gap = i, 0
                else:
                    rem = (1 << i) - done
                    m = rem.bit_length() - 1
                    gap = rem - (1 << m)
                for _ in range(n):
                    v = z[m]
                    if gap == 0:
                        m -= 1
                        gap = 1 << m
                        assert z[m] is None, "descended into an occupied slot"
                    z[m] = evaluate(owf, v)
                    gap -= 1
                hashes += n
        occupied = sum(1 for v in z if v is not None)
        if occupied > self.max_occupied:
            self.max_occupied = occupied
        self.r += 1
        return out, hashes


_VARIANT_CODES = {"speed2": 2, "optimal": 3}
_CODE_VARIANTS = {v: n for n, v in _VARIANT_CODES.items()}


def save(state) -> bytes:
    """Serialize (variant, k, r, slots); everything else is recomputable.

    Layout: one variant octet, one k octet, four big-endian r octets, then
    the slots low index first.  Speed-2 slots are raw values; optimal slots
    carry a presence octet (1 present, 0 absent) before the value bytes,
    absent slots zero-filled.
    """
    head = bytes([_VARIANT_CODES[state.variant], state.k]) + state.r.to_bytes(4, "big")
    width = state.owf.width
    if state.variant == "speed2":
        return head + b"".join(state.z)
    parts = []
    for v in state.z:
        parts.append(b"\x01" + v if v is not None else b"\x00" + bytes(width))
    return head + b"".join(parts)


def restore(data: bytes, owf: Owf):
    """Rebuild an in-place pebbler from save() output (same owf required)."""
    if len(data) < 6:
        raise DecodeError("truncated header")
    code, k = data[0], data[1]
    r = int.from_bytes(data[2:6], "big")
    variant = _CODE_VARIANTS.get(code)
    if variant is None:
        raise DecodeError(f"unknown variant code {code}")
    if k < 1:
        raise DecodeError("order must be >= 1")
    if not (1 << k) <= r <= 1 << (k + 1):
        raise DecodeError("round counter out of range")
    width = owf.width
    body = data[6:]
    if variant == "speed2":
        if len(body) != k * width:
            raise DecodeError("slot area has the wrong size")
        state = InPlaceSpeed2.__new__(InPlaceSpeed2)
        state.owf = owf
        state.k = k
        state.r = r
        state.z = [bytes(body[s * width:(s + 1) * width]) for s in range(k)]
        # the cached first emission is a pure function of slot 0
        state._pending = evaluate(owf, state.z[0]) if r == 1 << k else None
        return state
    if len(body) != (k + 1) * (width + 1):
        raise DecodeError("slot area has the wrong size")
    slots: list = []
    for s in range(k + 1):
        chunk = body[s * (width + 1):(s + 1) * (width + 1)]
        if chunk[0] == 1:
            slots.append(bytes(chunk[1:]))
        elif chunk[0] == 0:
            slots.append(None)
        else:
            raise DecodeError("bad presence flag")
    state = InPlaceOptimal.__new__(InPlaceOptimal)
    state.owf = owf
    state.k = k
    state.r = r
    state.z = slots
    state.max_occupied = sum(1 for v in slots if v is not None)
    state._prefix = {}
    return state
