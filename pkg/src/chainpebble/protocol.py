"""Chained one-time identification: release preimages, verify by one hash.

The prover holds a pebbler over a length-2^k chain and releases the chain
elements one per identification round, newest preimage first.  The verifier
stores a single trusted anchor -- initially the registered endpoint
f^(2^k)(seed) -- and accepts a candidate exactly when one hash maps it to
the anchor, then adopts the candidate as the new anchor.  Rejection leaves
the verifier untouched.  A prover that skips ahead is rejected: the check is
deliberately single-step.

Wire format, one UTF-8 line per message, LF-terminated:

    client -> server:   REGISTER <k> <hex-endpoint>   then   AUTH <hex-value>
    server -> client:   OK <verified-count> | FAIL | ERR <reason>

Hex is lowercase, exactly two characters per octet.  Unknown commands get
``ERR unknown-command``; any ERR closes the session.  The registration line
is trusted as-is -- securing it is a deployment concern and must happen out
of band.  Sessions are independent; the server may run them concurrently
but never shares mutable session state.
"""

import socket
import socketserver

from .inplace import InPlaceOptimal, InPlaceSpeed2
from .owf import Owf, evaluate
from .pebbler import ExhaustedError, Pebbler

ENGINES = ("framework", "inplace-speed2", "inplace-optimal")


class Prover:
    """Releases successive chain preimages, one identification round each.

    Any pebbler engine gives byte-identical releases; the in-place optimal
    one is the default for k >= 1.  ``last_hashes`` reports the work of the
    most recent release (at most ceil(k/2) for optimal, k-1 for speed-2).
    """

    def __init__(self, owf: Owf, k: int, seed: bytes, engine: str = "auto",
                 family: str = "optimal"):
        if k < 0:
            raise ValueError("order k must be >= 0")
        if engine == "auto":
            engine = "inplace-optimal" if k >= 1 else "framework"
        if engine == "framework":
            pebbler = Pebbler(owf, family, k, seed)
            for _ in range((1 << k) - 1):
                pebbler.step()  # set-up rounds emit nothing

            def step() -> tuple[bytes, int]:
                res = pebbler.step()
                return res.output, res.hashes

        elif engine == "inplace-speed2":
            pebbler = InPlaceSpeed2(owf, k, seed)
            step = pebbler.step
        elif engine == "inplace-optimal":
            pebbler = InPlaceOptimal(owf, k, seed)
            step = pebbler.step
        else:
            raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")
        self.owf = owf
        self.n = 1 << k
        self.released = 0
        self.last_hashes = 0
        self.pebbler = pebbler
        self._step = step
        first, hashes = step()  # free first round
        self.endpoint = evaluate(owf, first)
        self._pending: bytes | None = first
        self._pending_hashes = hashes

    def next_value(self) -> bytes:
        """Release the next preimage, running the pebbler's round internally."""
        if self.released >= self.n:
            raise ExhaustedError(f"chain exhausted after {self.n} releases")
        if self._pending is not None:
            value, self.last_hashes = self._pending, self._pending_hashes
            self._pending = None
        else:
            value, self.last_hashes = self._step()
        self.released += 1
        return value


class Verifier:
    """Constant-storage verifier: remembers only the current anchor."""

    def __init__(self, owf: Owf, endpoint: bytes):
        self.owf = owf
        self.anchor = endpoint
        self.verified = 0

    def check(self, candidate: bytes) -> bool:
        """Accept iff one hash of the candidate equals the anchor."""
        if len(candidate) != self.owf.width:
            return False
        if evaluate(self.owf, candidate) != self.anchor:
            return False
        self.anchor = candidate
        self.verified += 1
        return True


def _parse_value(text: str, width: int) -> bytes | None:
    if len(text) != 2 * width or text != text.lower():
        return None
    try:
        return bytes.fromhex(text)
    except ValueError:
        return None


class _Session(socketserver.StreamRequestHandler):
    def handle(self):
        owf = self.server.owf
        verifier = None
        for raw in self.rfile:
            try:
                line = raw.decode("utf-8").strip()
            except UnicodeDecodeError:
                self._send("ERR bad-encoding")
                return
            parts = line.split()
            if not parts:
                self._send("ERR empty-line")
                return
            if parts[0] == "REGISTER":
                if len(parts) != 3:
                    self._send("ERR bad-register")
                    return
                try:
                    k = int(parts[1])
                except ValueError:
                    self._send("ERR bad-register")
                    return
                endpoint = _parse_value(parts[2], owf.width)
                if not 0 <= k <= 30 or endpoint is None:
                    self._send("ERR bad-register")
                    return
                verifier = Verifier(owf, endpoint)
                self._send("OK 0")
            elif parts[0] == "AUTH":
                if verifier is None:
                    self._send("ERR not-registered")
                    return
                if len(parts) != 2:
                    self._send("ERR bad-auth")
                    return
                candidate = _parse_value(parts[1], owf.width)
                if candidate is None:
                    self._send("ERR bad-auth")
                    return
                if verifier.check(candidate):
                    self._send(f"OK {verifier.verified}")
                else:
                    self._send("FAIL")
            else:
                self._send("ERR unknown-command")
                return

    def _send(self, text: str):
        self.wfile.write((text + "\n").encode("utf-8"))


class IdentificationServer(socketserver.ThreadingTCPServer):
    """One verifier session per connection; safe for concurrent clients."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, owf: Owf, host: str, port: int):
        super().__init__((host, port), _Session)
        self.owf = owf


def _flip_bit(v: bytes) -> bytes:
    return bytes([v[0] ^ 1]) + v[1:]


def run_client(owf: Owf, k: int, seed: bytes, host: str, port: int, rounds: int,
               tamper: int | None = None, engine: str = "auto", report=print) -> int:
    """Register, then run identification rounds against a server.

    ``tamper`` flips one bit in that round's value before sending; the next
    round retries the same value honestly, demonstrating that a rejection
    leaves the verifier's anchor unchanged.  Returns a process exit status.
    """
    prover = Prover(owf, k, seed, engine)
    try:
        conn = socket.create_connection((host, port))
    except OSError as exc:
        report(f"connection failed: {exc}")
        return 1
    status = 0
    with conn, conn.makefile("rwb") as wire:

        def exchange(line: str) -> str:
            wire.write((line + "\n").encode("utf-8"))
            wire.flush()
            reply = wire.readline().decode("utf-8").strip()
            if not reply:
                raise ConnectionError("server closed the connection")
            return reply

        reply = exchange(f"REGISTER {k} {prover.endpoint.hex()}")
        report(f"registered k={k} endpoint={prover.endpoint.hex()} -> {reply}")
        if not reply.startswith("OK"):
            return 1
        retry: bytes | None = None
        for j in range(1, rounds + 1):
            if retry is not None:
                value, retry = retry, None
            else:
                try:
                    value = prover.next_value()
                except ExhaustedError as exc:
                    report(f"round {j}: {exc}")
                    return 1
            sent = value
            if j == tamper:
                sent = _flip_bit(value)
                retry = value  # resend honestly next round
            reply = exchange(f"AUTH {sent.hex()}")
            report(f"round {j}: {reply} hashes={prover.last_hashes}")
            if reply == "FAIL" and j != tamper:
                status = 1
            if reply.startswith("ERR"):
                return 1
    return status
