"""In-process message fabric: FIFO per ordered endpoint pair, no loss,
deterministic round-robin drain by endpoint id. Realizes the secure
channels the protocols assume; adversary hooks mutate payloads in flight."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Message:
    kind: str          # SHARE | SHARE_SUM | PI_BCAST | VPACKET | UBCAST | VERDICT
    sender: str
    recipient: str
    payload: dict
    seq: int = 0

    def encode(self) -> str:
        """Tagged text record; payload values rendered as repr strings."""
        body = ";".join(f"{k}={self.payload[k]!r}" for k in sorted(self.payload))
        return f"{self.kind}|{self.seq}|{self.sender}>{self.recipient}|{body}"


class ChannelError(RuntimeError):
    pass


class ChannelNetwork:
    """Deterministic single-process channel network."""

    def __init__(self):
        self._endpoints: list[str] = []
        self._queues: dict[tuple[str, str], deque[Message]] = {}
        self._seq = 0
        self.delivery_log: list[str] = []
        self._taps: list = []  # callables Message -> Message

    def register(self, endpoint: str) -> None:
        if endpoint in self._endpoints:
            raise ChannelError(f"endpoint {endpoint} already registered")
        self._endpoints.append(endpoint)

    def add_tap(self, fn) -> None:
        """Install an in-flight message transform (adversary hook)."""
        self._taps.append(fn)

    def clear_taps(self) -> None:
        self._taps.clear()

    def send(self, kind: str, sender: str, recipient: str, payload: dict) -> None:
        if sender not in self._endpoints or recipient not in self._endpoints:
            raise ChannelError(f"unregistered endpoint in {sender}->{recipient}")
        self._seq += 1
        msg = Message(kind, sender, recipient, dict(payload), self._seq)
        for tap in self._taps:
            msg = tap(msg)
        self._queues.setdefault((sender, recipient), deque()).append(msg)

    def broadcast(self, kind: str, sender: str, payload: dict) -> None:
        for ep in self._endpoints:
            if ep != sender:
                self.send(kind, sender, ep, payload)

    def receive(self, recipient: str) -> list[Message]:
        """Drain everything addressed to `recipient`, round-robin over
        senders in registration order, FIFO within each pair."""
        out = []
        queues = [self._queues.get((s, recipient)) for s in self._endpoints]
        queues = [q for q in queues if q]
        while any(queues):
            for q in queues:
                if q:
                    msg = q.popleft()
                    self.delivery_log.append(msg.encode())
                    out.append(msg)
        return out
