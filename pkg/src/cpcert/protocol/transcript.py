"""Transcript files: MAGIC | seed (8 bytes LE) | frames | verdict frame."""

import struct
from dataclasses import dataclass, field as dc_field
from typing import List

from . import wire

SEED = struct.Struct("<Q")


class TranscriptError(ValueError):
    pass


@dataclass
class Transcript:
    seed: int
    frames: List[bytes] = dc_field(default_factory=list)

    def to_bytes(self):
        return wire.MAGIC + SEED.pack(self.seed) + b"".join(self.frames)

    @property
    def verdict(self):
        return wire.decode(self.frames[-1]) if self.frames else None


def split_header(data):
    """Return (seed, body) after checking the magic."""
    if len(data) < len(wire.MAGIC) + SEED.size:
        raise TranscriptError("transcript too short")
    if data[:len(wire.MAGIC)] != wire.MAGIC:
        raise TranscriptError("bad magic, not a transcript")
    (seed,) = SEED.unpack_from(data, len(wire.MAGIC))
    body = data[len(wire.MAGIC) + SEED.size:]
    if not body:
        raise TranscriptError("transcript has no messages")
    return seed, body


def parse(data):
    """Strict parse of a whole transcript into frames."""
    seed, body = split_header(data)
    frames = []
    pos = 0
    while pos < len(body):
        try:
            size = wire.frame_size(body[pos])
        except wire.WireError as e:
            raise TranscriptError("%s at byte %d" % (e, pos)) from None
        if pos + size > len(body):
            raise TranscriptError("truncated frame at byte %d" % pos)
        frames.append(bytes(body[pos:pos + size]))
        pos += size
    t = Transcript(seed, frames)
    if t.verdict.tag not in (wire.ACCEPT, wire.REJECT):
        raise TranscriptError("transcript does not end with a verdict")
    return t
