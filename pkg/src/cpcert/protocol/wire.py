"""Bit-exact message framing.

frame = tag (1 byte) | ordinal (4 bytes LE) | variable (2 bytes LE) | payload

The payload size is fixed by the tag.  ``ordinal`` is the position of the
addressed CpdRef in the fixed topological order; ``variable`` is the index
of the unassigned variable, or 0xFFFF when there is none.
"""

import struct
from typing import NamedTuple, Optional

from .. import field
from ..unipoly import POLY_BYTES, UniPoly

CHALLENGE = 0x01
CHALLENGE_R = 0x02
ANSWER_VALUE = 0x10
ANSWER_POLY = 0x11
ACCEPT = 0x20
REJECT = 0x21
ABORT = 0x30

PAYLOAD_SIZE = {
    CHALLENGE: 0,
    CHALLENGE_R: 8,
    ANSWER_VALUE: 8,
    ANSWER_POLY: POLY_BYTES,
    ACCEPT: 8,
    REJECT: 8,
    ABORT: 0,
}
TAG_NAMES = {
    CHALLENGE: "CHALLENGE", CHALLENGE_R: "CHALLENGE_R", ANSWER_VALUE: "ANSWER_VALUE",
    ANSWER_POLY: "ANSWER_POLY", ACCEPT: "ACCEPT", REJECT: "REJECT", ABORT: "ABORT",
}

HEADER = struct.Struct("<BIH")
HEADER_SIZE = HEADER.size  # 7
NO_VAR = 0xFFFF
NO_ORDINAL = 0xFFFFFFFF

MAGIC = b"CPCERT01"


class WireError(ValueError):
    pass


class Frame(NamedTuple):
    tag: int
    ordinal: int
    var: Optional[int]
    payload: bytes = b""

    def encode(self):
        var = NO_VAR if self.var is None else self.var
        return HEADER.pack(self.tag, self.ordinal, var) + self.payload

    @property
    def value(self):
        """Payload read as a field element (8-byte payloads only)."""
        return field.from_bytes(self.payload)

    @property
    def poly(self):
        return UniPoly.from_bytes(self.payload, self.var)

    def __str__(self):
        name = TAG_NAMES.get(self.tag, "0x%02x" % self.tag)
        var = "-" if self.var is None else str(self.var)
        return "%s ord=%d var=%s %s" % (name, self.ordinal, var, self.payload.hex())


def frame_size(tag):
    size = PAYLOAD_SIZE.get(tag)
    if size is None:
        raise WireError("unknown tag 0x%02x" % tag)
    return HEADER_SIZE + size


def decode(data):
    """Decode exactly one frame; raises WireError on malformed input."""
    if len(data) < HEADER_SIZE:
        raise WireError("truncated frame header")
    tag, ordinal, var = HEADER.unpack_from(data)
    size = frame_size(tag)
    if len(data) != size:
        raise WireError("frame of tag 0x%02x must be %d bytes, got %d" % (tag, size, len(data)))
    return Frame(tag, ordinal, None if var == NO_VAR else var, bytes(data[HEADER_SIZE:]))


def read_frame(read):
    """Read one frame with ``read(n) -> bytes``; returns None at clean EOF."""
    head = read(HEADER_SIZE)
    if not head:
        return None
    if len(head) < HEADER_SIZE:
        raise WireError("truncated frame header")
    size = frame_size(head[0]) - HEADER_SIZE
    body = read(size) if size else b""
    if len(body) < size:
        raise WireError("truncated frame payload")
    return head + body


def challenge(ordinal, var, r=None):
    if r is None:
        return Frame(CHALLENGE, ordinal, var).encode()
    return Frame(CHALLENGE_R, ordinal, var, field.to_bytes(r)).encode()


def answer(ordinal, var, value):
    if var is None:
        return Frame(ANSWER_VALUE, ordinal, None, field.to_bytes(value)).encode()
    return Frame(ANSWER_POLY, ordinal, var, value.to_bytes()).encode()


def accept(count_mod_p):
    return Frame(ACCEPT, 0, None, field.to_bytes(count_mod_p)).encode()


def reject(reason, ordinal=None):
    return Frame(REJECT, NO_ORDINAL if ordinal is None else ordinal, None,
                 int(reason).to_bytes(8, "little")).encode()


def abort(ordinal=0):
    return Frame(ABORT, ordinal, None).encode()
