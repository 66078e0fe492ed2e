"""Transports between verifier and prover, all speaking the same framing.

A channel carries verifier frames to the prover and returns its replies.
Every channel counts bytes in both directions and can record a transcript.
"""

import io
import subprocess
import time

from . import wire


class ChannelError(RuntimeError):
    pass


class Channel:
    def __init__(self, record=False):
        self.bytes_sent = 0
        self.bytes_received = 0
        self.frames = [] if record else None
        self.prover_seconds = 0.0

    def exchange(self, frame):
        self.bytes_sent += len(frame)
        if self.frames is not None:
            self.frames.append(frame)
        t0 = time.perf_counter()
        reply = self._exchange(frame)
        self.prover_seconds += time.perf_counter() - t0
        self.bytes_received += len(reply)
        if self.frames is not None:
            self.frames.append(reply)
        return reply

    def finish(self, frame):
        self.bytes_sent += len(frame)
        if self.frames is not None:
            self.frames.append(frame)
        self._finish(frame)

    def _exchange(self, frame):
        raise NotImplementedError

    def _finish(self, frame):
        pass

    def close(self):
        pass


class InProcessChannel(Channel):
    """Calls ``prover.handle`` directly."""

    def __init__(self, prover, record=False):
        super().__init__(record)
        self.prover = prover

    def _exchange(self, frame):
        reply = self.prover.handle(frame)
        if reply is None:
            raise ChannelError("prover sent no reply")
        return reply

    def _finish(self, frame):
        self.prover.handle(frame)


class PipeChannel(Channel):
    """Talks to a prover subprocess over its stdin/stdout."""

    def __init__(self, argv, record=False):
        super().__init__(record)
        self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE)

    def _exchange(self, frame):
        try:
            self.proc.stdin.write(frame)
            self.proc.stdin.flush()
            reply = wire.read_frame(self.proc.stdout.read)
        except (OSError, wire.WireError) as e:
            raise ChannelError("pipe to prover failed: %s" % e) from None
        if reply is None:
            raise ChannelError("prover closed the pipe")
        return reply

    def _finish(self, frame):
        try:
            self.proc.stdin.write(frame)
            self.proc.stdin.flush()
        except OSError:
            pass

    def close(self):
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        self.proc.wait()


def serve(prover, rfile, wfile):
    """Prover side of a pipe: answer frames from rfile until a verdict arrives."""
    while True:
        frame = wire.read_frame(rfile.read)
        if frame is None:
            return None
        reply = prover.handle(frame)
        if reply is None:
            return prover.verdict_frame
        wfile.write(reply)
        wfile.flush()


class ReplayMismatch(ChannelError):
    pass


class ReplayChannel(Channel):
    """Feeds recorded prover frames back to a verifier.

    The verifier's own frames must match the recorded ones byte for byte;
    any deviation raises ReplayMismatch.
    """

    def __init__(self, body):
        super().__init__(record=False)
        self._stream = io.BytesIO(body)
        self.recorded_verdict = None
        self.trailing = False
        self.truncated = False

    def _eof(self, msg):
        self.truncated = True
        return ReplayMismatch(msg)

    def _next(self):
        try:
            frame = wire.read_frame(self._stream.read)
        except wire.WireError as e:
            if "truncated" in str(e):
                raise self._eof(str(e)) from None
            raise ReplayMismatch(str(e)) from None
        if frame is None:
            raise self._eof("transcript ends early")
        return frame

    def _exchange(self, frame):
        mine = self._next()
        if mine != frame:
            raise ReplayMismatch("verifier frame differs from the recorded one")
        head = self._stream.read(wire.HEADER_SIZE)
        if len(head) < wire.HEADER_SIZE:
            raise self._eof("transcript ends before the prover reply")
        size = wire.PAYLOAD_SIZE.get(head[0])
        if size is None:
            # unknown tag: hand the header over and let the verifier reject
            return head
        body = self._stream.read(size)
        if len(body) < size:
            raise self._eof("truncated prover reply")
        return head + body

    def _finish(self, frame):
        rec = self._next()
        self.recorded_verdict = rec
        self.trailing = bool(self._stream.read(1))
