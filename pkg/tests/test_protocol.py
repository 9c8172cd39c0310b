import socket
import struct
import subprocess
import sys
import threading
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aevo import protocol
from aevo.genesis import Connection, open_transport
from aevo.protocheck import check_server
from aevo.stub import StubServer, serve_tcp

frame_strategy = st.builds(
    protocol.Frame,
    type=st.sampled_from(list(protocol.FrameType)),
    payload=st.binary(max_size=512),
)


class TestFraming:
    @given(frame_strategy)
    def test_encode_decode_identity(self, frame):
        decoded, consumed = protocol.decode_frame(protocol.encode_frame(frame))
        assert decoded == frame
        assert consumed == protocol.HEADER.size + len(frame.payload)

    def test_bad_magic(self):
        data = b"XXXX" + struct.pack("<HHI", 1, 1, 0)
        with pytest.raises(protocol.BadMagicError) as exc:
            protocol.decode_frame(data)
        assert exc.value.offset == 0

    def test_version_mismatch(self):
        data = protocol.HEADER.pack(protocol.MAGIC, 2, 1, 0)
        with pytest.raises(protocol.VersionMismatchError):
            protocol.decode_frame(data)

    def test_truncated_header(self):
        with pytest.raises(protocol.TruncatedFrameError):
            protocol.decode_frame(b"AEVO")

    def test_truncated_payload(self):
        frame = protocol.Frame(protocol.FrameType.ERROR, b"hello")
        data = protocol.encode_frame(frame)[:-1]
        with pytest.raises(protocol.TruncatedFrameError) as exc:
            protocol.decode_frame(data)
        assert exc.value.offset == protocol.HEADER.size

    def test_unknown_type(self):
        data = protocol.HEADER.pack(protocol.MAGIC, 1, 99, 0)
        with pytest.raises(protocol.FramePayloadError):
            protocol.decode_frame(data)

    def test_multiple_frames_offsets(self):
        a = protocol.encode_frame(protocol.pack_hello(10, 4, 4))
        b = protocol.encode_frame(protocol.pack_error("x"))
        f1, off = protocol.decode_frame(a + b)
        f2, end = protocol.decode_frame(a + b, off)
        assert protocol.unpack_hello(f1) == (10, 4, 4)
        assert protocol.unpack_error(f2) == "x"
        assert end == len(a + b)


class TestTypedPayloads:
    def test_hello(self):
        assert protocol.unpack_hello(protocol.pack_hello(100, 128, 128)) == (100, 128, 128)

    def test_latent_roundtrip(self, rng):
        z = rng.standard_normal(50).astype(np.float32).astype(np.float64)
        frame = protocol.pack_gen_req(z)
        assert np.array_equal(protocol.unpack_latent(frame.payload, 50), z)

    def test_latent_length_check(self):
        with pytest.raises(protocol.FramePayloadError):
            protocol.unpack_latent(b"\x00" * 12, 50)

    def test_img_resp_roundtrip(self, rng):
        rgb = rng.integers(0, 256, (6, 5, 3), dtype=np.uint8)
        frame = protocol.pack_img_resp(rgb)
        assert np.array_equal(protocol.unpack_img_resp(frame, 5, 6), rgb)

    def test_img_resp_size_check(self, rng):
        rgb = rng.integers(0, 256, (6, 5, 3), dtype=np.uint8)
        with pytest.raises(protocol.FramePayloadError):
            protocol.unpack_img_resp(protocol.pack_img_resp(rgb), 6, 6)

    def test_disc_roundtrip(self, rng):
        z = rng.standard_normal(8).astype(np.float32).astype(np.float64)
        rgb = rng.integers(0, 256, (4, 4, 3), dtype=np.uint8)
        frame = protocol.pack_disc_req(z, rgb)
        z2, rgb2 = protocol.unpack_disc_req(frame, 8, 4, 4)
        assert np.array_equal(z, z2) and np.array_equal(rgb, rgb2)

    def test_disc_resp(self):
        score = protocol.unpack_disc_resp(protocol.pack_disc_resp(0.25))
        assert score == 0.25


def stub_cmd(**kw):
    args = " ".join(f"--{k.replace('_', '-')} {v}" for k, v in kw.items())
    return f"stdio:{sys.executable} -m aevo.stub {args}"


class TestStubServer:
    def test_stdio_handshake_and_roundtrips(self, rng):
        conn = Connection(open_transport(stub_cmd(latent_dim=8, width=4, height=4)))
        assert (conn.latent_dim, conn.width, conn.height) == (8, 4, 4)
        z = rng.standard_normal(8)
        img = conn.generate(z)
        assert img.shape == (4, 4, 3)
        assert np.isfinite(conn.realness(z, img))
        conn.close()

    def test_malformed_frame_gets_error_and_dead_connection(self):
        transport = open_transport(stub_cmd(latent_dim=8, width=4, height=4))
        protocol.read_frame(transport.read)  # HELLO
        transport.write(b"GARBAGE_" + b"\x00" * 4)
        frame, _ = protocol.read_frame(transport.read)
        assert frame.type is protocol.FrameType.ERROR
        transport.close()

    def test_wrong_payload_size_rejected(self):
        transport = open_transport(stub_cmd(latent_dim=8, width=4, height=4))
        protocol.read_frame(transport.read)
        transport.write(protocol.encode_frame(
            protocol.Frame(protocol.FrameType.GEN_REQ, b"\x00" * 8)))  # needs 32 bytes
        frame, _ = protocol.read_frame(transport.read)
        assert frame.type is protocol.FrameType.ERROR
        transport.close()

    def test_tcp_transport(self, rng):
        server = StubServer(latent_dim=6, width=4, height=4)
        thread = threading.Thread(
            target=serve_tcp, args=(server, 0), kwargs={"max_connections": 1}, daemon=True)
        # bind to a fixed free port chosen by the OS first
        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        thread = threading.Thread(
            target=serve_tcp, args=(server, port), kwargs={"max_connections": 1}, daemon=True)
        thread.start()
        time.sleep(0.2)
        conn = Connection(open_transport(f"tcp:127.0.0.1:{port}"))
        img = conn.generate(rng.standard_normal(6))
        assert img.shape == (4, 4, 3)
        conn.close()
        thread.join(timeout=5)


class TestProtocolCheck:
    def test_stub_passes(self):
        result = check_server(stub_cmd(latent_dim=8, width=4, height=4), rounds=50)
        assert result.passed, result.summary()

    def test_detects_broken_server(self, tmp_path):
        # a "server" that advertises one size but sends IMG_RESP of another
        script = tmp_path / "liar.py"
        script.write_text(
            "import sys\n"
            "from aevo import protocol\n"
            "out = sys.stdout.buffer\n"
            "out.write(protocol.encode_frame(protocol.pack_hello(4, 8, 8))); out.flush()\n"
            "while True:\n"
            "    frame, _ = protocol.read_frame(sys.stdin.buffer.read)\n"
            "    out.write(protocol.encode_frame(\n"
            "        protocol.Frame(protocol.FrameType.IMG_RESP, b'xx')))\n"
            "    out.flush()\n")
        result = check_server(f"stdio:{sys.executable} {script}", rounds=3)
        assert not result.passed
