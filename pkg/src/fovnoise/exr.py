"""Minimal OpenEXR scanline codec.

Covers the slice of the format this package needs: single-part scanline
images, HALF or FLOAT channels, NONE / ZIP / ZIPS compression (ZIP is
zlib-deflate over delta-predicted, split-interleaved bytes).  Channels are
stored alphabetically as the format requires; writing emits FLOAT with ZIP
compression by default.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

_MAGIC = 0x01312F76
_VERSION = 2

_PT_UINT, _PT_HALF, _PT_FLOAT = 0, 1, 2
_DTYPES = {_PT_HALF: np.dtype("<f2"), _PT_FLOAT: np.dtype("<f4")}

_COMP_NONE, _COMP_RLE, _COMP_ZIPS, _COMP_ZIP = 0, 1, 2, 3
_LINES_PER_CHUNK = {_COMP_NONE: 1, _COMP_ZIPS: 1, _COMP_ZIP: 16}


def _predict_and_split(raw: bytes) -> bytes:
    data = np.frombuffer(raw, dtype=np.uint8)
    half = (data.size + 1) // 2
    split = np.empty(data.size, dtype=np.uint8)
    split[:half] = data[0::2]
    split[half:] = data[1::2]
    out = split.astype(np.int16)
    out[1:] = np.diff(split.astype(np.int16)) + 128
    return out.astype(np.uint8).tobytes()


def _unpredict_and_merge(raw: bytes) -> bytes:
    data = np.frombuffer(raw, dtype=np.uint8).astype(np.int64)
    data[1:] += 128
    restored = np.cumsum(data) % 256
    half = (restored.size + 1) // 2
    out = np.empty(restored.size, dtype=np.uint8)
    out[0::2] = restored[:half]
    out[1::2] = restored[half:]
    return out.tobytes()


def _write_attr(fh, name: str, type_name: str, payload: bytes) -> None:
    fh.write(name.encode() + b"\0" + type_name.encode() + b"\0")
    fh.write(struct.pack("<i", len(payload)) + payload)


def write_exr(path: str | Path, channels: dict, compression: str = "zip") -> None:
    """Write named single-channel float arrays as one EXR image.

    All channels must share one (H, W) shape; data is stored as FLOAT.
    compression is "none", "zip" or "zips".
    """
    comp = {"none": _COMP_NONE, "zip": _COMP_ZIP, "zips": _COMP_ZIPS}[compression]
    names = sorted(channels)
    if not names:
        raise ValueError("need at least one channel")
    arrays = {n: np.asarray(channels[n], dtype="<f4") for n in names}
    shape = arrays[names[0]].shape
    if any(a.shape != shape or a.ndim != 2 for a in arrays.values()):
        raise ValueError("all channels must be 2-D with one shape")
    h, w = shape

    chlist = b""
    for n in names:
        chlist += n.encode() + b"\0" + struct.pack("<i", _PT_FLOAT)
        chlist += struct.pack("<BBBB", 0, 0, 0, 0) + struct.pack("<ii", 1, 1)
    chlist += b"\0"
    box = struct.pack("<iiii", 0, 0, w - 1, h - 1)

    lines_per = _LINES_PER_CHUNK[comp]
    n_chunks = (h + lines_per - 1) // lines_per
    chunks = []
    for c in range(n_chunks):
        y0 = c * lines_per
        rows = []
        for y in range(y0, min(y0 + lines_per, h)):
            for n in names:
                rows.append(arrays[n][y].tobytes())
        raw = b"".join(rows)
        if comp == _COMP_NONE:
            data = raw
        else:
            packed = zlib.compress(_predict_and_split(raw))
            data = packed if len(packed) < len(raw) else raw
        chunks.append((y0, data))

    with open(path, "wb") as fh:
        fh.write(struct.pack("<ii", _MAGIC, _VERSION))
        _write_attr(fh, "channels", "chlist", chlist)
        _write_attr(fh, "compression", "compression", struct.pack("<B", comp))
        _write_attr(fh, "dataWindow", "box2i", box)
        _write_attr(fh, "displayWindow", "box2i", box)
        _write_attr(fh, "lineOrder", "lineOrder", struct.pack("<B", 0))
        _write_attr(fh, "pixelAspectRatio", "float", struct.pack("<f", 1.0))
        _write_attr(fh, "screenWindowCenter", "v2f", struct.pack("<ff", 0, 0))
        _write_attr(fh, "screenWindowWidth", "float", struct.pack("<f", 1.0))
        fh.write(b"\0")
        offset_pos = fh.tell()
        fh.write(b"\0" * 8 * n_chunks)
        offsets = []
        for y0, data in chunks:
            offsets.append(fh.tell())
            fh.write(struct.pack("<ii", y0, len(data)) + data)
        fh.seek(offset_pos)
        fh.write(struct.pack(f"<{n_chunks}Q", *offsets))


def _read_cstring(buf: bytes, pos: int) -> tuple[str, int]:
    end = buf.index(b"\0", pos)
    return buf[pos:end].decode(), end + 1


def read_exr(path: str | Path) -> dict:
    """Read a scanline EXR into {channel: float32 (H, W)}."""
    buf = Path(path).read_bytes()
    magic, version = struct.unpack_from("<ii", buf, 0)
    if magic != _MAGIC:
        raise ValueError("not an EXR file")
    if version & 0x200 or version & 0x10:
        raise ValueError("tiled/multipart EXR not supported")
    pos = 8

    channels = []  # (name, pixel_type)
    comp = _COMP_NONE
    data_window = None
    while True:
        if buf[pos] == 0:
            pos += 1
            break
        name, pos = _read_cstring(buf, pos)
        type_name, pos = _read_cstring(buf, pos)
        (size,) = struct.unpack_from("<i", buf, pos)
        pos += 4
        payload = buf[pos:pos + size]
        pos += size
        if name == "channels":
            p = 0
            while payload[p] != 0:
                cname, p = _read_cstring(payload, p)
                (ptype,) = struct.unpack_from("<i", payload, p)
                channels.append((cname, ptype))
                p += 16
        elif name == "compression":
            comp = payload[0]
        elif name == "dataWindow":
            data_window = struct.unpack("<iiii", payload)
    if data_window is None or not channels:
        raise ValueError("missing EXR header attributes")
    if comp not in _LINES_PER_CHUNK:
        raise ValueError(f"unsupported EXR compression {comp}")
    for cname, ptype in channels:
        if ptype not in _DTYPES:
            raise ValueError(f"unsupported pixel type for channel {cname}")

    x0, y0, x1, y1 = data_window
    w, h = x1 - x0 + 1, y1 - y0 + 1
    lines_per = _LINES_PER_CHUNK[comp]
    n_chunks = (h + lines_per - 1) // lines_per
    offsets = struct.unpack_from(f"<{n_chunks}Q", buf, pos)

    out = {name: np.empty((h, w), dtype=np.float32) for name, _ in channels}
    bytes_per_line = sum(w * _DTYPES[pt].itemsize for _, pt in channels)
    for off in offsets:
        (y, size) = struct.unpack_from("<ii", buf, off)
        data = buf[off + 8:off + 8 + size]
        rows = min(lines_per, y1 - y + 1)
        raw_len = rows * bytes_per_line
        if comp != _COMP_NONE and size != raw_len:
            data = _unpredict_and_merge(zlib.decompress(data))
        if len(data) != raw_len:
            raise ValueError("corrupt EXR chunk")
        p = 0
        for r in range(rows):
            for cname, ptype in channels:
                dt = _DTYPES[ptype]
                row = np.frombuffer(data, dtype=dt, count=w, offset=p)
                out[cname][y - y0 + r] = row.astype(np.float32)
                p += w * dt.itemsize
    return out
