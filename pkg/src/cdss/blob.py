"""On-disk formats: byte/symbol packing, node blobs, and the job manifest.

Blob layout (all integers little-endian):

    magic            4 bytes  "CDSS"
    version          u16      1
    code id          u8       1=lrc-xor, 2=lrc-rs, 3=msr-half
    field width      u8
    primitive poly   u32
    n, k, L          u16 each
    cluster, node    u16 each (1-based address of this blob's node)
    alpha            u32      symbols per stripe on this node
    stripe count     u32
    original length  u64      bytes in the encoded input file
    payload          packed symbols (alpha * stripe_count of them)

Writes go through a temp file and rename so a crash never leaves a
truncated blob behind.
"""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import UnsupportedDataWidthError

MAGIC = b"CDSS"
VERSION = 1
HEADER_FMT = "<4sHBBIHHHHHIIQ"
HEADER_SIZE = struct.calcsize(HEADER_FMT)

CODE_IDS = {"lrc-xor": 1, "lrc-rs": 2, "msr-half": 3}
CODE_NAMES = {v: k for k, v in CODE_IDS.items()}

DATA_WIDTHS = (4, 8, 16)


def pack(data: bytes, width: int) -> list[int]:
    """File bytes to field symbols; w=4 packs low nibble first, w=16 is
    little-endian (odd-length input gains a zero pad byte)."""
    if width == 8:
        return list(data)
    if width == 4:
        out = []
        for b in data:
            out.append(b & 0xF)
            out.append(b >> 4)
        return out
    if width == 16:
        if len(data) % 2:
            data = data + b"\x00"
        return [data[i] | (data[i + 1] << 8) for i in range(0, len(data), 2)]
    raise UnsupportedDataWidthError(f"data path supports widths {DATA_WIDTHS}, got {width}")


def unpack(symbols: Sequence[int], width: int, original_length: int) -> bytes:
    """Inverse of pack; truncates any stripe padding back to the exact file."""
    if width == 8:
        return bytes(symbols[:original_length])
    if width == 4:
        out = bytearray()
        for i in range(0, len(symbols) - 1, 2):
            out.append(symbols[i] | (symbols[i + 1] << 4))
        if len(symbols) % 2:
            out.append(symbols[-1])
        return bytes(out[:original_length])
    if width == 16:
        out = bytearray()
        for s in symbols:
            out.append(s & 0xFF)
            out.append(s >> 8)
        return bytes(out[:original_length])
    raise UnsupportedDataWidthError(f"data path supports widths {DATA_WIDTHS}, got {width}")


def pad_to_multiple(symbols: list[int], multiple: int) -> list[int]:
    rem = len(symbols) % multiple
    return symbols if rem == 0 else symbols + [0] * (multiple - rem)


@dataclass(frozen=True)
class BlobHeader:
    code_kind: str
    width: int
    poly: int
    n: int
    k: int
    L: int
    cluster: int
    node: int
    alpha: int
    stripe_count: int
    original_length: int

    def encode(self) -> bytes:
        return struct.pack(
            HEADER_FMT, MAGIC, VERSION, CODE_IDS[self.code_kind], self.width,
            self.poly, self.n, self.k, self.L, self.cluster, self.node,
            self.alpha, self.stripe_count, self.original_length,
        )

    @classmethod
    def decode(cls, raw: bytes) -> "BlobHeader":
        (magic, version, code_id, width, poly, n, k, L,
         cluster, node, alpha, stripes, length) = struct.unpack(HEADER_FMT, raw)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        if version != VERSION:
            raise ValueError(f"unsupported blob version {version}")
        if code_id not in CODE_NAMES:
            raise ValueError(f"unknown code id {code_id}")
        return cls(code_kind=CODE_NAMES[code_id], width=width, poly=poly,
                   n=n, k=k, L=L, cluster=cluster, node=node, alpha=alpha,
                   stripe_count=stripes, original_length=length)


def blob_filename(cluster: int, node: int) -> str:
    return f"node_{cluster}_{node}.blob"


def write_blob(path: Path, header: BlobHeader, symbols: Sequence[int]) -> None:
    expected = header.alpha * header.stripe_count
    if len(symbols) != expected:
        raise ValueError(f"blob carries {len(symbols)} symbols, header says {expected}")
    payload = _symbols_to_payload(symbols, header.width)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(header.encode() + payload)
    os.replace(tmp, path)


def read_blob(path: Path) -> tuple[BlobHeader, list[int]]:
    raw = path.read_bytes()
    header = BlobHeader.decode(raw[:HEADER_SIZE])
    count = header.alpha * header.stripe_count
    symbols = _payload_to_symbols(raw[HEADER_SIZE:], header.width, count)
    return header, symbols


def _symbols_to_payload(symbols: Sequence[int], width: int) -> bytes:
    if width == 8:
        return bytes(symbols)
    if width == 4:
        out = bytearray()
        for i in range(0, len(symbols) - 1, 2):
            out.append(symbols[i] | (symbols[i + 1] << 4))
        if len(symbols) % 2:
            out.append(symbols[-1])
        return bytes(out)
    if width == 16:
        out = bytearray()
        for s in symbols:
            out.append(s & 0xFF)
            out.append(s >> 8)
        return bytes(out)
    raise UnsupportedDataWidthError(f"blob payload supports widths {DATA_WIDTHS}, got {width}")


def _payload_to_symbols(payload: bytes, width: int, count: int) -> list[int]:
    if width == 8:
        return list(payload[:count])
    if width == 4:
        out = []
        for b in payload:
            out.append(b & 0xF)
            out.append(b >> 4)
        return out[:count]
    if width == 16:
        return [payload[i] | (payload[i + 1] << 8) for i in range(0, 2 * count, 2)]
    raise UnsupportedDataWidthError(f"blob payload supports widths {DATA_WIDTHS}, got {width}")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
