"""On-disk formats: JSON code descriptions and binary stripe files."""

from __future__ import annotations

import json
import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .arraycode import ArrayCode
from .kernels import KernelSpec

__all__ = [
    "CODESPEC_VERSION",
    "code_to_json",
    "code_from_json",
    "save_code",
    "load_code",
    "StripeFile",
    "ChecksumError",
    "FormatError",
    "bytes_to_symbols",
    "symbols_to_bytes",
    "write_stripes",
    "read_stripes",
]

CODESPEC_VERSION = 1
MAGIC = b"CSVS"
STRIPE_VERSION = 1
# magic, version, p, L, J, k, n, stripe count, original byte length, packed flag
_HEADER = struct.Struct("<4sBHHHHHIQB")


class FormatError(ValueError):
    pass


class ChecksumError(FormatError):
    pass


def code_to_json(code: ArrayCode) -> dict:
    doc = code.spec.to_json()
    doc.update(
        {
            "version": CODESPEC_VERSION,
            "family": code.family,
            "k": code.k,
            "r": code.r,
            "n": code.n,
            "systematic": code.systematic,
            "generators": [list(g) for g in code.params.get("generators", [])] or None,
            "params": {k: v for k, v in code.params.items() if k != "generators"},
            "kernels": code.kernels.tolist(),
        }
    )
    return doc


def code_from_json(doc: dict) -> ArrayCode:
    if doc.get("version") != CODESPEC_VERSION:
        raise FormatError(f"unsupported code file version {doc.get('version')!r}")
    spec = KernelSpec.from_json(doc)
    params = dict(doc.get("params") or {})
    if doc.get("generators") is not None:
        params["generators"] = [tuple(g) for g in doc["generators"]]
    k, n = int(doc["k"]), int(doc["n"])
    if n != k + int(doc["r"]):
        raise FormatError("n != k + r")
    return ArrayCode(
        spec.p,
        spec.L,
        spec,
        k,
        n,
        bool(doc["systematic"]),
        np.array(doc["kernels"], dtype=np.int64),
        doc.get("family", "custom"),
        params,
    )


def save_code(code: ArrayCode, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(code_to_json(code), fh)


def load_code(path: str) -> ArrayCode:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not a JSON code file ({exc})") from exc
    return code_from_json(doc)


# ---------------------------------------------------------------------------
# symbols <-> bytes


def _digits_per_byte(p: int) -> int:
    return 8 if p == 2 else math.ceil(8 / math.log2(p))


def bytes_to_symbols(data: bytes, p: int) -> np.ndarray:
    """Expand bytes into GF(p) symbols (bits, LSB first, for p = 2; base-p digits otherwise)."""
    raw = np.frombuffer(data, dtype=np.uint8)
    if p == 2:
        return np.unpackbits(raw, bitorder="little").astype(np.int64)
    d = _digits_per_byte(p)
    vals = raw.astype(np.int64)[:, None] // (p ** np.arange(d, dtype=np.int64)) % p
    return vals.reshape(-1)


def symbols_to_bytes(sym: np.ndarray, p: int, length: int) -> bytes:
    sym = np.asarray(sym, dtype=np.int64)
    if p == 2:
        return np.packbits(sym[: 8 * length].astype(np.uint8), bitorder="little").tobytes()
    d = _digits_per_byte(p)
    vals = sym[: d * length].reshape(length, d) @ (p ** np.arange(d, dtype=np.int64))
    if np.any(vals > 255):
        raise FormatError("decoded symbols do not form valid bytes")
    return vals.astype(np.uint8).tobytes()


# ---------------------------------------------------------------------------
# stripe files


@dataclass
class StripeFile:
    """A sequence of coded stripes, each n x J symbols over GF(p)."""

    p: int
    L: int
    J: int
    k: int
    n: int
    length: int  # original payload length in bytes
    stripes: np.ndarray  # shape (count, n, J)

    @property
    def packed(self) -> bool:
        return self.p == 2

    def _stripe_bytes(self, s: np.ndarray) -> bytes:
        flat = s.reshape(-1).astype(np.uint8)
        return np.packbits(flat).tobytes() if self.packed else flat.tobytes()

    def _stripe_size(self) -> int:
        nsym = self.n * self.J
        return (nsym + 7) // 8 if self.packed else nsym

    def to_bytes(self) -> bytes:
        count = self.stripes.shape[0]
        out = [
            _HEADER.pack(
                MAGIC, STRIPE_VERSION, self.p, self.L, self.J, self.k, self.n, count, self.length, int(self.packed)
            )
        ]
        for s in self.stripes:
            payload = self._stripe_bytes(s)
            out.append(payload)
            out.append(struct.pack("<I", zlib.crc32(payload)))
        return b"".join(out)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "StripeFile":
        if len(blob) < _HEADER.size:
            raise FormatError("truncated stripe file header")
        magic, ver, p, L, J, k, n, count, length, packed = _HEADER.unpack_from(blob)
        if magic != MAGIC:
            raise FormatError("not a stripe file (bad magic)")
        if ver != STRIPE_VERSION:
            raise FormatError(f"unsupported stripe file version {ver}")
        sf = cls(p, L, J, k, n, length, np.zeros((count, n, J), dtype=np.int64))
        if bool(packed) != sf.packed:
            raise FormatError("packing flag inconsistent with p")
        size = sf._stripe_size()
        pos = _HEADER.size
        nsym = n * J
        for i in range(count):
            payload = blob[pos : pos + size]
            crc = blob[pos + size : pos + size + 4]
            if len(payload) != size or len(crc) != 4:
                raise FormatError(f"truncated stripe {i}")
            if struct.unpack("<I", crc)[0] != zlib.crc32(payload):
                raise ChecksumError(f"checksum mismatch in stripe {i}")
            raw = np.frombuffer(payload, dtype=np.uint8)
            sym = np.unpackbits(raw)[:nsym] if sf.packed else raw
            sf.stripes[i] = sym.reshape(n, J)
            pos += size + 4
        if pos != len(blob):
            raise FormatError("trailing bytes after last stripe")
        return sf


def split_payload(data: bytes, code: ArrayCode) -> np.ndarray:
    """Bytes -> (count, k, J) message stripes, zero padded."""
    sym = bytes_to_symbols(data, code.p)
    per = code.k * code.J
    count = max(1, -(-len(sym) // per))
    buf = np.zeros(count * per, dtype=np.int64)
    buf[: len(sym)] = sym
    return buf.reshape(count, code.k, code.J)


def write_stripes(path: str, sf: StripeFile) -> None:
    with open(path, "wb") as fh:
        fh.write(sf.to_bytes())


def read_stripes(path: str) -> StripeFile:
    with open(path, "rb") as fh:
        return StripeFile.from_bytes(fh.read())
