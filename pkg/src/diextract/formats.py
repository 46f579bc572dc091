"""Symbol input parsing and bit output packing for the command line."""

from __future__ import annotations

from dataclasses import dataclass

from .dice import depth_for

IN_FORMATS = ("ascii-coin", "ascii-die", "packed-binary")
OUT_FORMATS = ("ascii-bits", "hex", "packed-bytes")


class SymbolParseError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class InputFormat:
    mode: str = "ascii-coin"
    m: int = 2
    count: int | None = None  # packed mode: number of symbols, else all whole symbols

    def __post_init__(self):
        if self.mode not in IN_FORMATS:
            raise ValueError(f"unknown input format {self.mode!r}")
        if self.m < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.m}")

    @property
    def width(self) -> int:
        return depth_for(self.m) + 1


def parse_coins(text: str) -> str:
    """H/T (or 1/0) characters; whitespace is ignored."""
    out = []
    for i, c in enumerate(text):
        if c in "H1":
            out.append("H")
        elif c in "T0":
            out.append("T")
        elif not c.isspace():
            raise SymbolParseError(f"invalid coin symbol {c!r}", i)
    return "".join(out)


def parse_die(text: str, m: int) -> list[int]:
    """Whitespace-separated decimal faces; a run with no separators is read digit by digit."""
    faces = []
    pos = 0
    for token in text.split():
        start = text.index(token, pos)
        pos = start + len(token)
        if not token.isdigit():
            bad = next(i for i, c in enumerate(token) if not c.isdigit())
            raise SymbolParseError(f"invalid die face {token!r}", start + bad)
        pieces = [token] if m > 10 else list(token)
        for j, piece in enumerate(pieces):
            face = int(piece)
            if face >= m:
                where = start + (j if len(pieces) > 1 else 0)
                raise SymbolParseError(f"face {face} out of range for m={m}", where)
            faces.append(face)
    return faces


def unpack_symbols(data: bytes, width: int, count: int | None = None) -> list[int]:
    total = len(data) * 8
    available = total // width
    if count is None:
        count = available
    elif count > available:
        raise SymbolParseError(f"only {available} symbols of width {width} present", total)
    value = int.from_bytes(data, "big")
    mask = (1 << width) - 1
    return [(value >> (total - (i + 1) * width)) & mask for i in range(count)]


def read_symbols(data: bytes, fmt: InputFormat):
    """Coin formats return an H/T string, die formats a list of faces."""
    if fmt.mode == "packed-binary":
        values = unpack_symbols(data, fmt.width, fmt.count)
        if fmt.m == 2:
            return "".join("H" if v else "T" for v in values)
        for i, v in enumerate(values):
            if v >= fmt.m:
                raise SymbolParseError(f"face {v} out of range for m={fmt.m}", i)
        return values
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as err:
        raise SymbolParseError("non-ASCII byte in input", err.start) from None
    if fmt.mode == "ascii-coin":
        return parse_coins(text)
    return parse_die(text, fmt.m)


def pack_bits(bits: str) -> bytes:
    """MSB-first within each byte; the last byte is zero-padded in its low bits."""
    if not bits:
        return b""
    pad = -len(bits) % 8
    return int(bits + "0" * pad, 2).to_bytes((len(bits) + pad) // 8, "big")


def unpack_bits(data: bytes, bit_length: int) -> str:
    if bit_length > len(data) * 8:
        raise ValueError(f"bit length {bit_length} exceeds {len(data)} bytes")
    if not data:
        return ""
    return format(int.from_bytes(data, "big"), f"0{len(data) * 8}b")[:bit_length]


def encode_bits(bits: str, mode: str) -> bytes:
    if mode == "ascii-bits":
        return (bits + "\n").encode() if bits else b""
    if mode == "hex":
        return (pack_bits(bits).hex() + "\n").encode() if bits else b""
    if mode == "packed-bytes":
        return pack_bits(bits)
    raise ValueError(f"unknown output format {mode!r}")
