"""LZ78 phrase dictionaries and the Lempel-Ziv Jaccard distance (LZJD)."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from .measures import jaccard

Sequence_ = Union[str, bytes, bytearray]


def _as_bytes(sequence: Sequence_) -> bytes:
    if isinstance(sequence, str):
        return sequence.encode("utf-8")
    return bytes(sequence)


def lz78_dictionary(sequence: Sequence_) -> frozenset:
    """Phrases of the incremental LZ78 parse of ``sequence``, as bytes.

    Each step consumes the longest already-known phrase plus one more symbol
    and records the result.  Input that ends in the middle of a known phrase
    contributes that phrase, which is already present, so the set is the same
    whether or not the trailing match is counted.
    """
    data = _as_bytes(sequence)
    phrases = set()
    start = 0
    # phrases are prefix-closed, so the longest known match grows one byte at a time
    end = start + 1
    while end <= len(data):
        if data[start:end] in phrases:
            end += 1
            continue
        phrases.add(data[start:end])
        start = end
        end = start + 1
    if start < len(data):
        phrases.add(data[start:])
    return frozenset(phrases)


def lzjd(a: Sequence_, b: Sequence_) -> Fraction:
    """1 - |LZ(a) ∩ LZ(b)| / |LZ(a) ∪ LZ(b)|; 0 when both dictionaries are empty."""
    return jaccard(lz78_dictionary(a), lz78_dictionary(b))


def is_prefix_closed(phrases: Iterable[bytes]) -> bool:
    phrases = set(phrases)
    return all(p[:-1] in phrases for p in phrases if len(p) >= 2)


def escape_phrase(phrase: bytes) -> str:
    """Printable ASCII as-is, backslash and everything else as \\xNN escapes."""
    out = []
    for byte in phrase:
        if 0x21 <= byte <= 0x7E and byte != 0x5C:
            out.append(chr(byte))
        else:
            out.append(f"\\x{byte:02x}")
    return "".join(out)


def dump_dictionary(phrases: Iterable[bytes]) -> str:
    """Sorted phrase listing, one escaped phrase per line (shorter phrases first)."""
    ordered = sorted(phrases, key=lambda p: (len(p), p))
    return "".join(escape_phrase(p) + "\n" for p in ordered)
