"""Minimal FASTA reader."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Union

from .errors import MalformedFasta


@dataclass(frozen=True)
class SequenceRecord:
    id: str
    description: str
    residues: str


def parse_fasta_lines(lines: Iterable[str], uppercase: bool = True) -> List[SequenceRecord]:
    """Records in file order.  Residue lines are joined with all whitespace
    removed; peptide letters are uppercased unless ``uppercase`` is False."""
    records: List[SequenceRecord] = []
    header = None
    chunks: List[str] = []
    seen = set()

    def flush(lineno: int):
        if header is None:
            return
        ident, *rest = header.split(None, 1)
        residues = "".join(chunks)
        if not residues:
            raise MalformedFasta(f"record {ident!r} has no sequence (before line {lineno})")
        if uppercase:
            residues = residues.upper()
        records.append(SequenceRecord(ident, rest[0] if rest else "", residues))

    lineno = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith(">"):
            flush(lineno)
            header = line[1:].strip()
            ident = header.split(None, 1)[0] if header else ""
            if not ident:
                raise MalformedFasta(f"empty header on line {lineno}")
            if ident in seen:
                raise MalformedFasta(f"duplicate id {ident!r} on line {lineno}")
            seen.add(ident)
            chunks = []
            continue
        if header is None:
            raise MalformedFasta(f"sequence data before any header on line {lineno}")
        chunks.append("".join(line.split()))
    flush(lineno + 1)
    return records


def parse_fasta(path: Union[str, Path], uppercase: bool = True) -> List[SequenceRecord]:
    with open(path, encoding="utf-8") as handle:
        return parse_fasta_lines(handle, uppercase=uppercase)


def parse_fasta_text(text: str, uppercase: bool = True) -> List[SequenceRecord]:
    return parse_fasta_lines(text.splitlines(), uppercase=uppercase)
