"""Sequence ingestion: FASTA parsing, remote fetch with caching, complements.

Sequences are stored as uint8 code arrays over the fixed alphabet A=0, C=1,
G=2, T=3, so that the complement of code ``c`` is ``3 - c``.
"""

from __future__ import annotations

import os
import re
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FastaError, FetchError

ALPHABET = "ACGT"
CACHE_ENV_VAR = "PALINSCAN_CACHE"
DEFAULT_ENDPOINT = "https://www.ebi.ac.uk/ena/browser/api/fasta"

# byte -> code lookup; 255 marks a symbol to drop, 254 ignorable whitespace
_CODE = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(ALPHABET):
    _CODE[ord(_c)] = _i
    _CODE[ord(_c.lower())] = _i
for _ws in " \t\r\n\v\f":
    _CODE[ord(_ws)] = 254

_DECODE = np.frombuffer(ALPHABET.encode("ascii"), dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class DnaSeq:
    """A cleaned DNA sequence over {A,C,G,T}.

    Attributes:
        bases: uint8 codes, one per base (A=0, C=1, G=2, T=3).
        source_id: free-text label of where the sequence came from.
        dropped_count: number of non-ACGT symbols removed during cleaning.
    """

    bases: np.ndarray
    source_id: str = ""
    dropped_count: int = 0

    def __post_init__(self):
        b = np.asarray(self.bases, dtype=np.uint8)
        if b.ndim != 1:
            raise ValueError("bases must be a one-dimensional code array")
        if b.size and b.max() > 3:
            raise ValueError("bases contain codes outside 0..3")
        object.__setattr__(self, "bases", b)

    @property
    def length(self) -> int:
        return int(self.bases.size)

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return decode(self.bases)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DnaSeq):
            return NotImplemented
        return (
            self.bases.size == other.bases.size
            and bool(np.all(self.bases == other.bases))
        )

    @classmethod
    def from_string(cls, text: str, source_id: str = "") -> "DnaSeq":
        """Build a sequence from raw text, dropping and counting non-ACGT symbols.

        Whitespace is ignored silently; anything else outside {A,C,G,T}
        (case-insensitive) is removed and tallied in ``dropped_count``.
        """
        raw = np.frombuffer(text.encode("ascii", errors="replace"), dtype=np.uint8)
        codes = _CODE[raw]
        keep = codes <= 3
        dropped = int(np.count_nonzero(codes == 255))
        return cls(bases=codes[keep], source_id=source_id, dropped_count=dropped)


def encode(text: str) -> np.ndarray:
    """Encode an ACGT string (strictly clean) into a uint8 code array."""
    raw = np.frombuffer(text.encode("ascii"), dtype=np.uint8)
    codes = _CODE[raw]
    if codes.size and codes.max() > 3:
        raise ValueError("encode() requires a clean ACGT string")
    return codes


def decode(codes: np.ndarray) -> str:
    """Decode a uint8 code array back into an ACGT string."""
    return _DECODE[np.asarray(codes, dtype=np.uint8)].tobytes().decode("ascii")


@dataclass(frozen=True)
class FastaRecord:
    id: str
    seq: DnaSeq = field(repr=False)

    def __post_init__(self):
        if not self.id:
            raise FastaError("FASTA record id must be non-empty")


def parse_fasta(source) -> list[FastaRecord]:
    """Parse FASTA text into records, cleaning each sequence.

    Args:
        source: bytes, str, or a file-like object yielding either.

    Returns:
        One ``FastaRecord`` per '>' header, in file order. Sequence lines are
        concatenated, upper-cased, and non-ACGT symbols are dropped and
        counted per record.

    Raises:
        FastaError: empty input, sequence data before the first header, or a
            record with zero valid symbols.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        text = source.decode("ascii", errors="replace")
    else:
        text = source

    if not text.strip():
        raise FastaError("empty FASTA input")

    records: list[FastaRecord] = []
    header: str | None = None
    chunks: list[str] = []

    def flush():
        if header is None:
            return
        seq = DnaSeq.from_string("".join(chunks), source_id=header)
        if seq.length == 0:
            raise FastaError(f"record {header!r} has no valid ACGT symbols")
        records.append(FastaRecord(id=header, seq=seq))

    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            flush()
            header = line[1:].strip()
            if not header:
                raise FastaError("FASTA header line with empty id")
            chunks = []
        else:
            if header is None:
                raise FastaError("sequence data before first '>' header")
            chunks.append(line)
    flush()
    return records


def serialize_fasta(records, width: int = 60) -> str:
    """Render records back to FASTA text with fixed-width sequence lines."""
    out: list[str] = []
    for rec in records:
        out.append(f">{rec.id}")
        s = str(rec.seq)
        for i in range(0, len(s), width):
            out.append(s[i : i + width])
    return "\n".join(out) + "\n"


def parse_fasta_file(path) -> list[FastaRecord]:
    with open(path, "rb") as fh:
        return parse_fasta(fh)


def reverse_complement(s: DnaSeq) -> DnaSeq:
    """Reverse-complement: output[i] = complement(s[length-1-i])."""
    rc = (3 - s.bases[::-1]).astype(np.uint8)
    return DnaSeq(bases=rc, source_id=s.source_id, dropped_count=s.dropped_count)


def _cache_path(cache_dir: Path, accession: str) -> Path:
    if not re.fullmatch(r"[A-Za-z0-9._-]+", accession):
        raise FetchError(f"accession {accession!r} contains unsafe characters")
    return cache_dir / f"{accession}.fasta"


def fetch_sequence(
    accession: str,
    endpoint: str = DEFAULT_ENDPOINT,
    cache_dir=None,
    timeout: float = 60.0,
) -> FastaRecord:
    """Fetch a sequence by accession, caching the raw FASTA on disk.

    The URL is ``endpoint`` with ``/accession`` appended. A cached copy (keyed
    by accession) bypasses the network entirely. The PALINSCAN_CACHE
    environment variable, when set, overrides ``cache_dir``; the fallback is
    ``~/.cache/palinscan``. Writes go through a temp file plus atomic rename.

    Raises:
        FetchError: network failure with no cached copy, or unknown accession.
        FastaError: response body is not parseable FASTA.
    """
    env_dir = os.environ.get(CACHE_ENV_VAR)
    if env_dir:
        cache_dir = Path(env_dir)
    elif cache_dir is not None:
        cache_dir = Path(cache_dir)
    else:
        cache_dir = Path.home() / ".cache" / "palinscan"
    cache_dir.mkdir(parents=True, exist_ok=True)

    path = _cache_path(cache_dir, accession)
    if path.exists():
        raw = path.read_bytes()
    else:
        url = endpoint.rstrip("/") + "/" + accession
        try:
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                raw = resp.read()
        except urllib.error.HTTPError as exc:
            raise FetchError(f"accession {accession!r} not found: HTTP {exc.code}") from exc
        except urllib.error.URLError as exc:
            raise FetchError(f"cannot reach {url}: {exc.reason}") from exc
        if not raw.strip():
            raise FetchError(f"empty response body for accession {accession!r}")
        fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".part")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(raw)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    records = parse_fasta(raw)
    return records[0]
