import http.server
import io
import threading

import numpy as np
import pytest

from palinscan import (
    DnaSeq,
    FastaError,
    FastaRecord,
    FetchError,
    fetch_sequence,
    parse_fasta,
    parse_fasta_file,
    reverse_complement,
    serialize_fasta,
)
from palinscan.seqio import decode, encode

from oracles import naive_parse_fasta


class TestDnaSeq:
    def test_from_string_drops_and_counts(self):
        s = DnaSeq.from_string("ACGTNNacgt GAATTC\nxx")
        assert str(s) == "ACGTACGTGAATTC"
        assert s.dropped_count == 4
        assert s.length == len(s) == 14

    def test_whitespace_is_silent(self):
        s = DnaSeq.from_string(" A\tC\rG\nT ")
        assert str(s) == "ACGT"
        assert s.dropped_count == 0

    def test_codes(self):
        assert list(DnaSeq.from_string("ACGT").bases) == [0, 1, 2, 3]
        assert DnaSeq.from_string("ACGT").bases.dtype == np.uint8

    def test_equality_is_content_based(self):
        a = DnaSeq.from_string("ACGT", source_id="x")
        b = DnaSeq.from_string("acgt", source_id="y")
        assert a == b
        assert a != DnaSeq.from_string("ACGA")
        assert a.__eq__("ACGT") is NotImplemented

    def test_rejects_bad_codes(self):
        with pytest.raises(ValueError):
            DnaSeq(bases=np.array([0, 9], dtype=np.uint8))
        with pytest.raises(ValueError):
            DnaSeq(bases=np.zeros((2, 2), dtype=np.uint8))

    def test_empty_sequence_allowed_as_object(self):
        assert DnaSeq.from_string("").length == 0


class TestEncodeDecode:
    def test_round_trip(self):
        text = "GATTACA"
        assert decode(encode(text)) == text

    def test_encode_rejects_junk(self):
        with pytest.raises(ValueError):
            encode("ACGN")


class TestParseFasta:
    def test_matches_naive_reader(self, data_dir):
        text = (data_dir / "mixed.fa").read_text()
        records = parse_fasta(text)
        naive = naive_parse_fasta(text)
        assert [(r.id, str(r.seq)) for r in records] == naive

    def test_mixed_file_details(self, data_dir):
        records = parse_fasta_file(data_dir / "mixed.fa")
        assert [r.id for r in records] == [
            "alpha first record",
            "beta",
            "gamma lone line with junk",
        ]
        assert str(records[0].seq) == "ACGTACGTGAATTCACGT"
        assert records[0].seq.dropped_count == 4
        assert str(records[1].seq) == "TTTTAAAA"
        assert records[2].seq.dropped_count == 4

    def test_accepts_bytes_and_file_objects(self):
        text = ">r\nACGT\n"
        for source in (text, text.encode(), io.StringIO(text), io.BytesIO(text.encode())):
            (rec,) = parse_fasta(source)
            assert str(rec.seq) == "ACGT"

    def test_empty_input(self):
        with pytest.raises(FastaError):
            parse_fasta("   \n ")

    def test_data_before_header(self):
        with pytest.raises(FastaError):
            parse_fasta("ACGT\n>r\nACGT\n")

    def test_empty_header(self):
        with pytest.raises(FastaError):
            parse_fasta(">\nACGT\n")

    def test_record_without_valid_symbols(self):
        with pytest.raises(FastaError):
            parse_fasta(">r\nNNNN\n")

    def test_record_id_required(self):
        with pytest.raises(FastaError):
            FastaRecord(id="", seq=DnaSeq.from_string("ACGT"))


class TestSerializeFasta:
    def test_round_trip(self):
        records = [
            FastaRecord(id="one", seq=DnaSeq.from_string("ACGT" * 40)),
            FastaRecord(id="two words", seq=DnaSeq.from_string("GAATTC")),
        ]
        text = serialize_fasta(records)
        parsed = parse_fasta(text)
        assert [(r.id, str(r.seq)) for r in parsed] == [
            (r.id, str(r.seq)) for r in records
        ]

    def test_line_width(self):
        text = serialize_fasta(
            [FastaRecord(id="x", seq=DnaSeq.from_string("A" * 130))], width=60
        )
        lines = text.splitlines()
        assert [len(x) for x in lines[1:]] == [60, 60, 10]


class TestReverseComplement:
    def test_known_value(self):
        s = DnaSeq.from_string("AACGT")
        assert str(reverse_complement(s)) == "ACGTT"

    def test_involution(self, rng):
        s = DnaSeq(bases=rng.integers(0, 4, size=200).astype(np.uint8))
        assert reverse_complement(reverse_complement(s)) == s

    def test_palindrome_fixed_point(self):
        s = DnaSeq.from_string("GAATTC")
        assert reverse_complement(s) == s


class _Handler(http.server.BaseHTTPRequestHandler):
    hits = 0

    def do_GET(self):
        type(self).hits += 1
        if self.path.endswith("/GOOD1"):
            body = b">GOOD1 test record\nGAATTCACGT\n"
            self.send_response(200)
            self.end_headers()
            self.wfile.write(body)
        elif self.path.endswith("/EMPTY1"):
            self.send_response(200)
            self.end_headers()
            self.wfile.write(b"  \n")
        else:
            self.send_error(404)

    def log_message(self, *args):
        pass


@pytest.fixture()
def local_endpoint():
    server = http.server.HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _Handler.hits = 0
    yield f"http://127.0.0.1:{server.server_port}/fasta"
    server.shutdown()
    thread.join()


class TestFetchSequence:
    def test_fetch_parses_and_caches(self, local_endpoint, tmp_path):
        rec = fetch_sequence("GOOD1", endpoint=local_endpoint, cache_dir=tmp_path)
        assert str(rec.seq) == "GAATTCACGT"
        assert (tmp_path / "GOOD1.fasta").exists()
        assert _Handler.hits == 1
        again = fetch_sequence("GOOD1", endpoint=local_endpoint, cache_dir=tmp_path)
        assert again.seq == rec.seq
        assert _Handler.hits == 1  # served from cache

    def test_env_var_overrides_cache_dir(self, local_endpoint, tmp_path, monkeypatch):
        env_dir = tmp_path / "env-cache"
        monkeypatch.setenv("PALINSCAN_CACHE", str(env_dir))
        fetch_sequence("GOOD1", endpoint=local_endpoint, cache_dir=tmp_path / "other")
        assert (env_dir / "GOOD1.fasta").exists()
        assert not (tmp_path / "other").exists()

    def test_http_error(self, local_endpoint, tmp_path):
        with pytest.raises(FetchError, match="404"):
            fetch_sequence("MISSING1", endpoint=local_endpoint, cache_dir=tmp_path)

    def test_empty_body(self, local_endpoint, tmp_path):
        with pytest.raises(FetchError, match="empty"):
            fetch_sequence("EMPTY1", endpoint=local_endpoint, cache_dir=tmp_path)

    def test_unreachable_host(self, tmp_path):
        with pytest.raises(FetchError):
            fetch_sequence("X1", endpoint="http://127.0.0.1:9/fasta",
                           cache_dir=tmp_path, timeout=0.5)

    def test_unsafe_accession(self, tmp_path):
        with pytest.raises(FetchError, match="unsafe"):
            fetch_sequence("../etc/passwd", cache_dir=tmp_path)
