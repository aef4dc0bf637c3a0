"""Sentence encoders: embedding table loading, averaging, semantic scores."""

from __future__ import annotations

import math

import pytest

from buspo.core import Document, FormatError, plain_tokens
from buspo.encoder import (
    HttpEncoder,
    ProtocolError,
    StaticEncoder,
    cosine_vectors,
    encode,
    encoder_from_spec,
    use_score,
)
from support import FakeResponse, FakeSession


def doc(text, label=0):
    return Document(id="e", tokens=plain_tokens(text), gold_label=label)


def write_table(tmp_path, content):
    path = tmp_path / "emb.txt"
    path.write_text(content, encoding="utf-8")
    return path


class TestStaticEncoderLoading:
    def test_loads_tokens_and_dimension(self, tmp_path):
        enc = StaticEncoder.from_file(
            write_table(tmp_path, "good 1 0 0\nmovie 0 1 0\n")
        )
        assert enc.dimension == 3

    def test_tokens_are_lowercased(self, tmp_path):
        enc = StaticEncoder.from_file(write_table(tmp_path, "GOOD 1 0\n"))
        assert enc.encode_texts(["good"])[0] == [1.0, 0.0]

    def test_comments_and_blanks_skipped(self, tmp_path):
        enc = StaticEncoder.from_file(
            write_table(tmp_path, "# header\n\ngood 1 0\n")
        )
        assert enc.encode_texts(["good"])[0] == [1.0, 0.0]

    def test_duplicate_token_rejected(self, tmp_path):
        path = write_table(tmp_path, "good 1 0\ngood 0 1\n")
        with pytest.raises(FormatError) as err:
            StaticEncoder.from_file(path)
        assert err.value.line_no == 2

    def test_dimension_mismatch_rejected(self, tmp_path):
        path = write_table(tmp_path, "good 1 0\nbad 1 0 0\n")
        with pytest.raises(FormatError):
            StaticEncoder.from_file(path)

    def test_non_numeric_component_rejected(self, tmp_path):
        path = write_table(tmp_path, "good 1 xyz\n")
        with pytest.raises(FormatError):
            StaticEncoder.from_file(path)

    def test_non_finite_component_rejected(self, tmp_path):
        path = write_table(tmp_path, "good 1 inf\n")
        with pytest.raises(FormatError):
            StaticEncoder.from_file(path)

    def test_empty_table_rejected(self, tmp_path):
        path = write_table(tmp_path, "# nothing\n")
        with pytest.raises(FormatError):
            StaticEncoder.from_file(path)

    def test_token_only_line_rejected(self, tmp_path):
        path = write_table(tmp_path, "good\n")
        with pytest.raises(FormatError):
            StaticEncoder.from_file(path)


class TestStaticEncoding:
    @pytest.fixture
    def enc(self, tmp_path):
        return StaticEncoder.from_file(
            write_table(tmp_path, "good 1 0 0 0\nmovie 0 1 0 0\nplot 0 0 2 0\n")
        )

    def test_single_token(self, enc):
        assert enc.encode_texts(["good"])[0] == [1.0, 0.0, 0.0, 0.0]

    def test_mean_of_tokens(self, enc):
        assert enc.encode_texts(["good movie"])[0] == [0.5, 0.5, 0.0, 0.0]

    def test_oov_tokens_skipped(self, enc):
        assert enc.encode_texts(["good zzz movie"])[0] == [0.5, 0.5, 0.0, 0.0]

    def test_all_oov_encodes_to_zero(self, enc):
        assert enc.encode_texts(["zzz qqq"])[0] == [0.0, 0.0, 0.0, 0.0]

    def test_case_insensitive(self, enc):
        assert enc.encode_texts(["Good Movie"])[0] == enc.encode_texts(["good movie"])[0]

    def test_repeated_tokens_weight_the_mean(self, enc):
        got = enc.encode_texts(["good good movie"])[0]
        assert got[0] == pytest.approx(2 / 3, abs=1e-15)

    def test_encode_document_helper(self, enc):
        assert encode(enc, doc("good movie")) == enc.encode_texts(["good movie"])[0]


class TestUseScore:
    @pytest.fixture
    def enc(self, tmp_path):
        return StaticEncoder.from_file(
            write_table(
                tmp_path,
                "cat 1 0 0 0\ndog 0 1 0 0\nlynx 0.3 0.6 0.2 0\nwolf 0 0.9 0.3 0\n",
            )
        )

    def test_identical_documents_score_one(self, enc):
        score = use_score(enc, doc("cat dog"), doc("cat dog"))
        assert abs(score - 1.0) <= 1e-12

    def test_score_matches_manual_cosine(self, enc):
        score = use_score(enc, doc("cat dog"), doc("lynx dog"))
        a = [0.5, 0.5, 0.0, 0.0]
        b = [0.15, 0.8, 0.1, 0.0]
        dot = sum(x * y for x, y in zip(a, b))
        manual = dot / (math.sqrt(sum(x * x for x in a)) * math.sqrt(sum(y * y for y in b)))
        assert score == pytest.approx(manual, abs=1e-15)
        assert score == pytest.approx(0.819148165762531, abs=1e-12)  # mpmath

    def test_symmetry(self, enc):
        assert use_score(enc, doc("cat dog"), doc("lynx dog")) == use_score(
            enc, doc("lynx dog"), doc("cat dog")
        )

    def test_all_oov_text_scores_zero(self, enc):
        assert use_score(enc, doc("cat dog"), doc("qqq zzz")) == 0.0

    def test_smaller_edit_scores_higher(self, enc):
        close = use_score(enc, doc("cat dog"), doc("cat wolf"))
        far = use_score(enc, doc("cat dog"), doc("lynx wolf"))
        assert close > far

    def test_cosine_vectors_on_plain_lists(self):
        assert cosine_vectors([1.0, 0.0], [0.0, 1.0]) == 0.0
        assert abs(cosine_vectors([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]) - 0.7142857142857143) <= 1e-15


def make_http_encoder(script):
    session = FakeSession(script)
    return HttpEncoder("http://encoder.test:9100", session=session), session


class TestHttpEncoder:
    def test_encodes_batch(self):
        enc, session = make_http_encoder(
            {("POST", "/encode"): [FakeResponse(200, {"vectors": [[0.1, 0.2], [0.3, 0.4]]})]}
        )
        vectors = enc.encode_texts(["a", "b"])
        assert vectors == [[0.1, 0.2], [0.3, 0.4]]
        assert enc.dimension == 2
        assert session.calls[-1] == ("POST", "/encode", {"texts": ["a", "b"]})

    def test_vector_count_mismatch(self):
        enc, _ = make_http_encoder(
            {("POST", "/encode"): [FakeResponse(200, {"vectors": [[0.1]]})]}
        )
        with pytest.raises(ProtocolError):
            enc.encode_texts(["a", "b"])

    def test_inconsistent_dimensions_rejected(self):
        enc, _ = make_http_encoder(
            {("POST", "/encode"): [FakeResponse(200, {"vectors": [[0.1, 0.2], [0.3]]})]}
        )
        with pytest.raises(ProtocolError):
            enc.encode_texts(["a", "b"])

    def test_dimension_pinned_across_calls(self):
        enc, _ = make_http_encoder(
            {
                ("POST", "/encode"): [
                    FakeResponse(200, {"vectors": [[0.1, 0.2]]}),
                    FakeResponse(200, {"vectors": [[0.1, 0.2, 0.3]]}),
                ]
            }
        )
        enc.encode_texts(["a"])
        with pytest.raises(ProtocolError):
            enc.encode_texts(["b"])

    def test_non_finite_vector_rejected(self):
        enc, _ = make_http_encoder(
            {("POST", "/encode"): [FakeResponse(200, {"vectors": [[float("nan"), 0.0]]})]}
        )
        with pytest.raises(ProtocolError):
            enc.encode_texts(["a"])

    def test_missing_vectors_key(self):
        enc, _ = make_http_encoder(
            {("POST", "/encode"): [FakeResponse(200, {"data": []})]}
        )
        with pytest.raises(ProtocolError):
            enc.encode_texts(["a"])


class TestEncoderFromSpec:
    def test_static_spec(self, tmp_path):
        path = write_table(tmp_path, "good 1 0\n")
        enc = encoder_from_spec(f"static:{path}")
        assert isinstance(enc, StaticEncoder)

    def test_static_needs_path(self):
        with pytest.raises(ValueError):
            encoder_from_spec("static:")

    def test_http_spec(self):
        enc = encoder_from_spec("http://encoder.test:9100")
        assert isinstance(enc, HttpEncoder)

    def test_unknown_spec(self):
        with pytest.raises(ValueError):
            encoder_from_spec("use:large")
