import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biaslens.embed_store import (
    EmbeddingBank,
    EmbeddingTable,
    load_bank,
    load_swe,
    lookup,
    lookup_many,
    write_bank,
)
from biaslens.errors import (
    CorruptionError,
    FormatError,
    MissingWordError,
    ValidationError,
)

from conftest import make_bank


class TestLoadSwe:
    def test_two_line_file(self, tmp_path):
        p = tmp_path / "glove.txt"
        p.write_text("a 1 0\nb 0 1\n")
        table = load_swe(p)
        assert table.dimension == 2
        assert len(table) == 2
        assert np.array_equal(table.entries["a"], [1.0, 0.0])

    def test_vocab_filter(self, tmp_path):
        p = tmp_path / "glove.txt"
        p.write_text("a 1 0\nb 0 1\n")
        table = load_swe(p, vocab_filter={"a"})
        assert set(table.entries) == {"a"}

    def test_duplicate_word(self, tmp_path):
        p = tmp_path / "glove.txt"
        p.write_text("a 1 0\na 0 1\n")
        with pytest.raises(FormatError):
            load_swe(p)

    def test_inconsistent_dimension(self, tmp_path):
        p = tmp_path / "glove.txt"
        p.write_text("a 1 0\nb 0 1 2\n")
        with pytest.raises(FormatError):
            load_swe(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "glove.txt"
        p.write_text("")
        with pytest.raises(FormatError):
            load_swe(p)

    def test_unparsable_component(self, tmp_path):
        p = tmp_path / "glove.txt"
        p.write_text("a 1 oops\n")
        with pytest.raises(FormatError):
            load_swe(p)

    def test_nan_component_rejected(self, tmp_path):
        p = tmp_path / "glove.txt"
        p.write_text("a 1 nan\n")
        with pytest.raises(ValidationError):
            load_swe(p)

    def test_line_order_irrelevant(self, tmp_path):
        lines = ["a 1 2", "b 3 4", "c 5 6"]
        p1, p2 = tmp_path / "fwd.txt", tmp_path / "rev.txt"
        p1.write_text("\n".join(lines) + "\n")
        p2.write_text("\n".join(reversed(lines)) + "\n")
        t1, t2 = load_swe(p1), load_swe(p2)
        assert set(t1.entries) == set(t2.entries)
        for w in t1.entries:
            assert np.array_equal(t1.entries[w], t2.entries[w])


class TestLookup:
    def test_hit(self):
        t = EmbeddingTable(dimension=2, entries={"a": np.array([1.0, 0.0])})
        assert np.array_equal(lookup(t, "a"), [1.0, 0.0])

    def test_case_sensitive(self):
        t = EmbeddingTable(dimension=2, entries={"a": np.array([1.0, 0.0])})
        with pytest.raises(MissingWordError):
            lookup(t, "A")

    def test_empty_table(self):
        t = EmbeddingTable(dimension=2, entries={})
        with pytest.raises(MissingWordError):
            lookup(t, "x")

    def test_lookup_many_reports_all_missing(self):
        t = EmbeddingTable(dimension=2, entries={"a": np.array([1.0, 0.0])})
        with pytest.raises(MissingWordError) as exc:
            lookup_many(t, ["a", "b", "c"])
        assert exc.value.words == ["b", "c"]


class TestTableInvariants:
    def test_nonfinite_rejected(self):
        with pytest.raises(ValidationError):
            EmbeddingTable(dimension=2, entries={"a": np.array([1.0, np.nan])})

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            EmbeddingTable(dimension=3, entries={"a": np.array([1.0, 0.0])})

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValidationError):
            EmbeddingTable(dimension=0, entries={})


class TestBankRoundTrip:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        bank = make_bank(
            {
                "cook": rng.standard_normal((2, 3)).astype(np.float32).astype(np.float64),
                "art": rng.standard_normal((5, 3)).astype(np.float32).astype(np.float64),
            },
            model_id="m1",
        )
        write_bank(bank, tmp_path / "bank")
        loaded = load_bank(tmp_path / "bank")
        assert loaded.dimension == bank.dimension
        assert loaded.model_id == "m1"
        assert set(loaded.stimuli) == set(bank.stimuli)
        for w in bank.stimuli:
            assert np.array_equal(
                loaded.stimuli[w], bank.stimuli[w].astype(np.float32)
            )
            assert loaded.sentence_ids[w] == bank.sentence_ids[w]

    def test_count_from_byte_length(self, tmp_path):
        bank = make_bank({"cook": np.ones((2, 3))})
        write_bank(bank, tmp_path / "bank")
        assert load_bank(tmp_path / "bank").count("cook") == 2

    def test_truncated_vector_file_is_corruption(self, tmp_path):
        bank = make_bank({"cook": np.ones((2, 3))})
        write_bank(bank, tmp_path / "bank")
        vec = tmp_path / "bank" / "vectors_00000.f32"
        vec.write_bytes(vec.read_bytes()[:-1])  # 23 of 24 bytes
        with pytest.raises(CorruptionError):
            load_bank(tmp_path / "bank")

    def test_missing_vector_file_is_format_error(self, tmp_path):
        bank = make_bank({"cook": np.ones((2, 3))})
        write_bank(bank, tmp_path / "bank")
        (tmp_path / "bank" / "vectors_00000.f32").unlink()
        with pytest.raises(FormatError):
            load_bank(tmp_path / "bank")

    def test_missing_manifest(self, tmp_path):
        (tmp_path / "bank").mkdir()
        with pytest.raises(FormatError):
            load_bank(tmp_path / "bank")

    def test_bad_manifest_json(self, tmp_path):
        (tmp_path / "bank").mkdir()
        (tmp_path / "bank" / "manifest.json").write_text("{nope")
        with pytest.raises(FormatError):
            load_bank(tmp_path / "bank")

    def test_unknown_format_version(self, tmp_path):
        bank = make_bank({"cook": np.ones((1, 3))})
        write_bank(bank, tmp_path / "bank")
        manifest = tmp_path / "bank" / "manifest.json"
        manifest.write_text(manifest.read_text().replace('"format_version": 1', '"format_version": 99'))
        with pytest.raises(FormatError):
            load_bank(tmp_path / "bank")


class TestBankInvariants:
    def test_nan_vector_rejected(self):
        with pytest.raises(ValidationError):
            make_bank({"cook": np.array([[1.0, np.nan]])})

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValidationError):
            EmbeddingBank(dimension=0, model_id="m", stimuli={}, sentence_ids={})

    def test_sentence_id_count_mismatch(self):
        with pytest.raises(ValidationError):
            EmbeddingBank(
                dimension=2,
                model_id="m",
                stimuli={"w": np.ones((2, 2))},
                sentence_ids={"w": ["only-one"]},
            )


bank_contents = st.dictionaries(
    st.text(alphabet="abcdefgh", min_size=1, max_size=6),
    st.integers(min_value=1, max_value=4),
    min_size=1,
    max_size=4,
)


@settings(max_examples=25, deadline=None)
@given(bank_contents, st.integers(min_value=1, max_value=5), st.integers(0, 2**31))
def test_round_trip_property(tmp_path_factory, counts, dim, seed):
    rng = np.random.default_rng(seed)
    stim = {
        w: rng.standard_normal((n, dim)).astype(np.float32).astype(np.float64)
        for w, n in counts.items()
    }
    bank = make_bank(stim)
    path = tmp_path_factory.mktemp("bank")
    write_bank(bank, path)
    loaded = load_bank(path)
    assert loaded.dimension == bank.dimension
    for w in stim:
        assert np.array_equal(loaded.stimuli[w], stim[w].astype(np.float32))
