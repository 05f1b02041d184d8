import json
import unicodedata

import pytest

from biaslens.errors import ParameterError
from biaslens.stimuli import (
    BUILTIN_TEST_IDS,
    CELL_ALIASES,
    _load_data,
    balance_attributes,
    builtin_grid,
    builtin_test,
    group_names,
    resolve_cell,
    validation_group_label,
    validation_set,
)

POOL_SIZE = 98


class TestBuiltinTests:
    def test_i4_attribute_set(self):
        assert builtin_test("I4").A == (
            "cook",
            "curvy",
            "feisty",
            "maids",
            "promiscuous",
            "sexy",
        )

    def test_i1_excludes_assertive(self):
        spec = builtin_test("I1")
        assert "assertive" not in spec.A
        assert "assertive" not in spec.B
        assert "assertive" in validation_set().exclusions["I1"]

    def test_i3_target_head(self):
        assert builtin_test("I3").X[:3] == ("Adriana", "Alejandra", "Alma")

    def test_attribute_sets_balanced(self):
        for test_id in BUILTIN_TEST_IDS:
            spec = builtin_test(test_id)
            assert len(spec.A) == len(spec.B)
            assert len(spec.X) == len(spec.Y) == 12

    def test_unknown_id(self):
        with pytest.raises(ParameterError):
            builtin_test("I9")


class TestValidationSet:
    def test_pool_size(self):
        assert len(validation_set().pool()) == POOL_SIZE

    def test_af_intersectional_rate(self):
        vs = validation_set()
        assert vs.random_chance["Intersectional Biases of African American Females"] == 0.143

    def test_mf_emergent_rate(self):
        assert (
            validation_set().random_chance[
                "Emergent Intersectional Biases of Mexican American Females"
            ]
            == 0.061
        )

    def test_ea_female_emergent_is_ditsy(self):
        words = validation_set().attributes[
            "Emergent Intersectional Biases of European American Females"
        ]
        assert words == ("ditsy",)

    def test_insects_rate(self):
        assert validation_set().random_chance["Random (Insects)"] == 0.255

    def test_rates_are_group_share_of_pool(self):
        vs = validation_set()
        for label, words in vs.attributes.items():
            assert vs.random_chance[label] == round(len(words) / POOL_SIZE, 3)

    def test_labels_cover_pool(self):
        vs = validation_set()
        labels = vs.labels_for("Biases of Females")
        assert set(labels) == set(vs.pool())
        assert sum(labels.values()) == len(vs.attributes["Biases of Females"])

    def test_unknown_group(self):
        with pytest.raises(ParameterError):
            validation_set().labels_for("Biases of Nobody")


class TestNames:
    def test_twelve_names_per_cell(self):
        for alias in CELL_ALIASES:
            assert len(group_names(alias)) == 12

    def test_alias_and_full_id_agree(self):
        assert group_names("AF") == group_names("african|female")

    def test_accented_names_are_nfc(self):
        for cell in CELL_ALIASES.values():
            for name in group_names(cell):
                assert name == unicodedata.normalize("NFC", name)

    def test_mexican_male_has_accented_names(self):
        names = group_names("MM")
        assert {"César", "Jesús", "José"} <= set(names)

    def test_unknown_cell(self):
        with pytest.raises(ParameterError):
            group_names("XX")

    def test_grid_uses_bundled_names(self):
        grid = builtin_grid()
        assert grid.category_names == ("race", "gender")
        assert grid.names("african|female") == group_names("AF")
        assert len(grid.cells()) == 6


class TestLabels:
    def test_intersectional_label(self):
        assert (
            validation_group_label("AF")
            == "Intersectional Biases of African American Females"
        )

    def test_emergent_label(self):
        assert (
            validation_group_label("mexican|female", emergent=True)
            == "Emergent Intersectional Biases of Mexican American Females"
        )

    def test_all_cell_labels_exist_in_validation_set(self):
        vs = validation_set()
        for alias in CELL_ALIASES:
            for emergent in (False, True):
                assert validation_group_label(alias, emergent=emergent) in vs.attributes

    def test_resolve_cell_passthrough(self):
        assert resolve_cell("african|female") == "african|female"
        assert resolve_cell("EM") == "european|male"


class TestBalanceAttributes:
    def test_trims_longer_side(self):
        a, b, record = balance_attributes(["p", "q", "r"], ["s"], seed=0)
        assert len(a) == len(b) == 1
        assert len(record["dropped_from_a"]) == 2
        assert record["dropped_from_b"] == []

    def test_equal_sets_untouched(self):
        a, b, record = balance_attributes(["p"], ["q"], seed=0)
        assert a == ("p",) and b == ("q",)
        assert record["dropped_from_a"] == record["dropped_from_b"] == []

    def test_deterministic(self):
        first = balance_attributes(list("abcdef"), list("xy"), seed=3)
        second = balance_attributes(list("abcdef"), list("xy"), seed=3)
        assert first == second


class TestDataOverride:
    def test_env_var_redirects_data_dir(self, tmp_path, monkeypatch):
        data = dict(_load_data())
        data["names"] = {
            cell: list(names) for cell, names in data["names"].items()
        }
        data["names"]["african|female"][0] = "Zelda"
        (tmp_path / "stimuli_v1.json").write_text(
            json.dumps(data), encoding="utf-8"
        )
        monkeypatch.setenv("BIASLENS_DATA", str(tmp_path))
        _load_data.cache_clear()
        try:
            assert group_names("AF")[0] == "Zelda"
        finally:
            _load_data.cache_clear()
