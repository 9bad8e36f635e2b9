"""Facade tests: construction, batch shapes, engine overrides."""

import numpy as np
import pytest

from conftest import HEMOGLOBIN_TEXT, TRAFFIC_TEXT
from shield import (
    EngineMismatchError,
    build_shield_layer,
    build_shield_layer_from_text,
)


class TestConstruction:
    def test_from_file(self, tmp_path):
        path = tmp_path / "traffic.cnf"
        path.write_text(TRAFFIC_TEXT)
        layer = build_shield_layer(4, path)
        assert (layer.dialect, layer.engine, layer.num_variables) == ("cnf", "general", 4)

    def test_describe_fields(self, hemoglobin_layer):
        info = hemoglobin_layer.describe()
        assert info == {
            "dialect": "linear",
            "engine": "linear",
            "num_variables": 4,
            "num_requirements": 2,
            "num_normalized": 2,
            "derived_constraints": 0,
            "ordering": [0, 1, 2, 3],
        }

    def test_engine_override_mismatches(self):
        with pytest.raises(EngineMismatchError):
            build_shield_layer_from_text(TRAFFIC_TEXT, 4, engine="linear")
        with pytest.raises(EngineMismatchError):
            build_shield_layer_from_text(HEMOGLOBIN_TEXT, 4, engine="general")
        with pytest.raises(EngineMismatchError):
            build_shield_layer_from_text("", 4, engine="linear")

    def test_extra_unreferenced_variables_pass_through(self):
        layer = build_shield_layer_from_text("not y_0 or y_1\n", 5)
        out = layer.correct_row([0.9, 0.2, 7.0, -3.0, 0.5])
        assert out == [0.9, 0.9, 7.0, -3.0, 0.5]


class TestBatchShapes:
    def test_single_row_list(self, hemoglobin_layer):
        assert hemoglobin_layer([10.0, 12.0, 38.0, 37.0]) == [10.0, 10.0, 38.0, 37.0]

    def test_list_of_rows(self, hemoglobin_layer):
        batch = [[10.0, 12.0, 38.0, 37.0], [12.0, 10.0, 38.0, 37.0]]
        assert hemoglobin_layer(batch) == [
            [10.0, 10.0, 38.0, 37.0],
            [12.0, 10.0, 38.0, 37.0],
        ]

    def test_numpy_2d(self, traffic_layer):
        batch = np.array([[0.9, 0.4, 0.3, 0.2], [0.9, 0.8, 0.1, 0.2]])
        out = traffic_layer(batch)
        assert isinstance(out, np.ndarray)
        assert out.shape == (2, 4)
        assert np.array_equal(out[0], [0.9, 0.6, 0.3, 0.2])
        assert np.array_equal(out[1], batch[1])

    def test_numpy_1d(self, traffic_layer):
        out = traffic_layer(np.array([0.9, 0.4, 0.3, 0.2]))
        assert out.shape == (4,)
        assert np.array_equal(out, [0.9, 0.6, 0.3, 0.2])

    def test_numpy_3d_leading_dims_preserved(self, hemoglobin_layer):
        batch = np.array(
            [
                [[10.0, 12.0, 38.0, 37.0], [12.0, 10.0, 38.0, 37.0]],
                [[5.0, 9.0, 1.0, 0.0], [3.0, 3.0, 2.0, 2.0]],
            ]
        )
        out = hemoglobin_layer(batch)
        assert out.shape == (2, 2, 4)
        assert np.array_equal(out[0, 0], [10.0, 10.0, 38.0, 37.0])
        assert np.array_equal(out[1, 0], [5.0, 5.0, 1.0, 0.0])

    def test_empty_batch(self, hemoglobin_layer):
        assert hemoglobin_layer([]) == []

    def test_scalar_rejected(self, hemoglobin_layer):
        with pytest.raises(ValueError):
            hemoglobin_layer(np.float64(0.5))
