import csv

import numpy as np
import pytest

from distspec.dataio import (
    ColumnSchema,
    encode_autompg,
    load_csv,
    read_autompg,
    standardize,
    write_dataset_csv,
    write_power_curves,
)
from distspec.errors import DataError
from distspec.model import DataSet
from distspec.simulation import PowerRow, PowerTable

# five rows in the UCI layout; the fourth has an unknown horsepower
UCI_ROWS = """\
18.0   8   307.0      130.0      3504.      12.0   70  1\t"chevrolet chevelle malibu"
26.0   4   97.00      46.00      1835.      20.5   70  2\t"volkswagen 1131 deluxe sedan"
24.0   4   113.0      95.00      2372.      15.0   70  3\t"toyota corona mark ii"
25.0   4   98.00      ?          2046.      19.0   71  1\t"ford pinto"
31.0   4   71.00      65.00      1773.      19.0   71  3\t"toyota corolla 1200"
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadCsv:
    def test_three_rows(self, tmp_path):
        path = write(tmp_path, "d.csv", "y,a,b\n1,2,3\n4,5,6\n7,8,10\n")
        d = load_csv(path, ColumnSchema("y"))
        assert d.n == 3 and d.names == ("a", "b")
        np.testing.assert_array_equal(d.X, [[2, 3], [5, 6], [8, 10]])
        np.testing.assert_array_equal(d.y, [1, 4, 7])

    def test_schema_column_order(self, tmp_path):
        path = write(tmp_path, "d.csv", "a,y,b\n1,2,3\n4,5,6\n")
        d = load_csv(path, ColumnSchema("y", ("b", "a")))
        np.testing.assert_array_equal(d.X, [[3, 1], [6, 4]])

    def test_missing_column_named(self, tmp_path):
        path = write(tmp_path, "d.csv", "y,a\n1,2\n3,4\n")
        with pytest.raises(DataError, match="weight"):
            load_csv(path, ColumnSchema("y", ("a", "weight")))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(tmp_path / "nope.csv", ColumnSchema("y"))

    def test_whitespace_delimiter_and_dropping(self, tmp_path):
        path = write(tmp_path, "d.txt", "y a b\n1 2 3\n4 ? 6\n7 8 9\n")
        d, dropped = load_csv(path, ColumnSchema("y"), return_dropped=True)
        assert dropped == 1 and d.n == 2

    def test_empty_after_drop(self, tmp_path):
        path = write(tmp_path, "d.csv", "y,a\n?,1\n2,NA\n")
        with pytest.raises(DataError, match="no complete rows"):
            load_csv(path, ColumnSchema("y"))

    def test_categorical_dummies(self, tmp_path):
        path = write(tmp_path, "d.csv", "y,x,g\n1,0,u\n2,1,v\n3,2,w\n4,3,u\n")
        d = load_csv(path, ColumnSchema("y", ("x", "g"), {"g": "u"}))
        assert d.names == ("x", "g=v", "g=w")
        np.testing.assert_array_equal(d.X[:, 1:], [[0, 0], [1, 0], [0, 1], [0, 0]])

    def test_response_not_predictor(self):
        with pytest.raises(DataError):
            ColumnSchema("y", ("y", "x"))

    def test_round_trip(self, tmp_path, rng):
        d = DataSet(rng.standard_normal((25, 3)) * 1e3, rng.standard_normal(25), ("p", "q", "r"), "resp")
        path = tmp_path / "rt.csv"
        write_dataset_csv(d, path)
        back = load_csv(path, ColumnSchema("resp"))
        np.testing.assert_array_equal(back.X, d.X)
        np.testing.assert_array_equal(back.y, d.y)
        assert back.names == d.names


class TestStandardize:
    def test_one_two_three(self):
        d = standardize(DataSet([1.0, 2.0, 3.0], [0.0, 0.0, 1.0]))
        np.testing.assert_allclose(d.X[:, 0], [-1.0, 0.0, 1.0], atol=1e-15)

    def test_moments_and_idempotence(self, rng):
        d = standardize(DataSet(rng.normal(5, 3, (40, 3)), rng.standard_normal(40)))
        np.testing.assert_allclose(d.X.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(d.X.std(axis=0, ddof=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(standardize(d).X, d.X, atol=1e-12)

    def test_response_untouched_by_default(self, rng):
        y = rng.normal(10, 2, 20)
        np.testing.assert_array_equal(standardize(DataSet(rng.standard_normal((20, 2)), y)).y, y)

    def test_constant_column(self):
        with pytest.raises(DataError, match="zero variance"):
            standardize(DataSet([[1.0, 2.0], [1.0, 3.0], [1.0, 5.0]], [0.0, 1.0, 2.0]))


class TestAutoMpg:
    def test_uci_layout(self, tmp_path):
        rows = read_autompg(write(tmp_path, "auto-mpg.data", UCI_ROWS))
        assert len(rows) == 5
        assert rows[0]["car_name"] == "chevrolet chevelle malibu"
        d, dropped = encode_autompg(rows, return_dropped=True)
        assert dropped == 1 and d.n == 4 and d.p == 8
        assert d.names[-2:] == ("origin_america", "origin_europe")
        np.testing.assert_array_equal(d.X[:, 6:], [[1, 0], [0, 1], [0, 0], [0, 0]])
        np.testing.assert_allclose(d.X[:, :6].std(axis=0, ddof=1), 1.0)
        np.testing.assert_array_equal(d.y, [18.0, 26.0, 24.0, 31.0])

    def test_dummy_pair_at_most_one(self, tmp_path):
        d = encode_autompg(read_autompg(write(tmp_path, "a.data", UCI_ROWS)))
        assert (d.X[:, 6] + d.X[:, 7] <= 1).all()

    def test_headered_file(self, tmp_path):
        text = "mpg,cylinders,displacement,horsepower,weight,acceleration,model year,origin\n"
        text += "18,8,307,130,3504,12,70,1\n26,4,97,46,1835,20.5,71,2\n24,4,113,95,2372,15,72,3\n"
        d = encode_autompg(read_autompg(write(tmp_path, "a.csv", text)))
        assert d.n == 3 and d.p == 8

    def test_unknown_origin(self, tmp_path):
        bad = UCI_ROWS.replace("70  3\t", "70  4\t")
        with pytest.raises(DataError, match="origin"):
            encode_autompg(read_autompg(write(tmp_path, "a.data", bad)))


def test_power_curves(tmp_path):
    rows = [
        PowerRow(1, 2, a, 200, stat, reps=10, rejections=k)
        for stat in ("tn", "stute")
        for a, k in ((0.4, 5), (0.0, 1))
    ]
    paths = write_power_curves(PowerTable(rows), tmp_path)
    assert len(paths) == 2
    with open(paths[0]) as fh:
        got = list(csv.reader(fh))
    assert got == [["a", "rate"], ["0.0", "0.1"], ["0.4", "0.5"]]
