import numpy as np
import pytest

from gpd.errors import DataFormatError
from gpd.io import format_value, load_edge_list, load_signals, write_csv


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestEdgeList:
    def test_basic_load_symmetrizes(self, tmp_path):
        path = write(tmp_path, "g.csv", "src,dst,weight\n0,1,2.0\n1,2,1.0\n")
        g = load_edge_list(path)
        assert g.n_nodes == 3
        assert g.adjacency[0, 1] == 2.0 and g.adjacency[1, 0] == 2.0
        assert g.adjacency[1, 2] == 1.0 and g.adjacency[2, 1] == 1.0

    def test_default_weight(self, tmp_path):
        path = write(tmp_path, "g.csv", "src,dst\n0,1\n")
        g = load_edge_list(path)
        assert g.adjacency[0, 1] == 1.0

    def test_bad_header(self, tmp_path):
        path = write(tmp_path, "g.csv", "from,to\n0,1\n")
        with pytest.raises(DataFormatError, match="line 1"):
            load_edge_list(path)

    def test_self_loop_line_number(self, tmp_path):
        path = write(tmp_path, "g.csv", "src,dst\n0,1\n2,2\n")
        with pytest.raises(DataFormatError, match="line 3"):
            load_edge_list(path)

    def test_non_numeric_field(self, tmp_path):
        path = write(tmp_path, "g.csv", "src,dst,weight\n0,one,1.0\n")
        with pytest.raises(DataFormatError, match="line 2"):
            load_edge_list(path)

    def test_negative_weight(self, tmp_path):
        path = write(tmp_path, "g.csv", "src,dst,weight\n0,1,-3\n")
        with pytest.raises(DataFormatError, match="negative"):
            load_edge_list(path)


class TestSignals:
    def test_single_column(self, tmp_path):
        path = write(tmp_path, "s.csv", "node,value\n1,2.5\n0,1.5\n")
        names, values = load_signals(path)
        assert names == ["value"]
        assert np.array_equal(values[:, 0], [1.5, 2.5])

    def test_multi_column(self, tmp_path):
        path = write(tmp_path, "s.csv", "node,sig_0,sig_1\n0,1,4\n1,2,5\n2,3,6\n")
        names, values = load_signals(path)
        assert names == ["sig_0", "sig_1"]
        assert values.shape == (3, 2)

    def test_missing_node(self, tmp_path):
        path = write(tmp_path, "s.csv", "node,value\n0,1\n2,3\n")
        with pytest.raises(DataFormatError, match="missing"):
            load_signals(path)

    def test_duplicate_node(self, tmp_path):
        path = write(tmp_path, "s.csv", "node,value\n0,1\n0,2\n")
        with pytest.raises(DataFormatError, match="duplicate"):
            load_signals(path)


class TestCsvWriter:
    def test_schema_validated(self, tmp_path):
        with pytest.raises(ValueError, match="header"):
            write_csv(tmp_path / "x.csv", ("a", "b"), [(1, 2, 3)])

    def test_float_formatting_round_trips(self, tmp_path):
        path = write_csv(tmp_path / "x.csv", ("a",), [(0.1,), (1.0 / 3.0,)])
        lines = path.read_text().splitlines()
        assert lines[1] == "0.1"
        assert float(lines[2]) == 1.0 / 3.0

    def test_format_value_rejects_breaking_text(self):
        with pytest.raises(ValueError):
            format_value("a,b")
        assert format_value(3) == "3"
        assert format_value(np.float64(0.25)) == "0.25"
