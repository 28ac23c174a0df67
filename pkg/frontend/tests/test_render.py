"""Rendering tests: schema validation and figure fidelity."""

import xml.etree.ElementTree as ET

import pytest

from plots import FigureSpec, SchemaError, render
from plots.render import read_table


def write_csv(path, header, rows):
    lines = [",".join(header)] + [",".join(str(c) for c in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def spectrum_csv(tmp_path):
    path = tmp_path / "spectrum.csv"
    rows = [(-3.31, 0.0, 3.31, 0, 32), (-1.40, 0.0, 1.40, 1, 32),
            (-0.71, 0.0, 0.71, 2, 32), (0.3, 0.4, 0.5, 3, 32)]
    write_csv(path, ["re", "im", "modulus", "index", "degree"], rows)
    return path


class TestSchema:
    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "convergence.csv"
        write_csv(path, ["n", "dist"], [(0, 0.5)])
        with pytest.raises(SchemaError):
            read_table(path, "convergence")

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "convergence.csv"
        path.write_text("n,distance\n0,0.5,9\n")
        with pytest.raises(SchemaError):
            read_table(path, "convergence")

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "convergence.csv"
        path.write_text("")
        with pytest.raises(SchemaError):
            read_table(path, "convergence")

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(SchemaError):
            read_table(tmp_path / "nope.csv", "convergence")

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(SchemaError):
            FigureSpec(kind="histogram", csv_path=tmp_path / "x.csv",
                       out_path=tmp_path / "x.svg")

    def test_non_numeric_cell_rejected(self, tmp_path):
        path = tmp_path / "convergence.csv"
        write_csv(path, ["n", "distance"], [(0, "tiny")])
        spec = FigureSpec(kind="convergence", csv_path=path,
                          out_path=tmp_path / "c.svg")
        with pytest.raises(SchemaError):
            render(spec)


class TestRender:
    def test_convergence_svg(self, tmp_path):
        path = tmp_path / "convergence.csv"
        write_csv(path, ["n", "distance"],
                  [(n, 0.5 * 0.7 ** n) for n in range(9)])
        out = render(FigureSpec(kind="convergence", csv_path=path,
                                out_path=tmp_path / "c.svg"))
        assert out.exists()
        assert out.read_text().lstrip().startswith("<?xml")

    def test_spectrum_unstable_marker_count(self, spectrum_csv, tmp_path):
        out = render(FigureSpec(kind="spectrum", csv_path=spectrum_csv,
                                out_path=tmp_path / "s.svg"))
        root = ET.parse(out).getroot()
        ns = {"svg": "http://www.w3.org/2000/svg"}
        group = root.findall(".//svg:g[@id='unstable-markers']", ns)
        assert len(group) == 1
        uses = group[0].findall(".//svg:use", ns)
        # moduli 3.31 and 1.40 exceed 1.05; 0.71 and 0.5 do not
        assert len(uses) == 2

    def test_spectrum_no_unstable(self, tmp_path):
        path = tmp_path / "spectrum.csv"
        write_csv(path, ["re", "im", "modulus", "index", "degree"],
                  [(0.5, 0.0, 0.5, 0, 32)])
        out = render(FigureSpec(kind="spectrum", csv_path=path,
                                out_path=tmp_path / "s.svg"))
        root = ET.parse(out).getroot()
        ns = {"svg": "http://www.w3.org/2000/svg"}
        group = root.findall(".//svg:g[@id='unstable-markers']", ns)
        uses = group[0].findall(".//svg:use", ns) if group else []
        assert len(uses) == 0

    def test_partition_svg(self, tmp_path):
        path = tmp_path / "partition.csv"
        write_csv(path, ["index", "lo", "hi", "label"],
                  [(0, 0.0, 0.4, "I_n"), (1, 0.4, 1.0, "I_n+1")])
        out = render(FigureSpec(kind="partition", csv_path=path,
                                out_path=tmp_path / "p.svg"))
        assert out.exists()

    def test_collision_with_excluded_entry(self, tmp_path):
        path = tmp_path / "collision.csv"
        write_csv(path, ["delta", "unstable_count", "angle"],
                  [(0.38, 2, 0.6), (0.2, 2, 0.55), (0.01, -1, "nan")])
        out = render(FigureSpec(kind="collision", csv_path=path,
                                out_path=tmp_path / "a.svg"))
        assert out.exists()
