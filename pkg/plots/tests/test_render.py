import json
import shutil
from pathlib import Path

import pytest

from trajplot import PlotSpec, SchemaError, read_trajectory, render
from trajplot.cli import main as cli_main
from svgcheck import curve_point_counts, curve_vertices, death_marker_indices, svg_text

DATA = Path(__file__).parent / "data"


def spec_for(tmp_path, *inputs, **kwargs):
    out = kwargs.pop("out", tmp_path / "plot.svg")
    return PlotSpec(inputs=tuple(str(p) for p in inputs), out=str(out), **kwargs)


class TestReadTrajectory:
    def test_reads_required_columns(self):
        cols = read_trajectory(DATA / "vacuum.csv")
        assert cols["t"] == pytest.approx([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
        assert cols["E_N"] == [0.0] * 6

    def test_reads_sigma_block(self):
        cols = read_trajectory(DATA / "with_sigma.csv")
        assert len(cols) == 21
        assert cols["s44"] == [0.5, 0.5, 0.5]

    def test_missing_file_named(self, tmp_path):
        with pytest.raises(SchemaError, match="ghost.csv.*no such file"):
            read_trajectory(tmp_path / "ghost.csv")

    def test_missing_column_named(self):
        with pytest.raises(SchemaError, match="broken_missing_column.csv.*'nu_minus'"):
            read_trajectory(DATA / "broken_missing_column.csv")

    def test_bad_cell_names_line_and_column(self):
        with pytest.raises(SchemaError, match="bad_cell.csv: line 3, column 'E_N'"):
            read_trajectory(DATA / "bad_cell.csv")

    def test_ragged_row(self, tmp_path):
        p = tmp_path / "ragged.csv"
        p.write_text("t,E_N,Delta,nu_minus,purity\n0.0,0.0,0.5,0.5\n")
        with pytest.raises(SchemaError, match="line 2: expected 5 fields, got 4"):
            read_trajectory(p)

    def test_non_finite_cell(self, tmp_path):
        p = tmp_path / "nancsv.csv"
        p.write_text("t,E_N,Delta,nu_minus,purity\n0.0,nan,0.5,0.5,1.0\n")
        with pytest.raises(SchemaError, match="column 'E_N': non-finite"):
            read_trajectory(p)

    def test_partial_sigma_block_rejected(self, tmp_path):
        p = tmp_path / "partial.csv"
        p.write_text("t,E_N,Delta,nu_minus,purity,s11,s12\n0,0,0.5,0.5,1,0.5,0\n")
        with pytest.raises(SchemaError, match="partial.csv.*covariance columns"):
            read_trajectory(p)

    def test_empty_and_headerless(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(SchemaError, match="empty file"):
            read_trajectory(p)
        p.write_text("t,E_N,Delta,nu_minus,purity\n")
        with pytest.raises(SchemaError, match="no data rows"):
            read_trajectory(p)


class TestRender:
    def test_flat_vacuum_line(self, tmp_path):
        out = render(spec_for(tmp_path, DATA / "vacuum.csv"))
        assert curve_point_counts(out) == [6]
        ys = {y for _, y in curve_vertices(out, 0)}
        assert len(ys) == 1  # E_N identically zero plots as one flat height

    def test_point_count_matches_rows_with_sigma_present(self, tmp_path):
        out = render(spec_for(tmp_path, DATA / "with_sigma.csv", y="Delta"))
        assert curve_point_counts(out) == [3]

    def test_axis_labels_and_title(self, tmp_path):
        out = render(spec_for(tmp_path, DATA / "vacuum.csv", title="quiet"))
        text = svg_text(out)
        assert "omega2 t" in text
        assert "E_N" in text
        assert "quiet" in text

    def test_legend_prefers_sidecar_label(self, tmp_path):
        csv_path = tmp_path / "run.csv"
        shutil.copy(DATA / "vacuum.csv", csv_path)
        (tmp_path / "run.json").write_text(json.dumps({"label": "g/g_c=0.5"}))
        out = render(spec_for(tmp_path, csv_path))
        assert "g/g_c=0.5" in svg_text(out)

    def test_explicit_label_overrides_sidecar(self, tmp_path):
        csv_path = tmp_path / "run.csv"
        shutil.copy(DATA / "vacuum.csv", csv_path)
        (tmp_path / "run.json").write_text(json.dumps({"label": "from sidecar"}))
        out = render(spec_for(tmp_path, csv_path, labels=("explicit",)))
        text = svg_text(out)
        assert "explicit" in text
        assert "from sidecar" not in text

    def test_label_falls_back_to_stem(self, tmp_path):
        out = render(spec_for(tmp_path, DATA / "vacuum.csv"))
        assert "vacuum" in svg_text(out)

    def test_death_time_marker(self, tmp_path):
        csv_path = tmp_path / "damped.csv"
        shutil.copy(DATA / "vacuum.csv", csv_path)
        (tmp_path / "damped.json").write_text(json.dumps({"death_time": 0.6}))
        out = render(spec_for(tmp_path, csv_path))
        assert death_marker_indices(out) == [0]
        # the marker must not contaminate the curve's own vertex count
        assert curve_point_counts(out) == [6]

    def test_no_marker_on_non_en_plot(self, tmp_path):
        csv_path = tmp_path / "damped.csv"
        shutil.copy(DATA / "vacuum.csv", csv_path)
        (tmp_path / "damped.json").write_text(json.dumps({"death_time": 0.6}))
        out = render(spec_for(tmp_path, csv_path, y="purity"))
        assert death_marker_indices(out) == []

    def test_null_death_time_ignored(self, tmp_path):
        csv_path = tmp_path / "open.csv"
        shutil.copy(DATA / "vacuum.csv", csv_path)
        (tmp_path / "open.json").write_text(json.dumps({"death_time": None}))
        out = render(spec_for(tmp_path, csv_path))
        assert death_marker_indices(out) == []

    def test_malformed_sidecar_downgrades_to_stem(self, tmp_path):
        csv_path = tmp_path / "run.csv"
        shutil.copy(DATA / "vacuum.csv", csv_path)
        (tmp_path / "run.json").write_text("{not json")
        out = render(spec_for(tmp_path, csv_path))
        assert "run" in svg_text(out)

    def test_log_y_keeps_positive_series_complete(self, tmp_path):
        out = render(spec_for(tmp_path, DATA / "with_sigma.csv", y="Delta", log_y=True))
        assert curve_point_counts(out) == [3]

    def test_deterministic_bytes(self, tmp_path):
        a = render(spec_for(tmp_path, DATA / "vacuum.csv", out=tmp_path / "a.svg"))
        b = render(spec_for(tmp_path, DATA / "vacuum.csv", out=tmp_path / "b.svg"))
        assert a.read_bytes() == b.read_bytes()

    def test_png_output(self, tmp_path):
        out = render(spec_for(tmp_path, DATA / "vacuum.csv", out=tmp_path / "p.png"))
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_format_flag_beats_suffix(self, tmp_path):
        out = render(spec_for(tmp_path, DATA / "vacuum.csv", out=tmp_path / "p.svg", fmt="png"))
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_spec_validation(self, tmp_path):
        with pytest.raises(ValueError, match="at least one input"):
            render(PlotSpec(inputs=(), out=str(tmp_path / "x.svg")))
        with pytest.raises(ValueError, match="y must be one of"):
            render(spec_for(tmp_path, DATA / "vacuum.csv", y="nu_minus"))
        with pytest.raises(ValueError, match="2 labels for 1 inputs"):
            render(spec_for(tmp_path, DATA / "vacuum.csv", labels=("a", "b")))


class TestCli:
    def test_render_ok(self, tmp_path, capsys):
        out = tmp_path / "fig.svg"
        code = cli_main(["render", "--out", str(out), str(DATA / "vacuum.csv")])
        assert code == 0
        assert out.is_file()
        assert str(out) in capsys.readouterr().out

    def test_schema_error_exit_1_names_file(self, tmp_path, capsys):
        code = cli_main(
            [
                "render",
                "--out",
                str(tmp_path / "fig.svg"),
                str(DATA / "vacuum.csv"),
                str(DATA / "broken_missing_column.csv"),
            ]
        )
        assert code == 1
        err = capsys.readouterr().err
        assert "broken_missing_column.csv" in err
        assert "nu_minus" in err

    def test_label_count_mismatch_exit_2(self, tmp_path, capsys):
        code = cli_main(
            [
                "render",
                "--out",
                str(tmp_path / "fig.svg"),
                "--label",
                "one",
                "--label",
                "two",
                str(DATA / "vacuum.csv"),
            ]
        )
        assert code == 2
        assert "labels" in capsys.readouterr().err

    def test_usage_errors_exit_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            cli_main(["render", "--out", str(tmp_path / "f.svg"), "--y", "s11", str(DATA / "vacuum.csv")])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            cli_main(["render", "--out", str(tmp_path / "f.svg")])
        assert exc.value.code == 2
