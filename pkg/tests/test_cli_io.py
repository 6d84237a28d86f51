import math

import pytest

from wedgese import cli_io, specfun, wedge_rates
from wedgese.cli import main
from wedgese.cli_io import (
    CSV_HEADER,
    ScanRow,
    ScanSpec,
    UsageError,
    figure_preset,
    format_number,
    jump_metrics,
    load_config,
    run_scan,
    run_verify,
    write_csv,
)

# 1.5 * (2/3 - G_par(10)) at 50 digits
POINT_RATE_Z = 1.0933732079032182041


def by_name(report, prefix):
    return next(c for c in report.checks if c.name.startswith(prefix))


class TestRunScan:
    def test_point(self):
        rows = run_scan(ScanSpec(1, "point", (5.0, 5.0, 1), (math.pi / 2,) * 2 + (1,),
                                 dipole_weights=(0, 0, 1)))
        assert len(rows) == 1
        assert rows[0].rate_z == pytest.approx(POINT_RATE_Z, abs=1e-14)
        assert rows[0].rate_total == rows[0].rate_z

    def test_bisector(self):
        rows = run_scan(ScanSpec(3, "bisector", (0.0, 12.0, 5)))
        assert len(rows) == 5
        assert all(r.phi == pytest.approx(math.pi / 6, abs=1e-15) for r in rows)
        assert [r.x for r in rows] == [0.0, 3.0, 6.0, 9.0, 12.0]

    def test_surface_order_and_size(self):
        rows = run_scan(ScanSpec(3, "surface", (0.0, 4.0, 7), (0.0, math.pi / 3, 5)))
        assert len(rows) == 35
        assert [r.x for r in rows[:5]] == [0.0] * 5
        assert rows[5].x > 0.0 and rows[5].phi == 0.0

    def test_total_is_weighted_sum(self):
        w = (0.2, 0.5, 0.3)
        for r in run_scan(ScanSpec(4, "radial", (0.0, 9.0, 31), (0.3, 0.3, 1), dipole_weights=w)):
            assert r.rate_total == pytest.approx(w[0] * r.rate_rho + w[1] * r.rate_phi + w[2] * r.rate_z,
                                                 abs=1e-15)

    def test_rates_match_library(self):
        geom = wedge_rates.WedgeGeometry(5)
        for r in run_scan(ScanSpec(5, "angular", (2.5, 2.5, 1), (0.0, geom.alpha, 9))):
            res = wedge_rates.normalized_rates(geom, wedge_rates.AtomPosition(r.x, r.phi))
            assert (r.rate_rho, r.rate_phi, r.rate_z) == pytest.approx(
                (res.norm_rho, res.norm_phi, res.norm_z), abs=1e-14)

    def test_threads_do_not_change_result(self):
        spec = ScanSpec(6, "surface", (0.0, 30.0, 57), (0.0, math.pi / 6, 13))
        assert run_scan(spec, threads=1) == run_scan(spec, threads=3) == run_scan(spec, threads=8)

    @pytest.mark.parametrize("spec, field", [
        (ScanSpec(2.5, "radial", (0, 1, 3), (0.1, 0.1, 1)), "q"),
        (ScanSpec(2, "spiral", (0, 1, 3), (0.1, 0.1, 1)), "mode"),
        (ScanSpec(2, "radial", (2, 1, 3), (0.1, 0.1, 1)), "x_range"),
        (ScanSpec(2, "radial", (-1, 1, 3), (0.1, 0.1, 1)), "x_range"),
        (ScanSpec(2, "radial", (0, 1, 0), (0.1, 0.1, 1)), "x_range"),
        (ScanSpec(2, "radial", (0, 1, 3), (0.1, 2.0, 4)), "phi_range"),
        (ScanSpec(2, "radial", (0, 1, 3)), "phi_range"),
        (ScanSpec(2, "point", (0, 1, 3), (0.1, 0.1, 1)), "x_range"),
        (ScanSpec(2, "radial", (0, 1, 3), (0.1, 0.1, 1), polarizations=("x",)), "polarizations"),
        (ScanSpec(2, "radial", (0, 1, 3), (0.1, 0.1, 1), dipole_weights=(1, 1, 1)), "dipole_weights"),
    ])
    def test_usage_errors_name_the_field(self, spec, field):
        with pytest.raises(UsageError) as exc:
            run_scan(spec)
        assert exc.value.field == field


class TestPresets:
    def test_fig2(self):
        spec = figure_preset(2)
        assert (spec.q, spec.mode, spec.polarizations) == (3, "surface", ("z",))

    def test_fig3(self):
        spec = figure_preset(3)
        assert (spec.q, spec.polarizations) == (3, ("phi",))
        assert spec.x_range == figure_preset(2).x_range

    @pytest.mark.parametrize("q", [None, 30, 60, 90])
    def test_fig6(self, q):
        spec = figure_preset(6, q)
        assert spec.mode == "bisector"
        assert spec.dipole_weights == (0.5, 0.0, 0.5)
        assert spec.x_range[1] == 4 * spec.q
        assert spec.q == (q or 60)

    @pytest.mark.parametrize("fig_id, q", [(4, None), (6, 45), (2, 4)])
    def test_rejects(self, fig_id, q):
        with pytest.raises(UsageError):
            figure_preset(fig_id, q)

    def test_jump_metrics_need_windows(self):
        rows = run_scan(ScanSpec(30, "bisector", (0.0, 10.0, 11)))
        with pytest.raises(UsageError):
            jump_metrics(rows, 30)


class TestCsv:
    ROW = ScanRow(1.5, 0.25, 0.5, 1.0, 2.0, -0.0)

    def test_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_csv([], path)
        assert path.read_bytes() == (CSV_HEADER + "\n").encode()

    def test_one_row(self, tmp_path):
        path = tmp_path / "one.csv"
        write_csv([self.ROW], path)
        lines = path.read_bytes().decode("utf-8").split("\n")
        assert lines[0] == CSV_HEADER
        assert lines[1] == ("1.50000000000,0.250000000000,0.500000000000,"
                            "1.00000000000,2.00000000000,0.00000000000")
        assert lines[2:] == [""]

    def test_rewrite_is_byte_identical(self, tmp_path):
        rows = run_scan(ScanSpec(3, "surface", (0.0, 5.0, 9), (0.0, 1.0, 4)))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(rows, a)
        write_csv(rows, b)
        assert a.read_bytes() == b.read_bytes()
        assert b"\r" not in a.read_bytes()
        assert not any(line.endswith(",") for line in a.read_text().splitlines())

    @pytest.mark.parametrize("v, text", [
        (0.0, "0.00000000000"), (3.0, "3.00000000000"), (1e-20, "1.00000000000e-20"),
        (-2.5, "-2.50000000000"), (1 / 3, "0.333333333333"),
    ])
    def test_number_format(self, v, text):
        assert format_number(v) == text

    def test_io_failure(self, tmp_path):
        with pytest.raises(OSError):
            write_csv([], tmp_path / "missing" / "x.csv")


class TestConfig:
    def test_flat_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# defaults\nq = 4\nx = 2.5  # inline\nphi-frac = 0.5\n")
        assert load_config(cfg) == {"q": "4", "x": "2.5", "phi_frac": "0.5"}

    def test_flags_override_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("q = 4\nx = 2.5\nphi_frac = 0.5\npol = z\n")
        assert main(["rate", "--config", str(cfg)]) == 0
        from_file = float(capsys.readouterr().out)
        assert main(["rate", "--config", str(cfg), "--q", "2"]) == 0
        overridden = float(capsys.readouterr().out)
        geom = wedge_rates.WedgeGeometry(2)
        want = 1.5 * wedge_rates.braces_z(geom, wedge_rates.AtomPosition(2.5, geom.alpha / 2))
        assert overridden == pytest.approx(want, rel=1e-11)
        assert from_file != overridden

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("colour = blue\n")
        assert main(["rate", "--config", str(cfg)]) == 1


class TestCli:
    def test_rate_csv(self, capsys):
        assert main(["rate", "--q", "3", "--x", "2", "--phi-frac", "0.5"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 2

    def test_rate_single_value(self, capsys):
        assert main(["rate", "--q", "1", "--x", "5", "--phi", str(math.pi / 2), "--pol", "z"]) == 0
        assert capsys.readouterr().out.strip() == format_number(POINT_RATE_Z)

    def test_rate_oracle_agrees(self, capsys):
        args = ["rate", "--q", "2", "--x", "5", "--phi-frac", "0.5", "--pol", "rho"]
        assert main(args) == 0
        closed = float(capsys.readouterr().out)
        assert main(args + ["--oracle"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(closed, abs=1.5e-6)

    def test_scan_and_surface_counts(self, capsys):
        assert main(["scan", "--q", "3", "--mode", "bisector", "--x-range", "0,12,5"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 6
        assert main(["scan", "--q", "3", "--mode", "angular", "--x", "2",
                     "--phi-range-frac", "0,1,11"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 12
        assert main(["surface", "--q", "2", "--x-range", "0,3,4", "--phi-range-frac", "0,1,3"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 13

    def test_figure_threads_byte_identical(self, tmp_path):
        one, four = tmp_path / "t1.csv", tmp_path / "t4.csv"
        assert main(["figure", "6", "--threads", "1", "--out", str(one)]) == 0
        assert main(["figure", "6", "--threads", "4", "--out", str(four)]) == 0
        assert one.read_bytes() == four.read_bytes()

    def test_figure_all_q(self, tmp_path):
        assert main(["figure", "6", "--all-q", "--out", str(tmp_path / "fig6.csv")]) == 0
        for q in (30, 60, 90):
            assert (tmp_path / f"fig6_q{q}.csv").read_text().startswith(CSV_HEADER)

    @pytest.mark.parametrize("argv", [
        ["rate", "--q", "0", "--x", "1", "--phi", "0"],
        ["rate", "--q", "3", "--x", "1", "--phi", "2.0"],
        ["rate", "--q", "3", "--x", "-1", "--phi", "0.1"],
        ["rate", "--q", "3", "--phi", "0.1"],
        ["rate", "--q", "3", "--x", "1", "--phi", "0.1", "--weights", "1,1,1"],
        ["scan", "--q", "3", "--mode", "radial", "--x-range", "3,1,5", "--phi", "0.1"],
        ["figure", "3", "--all-q", "--out", "x.csv"],
        ["scan", "--q", "3", "--threads", "0", "--phi", "0.1"],
    ])
    def test_usage_exit_code(self, argv):
        assert main(argv) == 1

    @pytest.mark.parametrize("argv", [
        ["rate", "--q", "2.5", "--x", "1", "--phi", "0"],
        ["rate", "--bogus"],
        ["launch"],
    ])
    def test_parser_exit_code(self, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 1

    def test_io_exit_code(self, tmp_path):
        out = tmp_path / "nope" / "r.csv"
        assert main(["rate", "--q", "3", "--x", "1", "--phi", "0.1", "--out", str(out)]) == 3

    def test_oracle_non_convergence_exit_code(self):
        assert main(["rate", "--q", "1", "--x", "20", "--phi", "1.5", "--oracle", "--nodes", "16"]) == 2

    def test_verify_fast(self, capsys):
        assert main(["verify"]) == 0
        assert "all checks passed" in capsys.readouterr().out

    def test_verify_reports_non_convergence_as_failed_check(self, capsys):
        assert main(["verify", "--level", "full", "--nodes", "16"]) == 2
        out = capsys.readouterr().out
        assert "FAIL  oracle equivalence" in out
        assert "NonConvergenceError" in out


class TestVerify:
    def test_fast_passes(self):
        report = run_verify("fast")
        assert report.passed, "\n".join(report.lines())
        assert report.seconds < 10

    def test_full_passes(self):
        report = run_verify("full")
        assert report.passed, "\n".join(report.lines())
        assert [c.name for c in report.checks if c.name.startswith("oracle")] == [
            "oracle equivalence (rho)", "oracle equivalence (phi)", "oracle equivalence (z)"]

    def test_bad_level(self):
        with pytest.raises(UsageError):
            run_verify("thorough")

    def test_mutation_phi_sign_flip_is_caught(self, monkeypatch):
        honest = wedge_rates.braces

        def flipped(geom, pos, pol):
            if pol != "phi":
                return honest(geom, pos, pol)
            big, phi = 2.0 * pos.x, pos.phi
            total = 2 / 3 - specfun.h_phi(big, phi)
            for l in range(1, geom.q):
                a = math.pi * l / geom.q
                total -= specfun.h_phi(big, phi + a) - specfun.h_phi(big, a)
            return total

        monkeypatch.setattr(wedge_rates, "braces", flipped)
        report = run_verify("full")
        assert not by_name(report, "oracle equivalence (phi)").passed
        assert by_name(report, "oracle equivalence (rho)").passed
        assert by_name(report, "oracle equivalence (z)").passed
        # the sign is invisible for q = 1, so failures come only from q >= 2
        misses = []
        cli_io._oracle_grid(cli_io.mode_oracle.QuadratureConfig(), ("phi",), misses)
        assert misses and min(m[0] for m in misses) >= 2

    def test_mutation_missing_series_switch_is_caught(self, monkeypatch):
        def closed_only(x):
            if x == 0.0:
                return 2 / 3
            return math.sin(x) / x + math.cos(x) / x**2 - math.sin(x) / x**3

        monkeypatch.setattr(specfun, "g_parallel", closed_only)
        report = run_verify("fast")
        assert not report.passed
        assert not by_name(report, "kernel series/closed-form match").passed


class TestFigureInvariants:
    @pytest.mark.parametrize("q", [30, 60, 90])
    def test_suppression_then_first_jump(self, q):
        m = jump_metrics(run_scan(figure_preset(6, q)), q)
        assert m.suppression_ratio >= 10.0

    @pytest.mark.parametrize("q", [60, 90])
    def test_jump_at_three_q_not_two_q(self, q):
        m = jump_metrics(run_scan(figure_preset(6, q)), q)
        assert m.jump_ratio >= 3.0

    def test_polarization_contrast(self):
        alpha = math.pi / 3
        geom = wedge_rates.WedgeGeometry(3)
        near = wedge_rates.normalized_rates(geom, wedge_rates.AtomPosition(6.0, alpha / 20))
        mid = wedge_rates.normalized_rates(geom, wedge_rates.AtomPosition(6.0, alpha / 2))
        assert near.norm_z < mid.norm_z
        assert near.norm_phi > mid.norm_phi
