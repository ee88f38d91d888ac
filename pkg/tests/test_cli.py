"""CLI contract: CSV schemas, determinism, exit codes, config precedence."""

import json
import math

import pytest

from anoma.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main

GOLDEN_HEADERS = {
    "rate_vs_gain": ("h1_sq,anoma_matrix_h2sq0.5,anoma_closed_h2sq0.5,"
                     "noma_h2sq0.5,anoma_matrix_h2sq1,anoma_closed_h2sq1,"
                     "noma_h2sq1"),
    "rate_vs_n": "N,anoma_tau0.5,anoma_tau0.1,noma,asymptote_0.5,asymptote_0.1",
    "power_surface": "p1,p2,throughput",
    "tau_star_vs_n": "N,tau_star_mu1_0.5,tau_star_mu1_1,tau_star_mu2_1",
    "loss_heatmap": "eps1,eps2,gamma",
    "loss_slices": ("eps,gamma_sync_exact,gamma_sync_linear,"
                    "gamma_coord_exact,gamma_coord_linear"),
    "scheme_comparison": "eps,anoma_sync_error,anoma_coord_error,noma,oma",
}

FAST_OVERRIDES = {
    "rate_vs_gain": ["--set", "h1_sq_max=0.3"],
    "rate_vs_n": ["--set", "n_max=20", "--set", "n_points=5"],
    "power_surface": ["--set", "p_step=0.5"],
    "tau_star_vs_n": ["--set", "n_values=[1,5]", "--set", "grid_resolution=0.01"],
    "loss_heatmap": ["--set", "eps_min=-0.02", "--set", "eps_max=0.02",
                     "--set", "eps_step=0.01"],
    "loss_slices": ["--set", "eps_min=-0.03", "--set", "eps_max=0.03",
                    "--set", "eps_step=0.01"],
    "scheme_comparison": ["--set", "eps_min=-0.1", "--set", "eps_max=0.1",
                          "--set", "eps_step=0.05"],
}


def run_sweep(tmp_path, figure, extra=()):
    out = tmp_path / f"{figure}.csv"
    code = main(["sweep", figure, "--out", str(out),
                 *FAST_OVERRIDES[figure], *extra])
    assert code == EXIT_OK
    return out.read_text(encoding="utf-8")


@pytest.mark.parametrize("figure", sorted(GOLDEN_HEADERS))
def test_csv_header_schema(tmp_path, figure):
    text = run_sweep(tmp_path, figure)
    assert text.splitlines()[0] == GOLDEN_HEADERS[figure]


@pytest.mark.parametrize("figure", ["rate_vs_n", "loss_heatmap"])
def test_byte_determinism(tmp_path, figure):
    a = run_sweep(tmp_path, figure)
    b = run_sweep(tmp_path, figure)
    assert a == b


def test_single_thread_output_identical(tmp_path, monkeypatch):
    base = run_sweep(tmp_path, "rate_vs_n")
    monkeypatch.setenv("ANOMA_THREADS", "1")
    assert run_sweep(tmp_path, "rate_vs_n") == base


def test_rate_vs_n_converges_toward_asymptote(tmp_path):
    text = run_sweep(
        tmp_path, "rate_vs_n", ["--set", "n_max=400", "--set", "n_points=9"])
    rows = [line.split(",") for line in text.splitlines()[1:]]
    gap_first = abs(float(rows[0][1]) - float(rows[0][4]))
    gap_last = abs(float(rows[-1][1]) - float(rows[-1][4]))
    assert gap_last < gap_first / 10


def test_scheme_comparison_ordering_at_zero_error(tmp_path):
    text = run_sweep(tmp_path, "scheme_comparison")
    rows = {float(r.split(",")[0]): r.split(",") for r in text.splitlines()[1:]}
    zero = rows[0.0]
    anoma, noma, oma = float(zero[1]), float(zero[3]), float(zero[4])
    assert anoma > noma > oma


def test_loss_heatmap_minimum_at_origin(tmp_path):
    text = run_sweep(tmp_path, "loss_heatmap")
    gammas = {}
    for line in text.splitlines()[1:]:
        e1, e2, g = (float(v) for v in line.split(","))
        gammas[(e1, e2)] = g
    assert gammas[(0.0, 0.0)] == 0.0
    assert all(g >= 0.0 for g in gammas.values())


def test_config_file_applies_and_flags_win(tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"n_max": 10, "n_points": 3, "mu2": 1.0}),
                   encoding="utf-8")
    out = tmp_path / "x.csv"
    code = main(["sweep", "rate_vs_n", "--config", str(cfg),
                 "--set", "n_points=4", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text(encoding="utf-8").splitlines()
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) <= 4
    # mu2 = 1 from the file: noma column is log2(3)
    assert math.isclose(float(rows[0][3]), math.log2(3.0), rel_tol=1e-12)


def test_unknown_figure_is_usage_error(capsys):
    assert main(["sweep", "nonexistent_figure"]) == EXIT_USAGE
    assert "figure_id" in capsys.readouterr().err


def test_unknown_field_is_usage_error(capsys):
    code = main(["sweep", "rate_vs_n", "--set", "bogus_field=1"])
    assert code == EXIT_USAGE
    assert "bogus_field" in capsys.readouterr().err


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"not_a_field": 1}), encoding="utf-8")
    code = main(["sweep", "rate_vs_n", "--config", str(cfg)])
    assert code == EXIT_USAGE
    assert "not_a_field" in capsys.readouterr().err


def test_unwritable_path_is_io_error(tmp_path, capsys):
    target = tmp_path / "no" / "such" / "dir" / "out.csv"
    code = main(["sweep", "rate_vs_n", *FAST_OVERRIDES["rate_vs_n"],
                 "--out", str(target)])
    assert code == EXIT_IO


def test_validate_routes_passes(capsys):
    assert main(["validate", "routes"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "routes.agreement_n_le_50" in out
    assert "verdict=PASS" in out
    assert "verdict=FAIL" not in out


def test_validate_unknown_suite(capsys):
    assert main(["validate", "everything"]) == EXIT_USAGE
    assert "suite" in capsys.readouterr().err


def test_query_default_point(capsys):
    assert main(["query"]) == EXIT_OK
    out = capsys.readouterr().out.strip()
    assert out.count("\n") == 0  # single line
    fields = dict(kv.split("=") for kv in out.split())
    assert math.isclose(float(fields["delta"]), 0.0, abs_tol=0.0)
    assert float(fields["gamma"]) == 0.0
    assert math.isclose(float(fields["anoma_matrix"]),
                        float(fields["anoma_closed"]), rel_tol=1e-11)


def test_query_tau0_collapses_to_noma(capsys):
    assert main(["query", "--set", "tau=0"]) == EXIT_OK
    fields = dict(kv.split("=") for kv in
                  capsys.readouterr().out.strip().split())
    assert fields["noma"] == fields["anoma_closed"]


def test_query_linear_loss_agrees_at_small_offset(capsys):
    assert main(["query", "--set", "eps1=0.01"]) == EXIT_OK
    fields = dict(kv.split("=") for kv in
                  capsys.readouterr().out.strip().split())
    delta = float(fields["delta"])
    lin = float(fields["delta_lin_sync"])
    assert abs(lin - delta) / delta <= 0.1


def test_query_invalid_point_is_usage_error(capsys):
    assert main(["query", "--set", "tau=1.5"]) == EXIT_USAGE
