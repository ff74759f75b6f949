import json

from netsieve import Graph, tomography
from netsieve.cli import main

PORTS = "1,2,3"


def run_pipeline_files(tmp_path, six_node_path, delta="0.083333333333333329", horizon="12"):
    io_dir = tmp_path / "io"
    model = tmp_path / "model.json"
    report = tmp_path / "report.json"
    assert main(["simulate", "--graph", str(six_node_path), "--input-nodes", PORTS,
                 "--delta", delta, "--horizon", horizon, "--out-dir", str(io_dir)]) == 0
    assert main(["identify", "--io-dir", str(io_dir), "--out", str(model)]) == 0
    assert main(["sieve", "--model", str(model), "--out", str(report),
                 "--edges-out", str(tmp_path / "matched.txt")]) == 0
    return io_dir, model, report


class TestSimulate:
    def test_writes_experiments_and_sidecar(self, tmp_path, six_node_path):
        out = tmp_path / "io"
        code = main(["simulate", "--graph", str(six_node_path), "--input-nodes", PORTS,
                     "--out-dir", str(out)])
        assert code == 0
        csvs = sorted(p.name for p in out.glob("impulse_*.csv"))
        assert csvs == ["impulse_1.csv", "impulse_2.csv", "impulse_3.csv"]
        lines = (out / "impulse_1.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 13  # header + outputs at k = 0..12 for horizon 2n
        sidecar = json.loads((out / "metadata.json").read_text())
        assert sidecar == {"delta": 1 / 12, "n": 6, "inputs": [1, 2, 3], "outputs": [1, 2, 3]}

    def test_zero_delta_is_invalid_input(self, tmp_path, six_node_path):
        code = main(["simulate", "--graph", str(six_node_path), "--input-nodes", PORTS,
                     "--delta", "0", "--out-dir", str(tmp_path / "io")])
        assert code == 2

    def test_missing_graph_is_invalid_input(self, tmp_path):
        code = main(["simulate", "--graph", str(tmp_path / "nope.json"),
                     "--input-nodes", "1", "--out-dir", str(tmp_path / "io")])
        assert code == 2

    def test_disconnected_graph_warns_but_simulates(self, tmp_path, capsys):
        graph = tmp_path / "g.json"
        graph.write_text('{"n": 4, "edges": [[1, 2]]}')
        code = main(["simulate", "--graph", str(graph), "--input-nodes", "1",
                     "--out-dir", str(tmp_path / "io")])
        assert code == 0
        assert "disconnected" in capsys.readouterr().err

    def test_config_file_supplies_defaults_and_flags_override(self, tmp_path, six_node_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({
            "graph": str(six_node_path), "input_nodes": PORTS,
            "delta": 0.25, "out_dir": str(tmp_path / "from_config"),
        }))
        assert main(["simulate", "--config", str(config)]) == 0
        sidecar = json.loads((tmp_path / "from_config" / "metadata.json").read_text())
        assert sidecar["delta"] == 0.25
        assert main(["simulate", "--config", str(config), "--delta", "0.5",
                     "--out-dir", str(tmp_path / "flag_wins")]) == 0
        sidecar = json.loads((tmp_path / "flag_wins" / "metadata.json").read_text())
        assert sidecar["delta"] == 0.5


class TestIdentify:
    def test_prints_invariants_and_writes_model(self, tmp_path, six_node_path, capsys):
        io_dir = tmp_path / "io"
        main(["simulate", "--graph", str(six_node_path), "--input-nodes", PORTS,
              "--out-dir", str(io_dir)])
        capsys.readouterr()
        model_path = tmp_path / "model.json"
        assert main(["identify", "--io-dir", str(io_dir), "--out", str(model_path)]) == 0
        out = capsys.readouterr().out
        assert "order: 6" in out
        assert "22 190 804 1664 1344" in out.replace("  ", " ")
        assert "s = 12" in out
        model = json.loads(model_path.read_text())
        assert model["boundary_block"] == [[-3, 1, 0], [1, -4, 1], [0, 1, -3]]
        assert model["s"] == 12
        assert model["boundary_degrees"] == [3, 4, 3]

    def test_uncontrollable_ports_exit_3(self, tmp_path):
        graph = tmp_path / "star.json"
        graph.write_text(json.dumps({"n": 6, "edges": [[1, j] for j in range(2, 7)]}))
        io_dir = tmp_path / "io"
        assert main(["simulate", "--graph", str(graph), "--input-nodes", "1",
                     "--out-dir", str(io_dir)]) == 0
        assert main(["identify", "--io-dir", str(io_dir), "--out", str(tmp_path / "m.json")]) == 3

    def test_deterministic_output_bytes(self, tmp_path, six_node_path):
        io_dir = tmp_path / "io"
        main(["simulate", "--graph", str(six_node_path), "--input-nodes", PORTS,
              "--out-dir", str(io_dir)])
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["identify", "--io-dir", str(io_dir), "--out", str(a)])
        main(["identify", "--io-dir", str(io_dir), "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestSieve:
    def test_end_to_end_report(self, tmp_path, six_node_path, six_node, capsys):
        _, _, report_path = run_pipeline_files(tmp_path, six_node_path)
        report = json.loads(report_path.read_text())
        assert report["partitions"] == [[2, 5, 5], [3, 4, 5], [4, 4, 4]]
        assert report["matched_count"] == 1
        assert report["counters"]["graphs_constructed"] == 10
        assert report["counters"]["graphs_after_dedup"] == 5
        matched = [c for c in report["candidates"] if c["matched"]]
        assert len(matched) == 1
        got = Graph.from_edges(matched[0]["graph"]["n"], matched[0]["graph"]["edges"])
        assert got.edges == six_node.edges
        text = (tmp_path / "matched.txt").read_text().strip().splitlines()
        assert len(text) == 1
        assert text[0].startswith("1-2")

    def test_file_pipeline_matches_in_memory(self, tmp_path, six_node_path, six_node):
        _, _, report_path = run_pipeline_files(tmp_path, six_node_path)
        report = json.loads(report_path.read_text())
        in_memory = tomography(six_node, [1, 2, 3], delta=1 / 12, horizon=12)
        file_matched = {
            frozenset(map(tuple, c["graph"]["edges"]))
            for c in report["candidates"] if c["matched"]
        }
        mem_matched = {frozenset(c.graph.sorted_edges) for c in in_memory.matched}
        assert file_matched == mem_matched

    def test_deterministic_report_bytes(self, tmp_path, six_node_path):
        io_dir = tmp_path / "io"
        model = tmp_path / "model.json"
        main(["simulate", "--graph", str(six_node_path), "--input-nodes", PORTS,
              "--out-dir", str(io_dir)])
        main(["identify", "--io-dir", str(io_dir), "--out", str(model)])
        a, b = tmp_path / "ra.json", tmp_path / "rb.json"
        main(["sieve", "--model", str(model), "--out", str(a)])
        main(["sieve", "--model", str(model), "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_model_without_boundary_data_is_invalid_input(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"order": 2, "delta": 0.1}))
        assert main(["sieve", "--model", str(bad), "--out", str(tmp_path / "r.json")]) == 2

    def test_capacity_abort_writes_partial_report_exit_4(self, tmp_path, six_node_path,
                                                         monkeypatch, capsys):
        import netsieve.sieve as sieve_module
        monkeypatch.setattr(sieve_module, "CONSTRUCTION_CAP", 2)
        io_dir, model = tmp_path / "io", tmp_path / "model.json"
        main(["simulate", "--graph", str(six_node_path), "--input-nodes", PORTS,
              "--out-dir", str(io_dir)])
        main(["identify", "--io-dir", str(io_dir), "--out", str(model)])
        capsys.readouterr()
        report_path = tmp_path / "report.json"
        code = main(["sieve", "--model", str(model), "--out", str(report_path)])
        assert code == 4
        assert "partial" in capsys.readouterr().err
        report = json.loads(report_path.read_text())
        assert report["partitions"] == [[2, 5, 5], [3, 4, 5], [4, 4, 4]]


class TestReport:
    def test_graph_report_files(self, tmp_path, six_node_path, capsys):
        out = tmp_path / "rep"
        assert main(["report", "--graph", str(six_node_path), "--out-dir", str(out)]) == 0
        report = json.loads((out / "spectral_report.json").read_text())
        assert report["edge_count"] == 11
        assert round(report["spanning_trees"]) == 224
        assert not report["is_tree"]
        lines = (out / "eigenvalues.csv").read_text().strip().splitlines()
        assert lines[0] == "index,eigenvalue"
        assert len(lines) == 7
        assert (out / "spectral_report.png").stat().st_size > 0
        assert "spanning trees: 224" in capsys.readouterr().out

    def test_star_flags_set(self, tmp_path):
        graph = tmp_path / "star.json"
        graph.write_text(json.dumps({"n": 6, "edges": [[1, j] for j in range(2, 7)]}))
        out = tmp_path / "rep"
        assert main(["report", "--graph", str(graph), "--out-dir", str(out)]) == 0
        report = json.loads((out / "spectral_report.json").read_text())
        assert report["is_tree"]
        assert report["star_flag_tree"]
        assert report["star_flag_three_eigenvalues"]

    def test_disconnected_graph(self, tmp_path):
        graph = tmp_path / "g.json"
        graph.write_text('{"n": 4, "edges": [[1, 2], [3, 4]]}')
        out = tmp_path / "rep"
        assert main(["report", "--graph", str(graph), "--out-dir", str(out)]) == 0
        report = json.loads((out / "spectral_report.json").read_text())
        assert not report["is_connected"]
        assert report["spanning_trees"] == 0

    def test_no_plot_skips_figure(self, tmp_path, six_node_path):
        out = tmp_path / "rep"
        assert main(["report", "--graph", str(six_node_path), "--out-dir", str(out),
                     "--no-plot"]) == 0
        assert not (out / "spectral_report.png").exists()
        assert (out / "eigenvalues.csv").exists()

    def test_spectrum_file_input(self, tmp_path):
        spec = tmp_path / "spec.csv"
        spec.write_text("index,eigenvalue\n1,0.0\n2,3.0\n3,3.0\n")
        out = tmp_path / "rep"
        assert main(["report", "--spectrum", str(spec), "--out-dir", str(out)]) == 0
        report = json.loads((out / "spectral_report.json").read_text())
        assert report["edge_count"] == 3

    def test_requires_exactly_one_input(self, tmp_path, six_node_path):
        assert main(["report", "--out-dir", str(tmp_path)]) == 2


class TestCensus:
    def test_csv_and_figure(self, tmp_path):
        out = tmp_path / "census"
        code = main(["census", "--n-min", "2", "--n-max", "3", "--trials", "25",
                     "--seed", "5", "--out-dir", str(out)])
        assert code == 0
        lines = (out / "census.csv").read_text().strip().splitlines()
        assert lines[0] == "n,fraction"
        rows = [line.split(",") for line in lines[1:]]
        assert rows[0][0] == "2" and float(rows[0][1]) == 1.0
        assert (out / "census.png").stat().st_size > 0

    def test_deterministic_csv(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            main(["census", "--n-min", "2", "--n-max", "4", "--trials", "30",
                  "--seed", "11", "--out-dir", str(out), "--no-plot"])
        assert (a / "census.csv").read_bytes() == (b / "census.csv").read_bytes()

    def test_zero_trials_is_invalid_input(self, tmp_path):
        assert main(["census", "--n-max", "3", "--trials", "0",
                     "--out-dir", str(tmp_path)]) == 2
