import csv
import filecmp
import json
from pathlib import Path

import numpy as np
import pytest

from orbitrans.cli import fmt, main, read_similarity_csv
from orbitrans.census import compute_orbit_frequencies, graphlet_class_frequencies
from orbitrans.graph_core import (
    SnapshotPolicy,
    build_snapshots,
    final_aggregate_graph,
    parse_edge_list,
    snapshot_stats,
)
from orbitrans.metrics import (
    MergeStep,
    hierarchical_cluster,
    motif_scores_from_counts,
    ota_matrix,
)
from orbitrans.nullmodel import RandomizationConfig, ensemble_frequencies
from orbitrans.transitions import accumulate_series, discretize, row_normalize
from oracles import exhaustive_transitions

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"


def read_rows(path: Path) -> list[list[str]]:
    with open(path) as fh:
        return list(csv.reader(fh))


def write_network(tmp_path: Path, name: str, text: str) -> Path:
    p = tmp_path / f"{name}.txt"
    p.write_text(text)
    return p


def write_manifest(tmp_path: Path, body: str) -> Path:
    p = tmp_path / "manifest.ini"
    p.write_text(body)
    return p


@pytest.fixture
def toy_run(tmp_path):
    """Two small networks and a manifest; returns (manifest path, out dir)."""
    write_network(
        tmp_path,
        "densify",
        "a b 0\nb c 1\nc d 2\na c 10\nb d 12\na d 21\n",
    )
    write_network(
        tmp_path,
        "churn",
        "p q 3\nq r 4\nr s 13\ns p 14\np r 22\nq s 24\n",
    )
    manifest = write_manifest(
        tmp_path,
        "[settings]\nwidth = 10\ncount = 3\nseed = 17\nreplicates = 6\n\n"
        "[densify]\npath = densify.txt\npolicy = aggregate\n\n"
        "[churn]\npath = churn.txt\npolicy = active\n",
    )
    return manifest, tmp_path / "out"


class TestStats:
    def test_outputs_and_parity(self, toy_run):
        manifest, out = toy_run
        assert main(["stats", "--manifest", str(manifest), "--out", str(out)]) == 0
        rows = read_rows(out / "densify.stats.csv")
        assert rows[0] == ["snapshot", "nodes", "edges", "avg_degree", "clustering", "cpl"]
        tel = parse_edge_list((manifest.parent / "densify.txt").read_text())
        series = build_snapshots(tel, SnapshotPolicy("aggregate", width=10, count=3))
        expected = snapshot_stats(series)
        for row, exp in zip(rows[1:], expected):
            assert row == [fmt(exp[c]) for c in ("snapshot", "nodes", "edges", "avg_degree", "clustering", "cpl")]

    def test_combined_long_format(self, toy_run):
        manifest, out = toy_run
        main(["stats", "--manifest", str(manifest), "--out", str(out)])
        rows = read_rows(out / "stats.csv")
        assert rows[0][0] == "network"
        names = {r[0] for r in rows[1:]}
        assert names == {"densify", "churn"}
        assert len(rows) == 1 + 2 * 3


class TestCensus:
    def test_fr_csv_matches_library(self, toy_run):
        manifest, out = toy_run
        assert main(["census", "--manifest", str(manifest), "--out", str(out)]) == 0
        tel = parse_edge_list((manifest.parent / "densify.txt").read_text())
        series = build_snapshots(tel, SnapshotPolicy("aggregate", width=10, count=3))
        for i, snap in enumerate(series.snapshots):
            rows = read_rows(out / f"densify.snap{i}.fr.csv")
            assert rows[0] == ["node"] + [f"orbit_{j}" for j in range(1, 12)]
            fr = compute_orbit_frequencies(snap, 4)
            assert [r[0] for r in rows[1:]] == list(tel.labels)
            got = np.array([[int(x) for x in r[1:]] for r in rows[1:]])
            assert np.array_equal(got, fr.counts)

    def test_final_bundle_is_event_union(self, toy_run):
        manifest, out = toy_run
        main(["census", "--manifest", str(manifest), "--out", str(out)])
        tel = parse_edge_list((manifest.parent / "densify.txt").read_text())
        g = final_aggregate_graph(tel)
        rows = read_rows(out / "densify.final.classes.csv")
        got = {r[0]: int(r[1]) for r in rows[1:]}
        assert got == graphlet_class_frequencies(g, 4)

    def test_gdd_json_well_formed(self, toy_run):
        manifest, out = toy_run
        main(["census", "--manifest", str(manifest), "--out", str(out)])
        bundle = json.loads((out / "densify.final.gdd.json").read_text())
        assert bundle["k"] == 4
        assert bundle["scaling"] == "inverse_k"
        for dist in bundle["orbits"].values():
            total = sum(dist["normalized"].values())
            assert total == pytest.approx(1.0) or total == 0.0

    def test_k3_flag(self, toy_run):
        manifest, out = toy_run
        assert main(["census", "--manifest", str(manifest), "--out", str(out), "--k", "3"]) == 0
        rows = read_rows(out / "densify.final.fr.csv")
        assert rows[0] == ["node", "orbit_1", "orbit_2", "orbit_3"]


class TestTransitions:
    def test_csv_and_json_match_library_and_oracle(self, toy_run):
        manifest, out = toy_run
        assert main(["transitions", "--manifest", str(manifest), "--out", str(out)]) == 0
        tel = parse_edge_list((manifest.parent / "densify.txt").read_text())
        series = build_snapshots(tel, SnapshotPolicy("aggregate", width=10, count=3))
        t = accumulate_series(series, 4)

        rows = read_rows(out / "densify.transitions.csv")
        assert rows[0] == ["orbit"] + [str(b) for b in range(1, 12)]
        got = np.array([[int(x) for x in r[1:]] for r in rows[1:]])
        assert np.array_equal(got, t.counts)

        # independent recomputation of the same numbers
        oracle = sum(
            exhaustive_transitions(series[i], series[i + 1], 4)[0] for i in range(2)
        )
        assert np.array_equal(got, oracle)

        bundle = json.loads((out / "densify.transitions.json").read_text())
        assert bundle["pairs_processed"] == 2
        assert np.array_equal(np.array(bundle["counts"]), t.counts)
        nt = row_normalize(t)
        assert np.allclose(np.array(bundle["normalized"]), nt.values)
        assert bundle["fingerprint"] == [list(r) for r in discretize(nt).labels]
        assert sum(bundle["dissolved"].values()) + int(t.counts.sum()) == bundle[
            "total_node_transitions"
        ]

    def test_normalized_csv_formatting(self, toy_run):
        manifest, out = toy_run
        main(["transitions", "--manifest", str(manifest), "--out", str(out)])
        rows = read_rows(out / "churn.transitions_normalized.csv")
        values = [float(x) for r in rows[1:] for x in r[1:]]
        assert all(0.0 <= v <= 1.0 for v in values)


class TestMotifs:
    def test_parity_with_library(self, toy_run):
        manifest, out = toy_run
        assert main(["motifs", "--manifest", str(manifest), "--out", str(out)]) == 0
        tel = parse_edge_list((manifest.parent / "churn.txt").read_text())
        g = final_aggregate_graph(tel)
        cfg = RandomizationConfig(replicates=6, swaps_per_edge=10, seed=17)
        means = ensemble_frequencies(g, cfg, 4)
        real = graphlet_class_frequencies(g, 4)
        order = list(real)
        fp = motif_scores_from_counts([real[n] for n in order], [means[n] for n in order])
        rows = read_rows(out / "churn.motifs.csv")
        assert [r[0] for r in rows[1:]] == order
        for row, name, score in zip(rows[1:], order, fp.scores):
            assert row[1] == fmt(real[name])
            assert row[2] == fmt(means[name])
            assert row[3] == fmt(score)
        meta = json.loads((out / "motifs.meta.json").read_text())
        assert meta["seed"] == 17 and meta["replicates"] == 6

    def test_cli_seed_flag_yields_to_manifest(self, toy_run):
        manifest, out = toy_run
        other = manifest.parent / "out2"
        main(["motifs", "--manifest", str(manifest), "--out", str(out), "--seed", "99"])
        main(["motifs", "--manifest", str(manifest), "--out", str(other), "--seed", "123"])
        assert (out / "churn.motifs.csv").read_text() == (
            other / "churn.motifs.csv"
        ).read_text()


class TestCompare:
    def test_ota_matrix_and_tree(self, toy_run):
        manifest, out = toy_run
        assert main(["compare", "--manifest", str(manifest), "--out", str(out)]) == 0
        rows = read_rows(out / "compare_ota.csv")
        assert rows[0] == ["network", "densify", "churn"]
        values = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
        assert np.allclose(values, values.T)
        assert np.allclose(np.diag(values), 1.0)

        mats = []
        for name, mode in (("densify", "aggregate"), ("churn", "active")):
            tel = parse_edge_list((manifest.parent / f"{name}.txt").read_text())
            series = build_snapshots(tel, SnapshotPolicy(mode, width=10, count=3))
            mats.append(accumulate_series(series, 4))
        sim = ota_matrix(["densify", "churn"], mats)
        assert values == pytest.approx(sim.values)

        tree = json.loads((out / "compare_ota.tree.json").read_text())
        assert len(tree) == 1
        assert set(tree[0]) == {"left", "right", "height"}

        meta = json.loads((out / "compare_ota.meta.json").read_text())
        assert meta["metric"] == "ota"
        assert meta["relative_rescale"] is True
        assert meta["networks"]["densify"]["policy"] == "aggregate"

    def test_gda_and_motif_metrics_run(self, toy_run):
        manifest, out = toy_run
        assert main(
            ["compare", "--manifest", str(manifest), "--out", str(out), "--metric", "gda",
             "--gda-include-k3"]
        ) == 0
        assert main(
            ["compare", "--manifest", str(manifest), "--out", str(out), "--metric", "motif"]
        ) == 0
        gda = read_similarity_csv(out / "compare_gda.csv", "GDA")
        assert np.allclose(np.diag(gda.values), 1.0)
        motif = read_similarity_csv(out / "compare_motif.csv", "MotifDistance")
        assert np.allclose(np.diag(motif.values), 0.0)
        meta = json.loads((out / "compare_gda.meta.json").read_text())
        assert meta["gda_include_k3"] is True

    def test_per_orbit_scaling_flag(self, toy_run):
        manifest, out = toy_run
        main(
            ["compare", "--manifest", str(manifest), "--out", str(out),
             "--ota-scaling", "per_orbit"]
        )
        rows = read_rows(out / "compare_ota.csv")
        assert float(rows[1][1]) == pytest.approx(11.0)

    def test_single_network_rejected(self, tmp_path):
        write_network(tmp_path, "only", "a b 1\nb c 2\n")
        manifest = write_manifest(
            tmp_path, "[only]\npath = only.txt\nwidth = 5\ncount = 2\n"
        )
        assert main(["compare", "--manifest", str(manifest), "--out", str(tmp_path / "o")]) == 2


class TestCluster:
    def test_round_trip_from_csv(self, toy_run, tmp_path):
        manifest, out = toy_run
        main(["compare", "--manifest", str(manifest), "--out", str(out)])
        cluster_out = tmp_path / "cl"
        assert main(
            ["cluster", "--matrix", str(out / "compare_ota.csv"), "--out", str(cluster_out)]
        ) == 0
        tree = json.loads((cluster_out / "cluster.tree.json").read_text())
        sim = read_similarity_csv(out / "compare_ota.csv", "OTA")
        expected = hierarchical_cluster(sim, linkage="average")
        got = [
            MergeStep(left=tuple(s["left"]), right=tuple(s["right"]), height=s["height"])
            for s in tree
        ]
        assert got == expected

    def test_bad_matrix_file(self, tmp_path):
        bad = tmp_path / "m.csv"
        bad.write_text("network,a\nwrong,1\n")
        assert main(["cluster", "--matrix", str(bad), "--out", str(tmp_path)]) == 2


class TestDeterminismAndFailure:
    def test_rerun_byte_identical(self, toy_run):
        manifest, out = toy_run
        other = manifest.parent / "out_b"
        for dest in (out, other):
            for cmd in ("stats", "census", "transitions", "motifs"):
                main([cmd, "--manifest", str(manifest), "--out", str(dest)])
            main(["compare", "--manifest", str(manifest), "--out", str(dest)])
        names = sorted(p.name for p in out.iterdir())
        assert names == sorted(p.name for p in other.iterdir())
        mismatch = [n for n in names if not filecmp.cmp(out / n, other / n, shallow=False)]
        assert mismatch == []

    def test_threads_do_not_change_output(self, toy_run):
        manifest, out = toy_run
        other = manifest.parent / "out_t"
        main(["transitions", "--manifest", str(manifest), "--out", str(out)])
        main(["transitions", "--manifest", str(manifest), "--out", str(other), "--threads", "4"])
        for p in out.iterdir():
            assert filecmp.cmp(p, other / p.name, shallow=False)

    def test_partial_failure_isolated(self, tmp_path):
        write_network(tmp_path, "good", "a b 0\nb c 5\nc a 12\n")
        (tmp_path / "bad.txt").write_text("x y notatime\n")
        manifest = write_manifest(
            tmp_path,
            "[settings]\nwidth = 10\ncount = 2\n\n"
            "[good]\npath = good.txt\n\n[bad]\npath = bad.txt\n",
        )
        out = tmp_path / "out"
        code = main(["stats", "--manifest", str(manifest), "--out", str(out)])
        assert code == 1
        assert (out / "good.stats.csv").exists()
        assert not (out / "bad.stats.csv").exists()

    def test_network_without_policy_fails_alone(self, tmp_path, capsys):
        write_network(tmp_path, "nop", "a b 0\nb c 5\n")
        manifest = write_manifest(tmp_path, "[nop]\npath = nop.txt\n")
        assert main(["stats", "--manifest", str(manifest), "--out", str(tmp_path / "o")]) == 1
        assert "width" in capsys.readouterr().err


class TestManifestValidation:
    def test_missing_manifest_file(self, tmp_path, capsys):
        assert main(["stats", "--manifest", str(tmp_path / "nope.ini"), "--out", "o"]) == 2
        assert "cannot read manifest" in capsys.readouterr().err

    def test_no_networks(self, tmp_path, capsys):
        manifest = write_manifest(tmp_path, "[settings]\nwidth = 5\n")
        assert main(["stats", "--manifest", str(manifest), "--out", "o"]) == 2
        assert "no networks" in capsys.readouterr().err

    def test_missing_path_key(self, tmp_path):
        manifest = write_manifest(tmp_path, "[x]\nwidth = 5\ncount = 2\n")
        assert main(["stats", "--manifest", str(manifest), "--out", "o"]) == 2

    def test_nonexistent_input(self, tmp_path, capsys):
        manifest = write_manifest(tmp_path, "[x]\npath = ghost.txt\n")
        assert main(["stats", "--manifest", str(manifest), "--out", "o"]) == 2
        assert "does not exist" in capsys.readouterr().err

    def test_duplicate_sections(self, tmp_path):
        write_network(tmp_path, "n", "a b 1\n")
        manifest = write_manifest(tmp_path, "[x]\npath = n.txt\n\n[x]\npath = n.txt\n")
        assert main(["stats", "--manifest", str(manifest), "--out", "o"]) == 2

    def test_bad_integer_value(self, tmp_path, capsys):
        write_network(tmp_path, "n", "a b 1\n")
        manifest = write_manifest(tmp_path, "[x]\npath = n.txt\nwidth = soon\ncount = 2\n")
        assert main(["stats", "--manifest", str(manifest), "--out", "o"]) == 2
        assert "not an integer" in capsys.readouterr().err

    def test_bad_choice_value(self, tmp_path):
        write_network(tmp_path, "n", "a b 1\n")
        manifest = write_manifest(
            tmp_path, "[x]\npath = n.txt\npolicy = cumulative\nwidth = 5\ncount = 2\n"
        )
        assert main(["stats", "--manifest", str(manifest), "--out", "o"]) == 2

    def test_manifest_required(self, capsys):
        with pytest.raises(SystemExit):
            main(["stats"])


class TestGoldenFiles:
    """Byte-exact fixtures produced by this tool and cross-checked below."""

    def run_all(self, out: Path) -> None:
        manifest = DATA / "manifest.ini"
        assert main(["stats", "--manifest", str(manifest), "--out", str(out)]) == 0
        assert main(["transitions", "--manifest", str(manifest), "--out", str(out)]) == 0
        assert main(["compare", "--manifest", str(manifest), "--out", str(out)]) == 0

    def test_outputs_match_golden(self, tmp_path):
        out = tmp_path / "out"
        self.run_all(out)
        for golden in sorted(GOLDEN.iterdir()):
            produced = out / golden.name
            assert produced.exists(), f"missing output {golden.name}"
            assert produced.read_text() == golden.read_text(), golden.name

    def test_golden_transitions_verified_by_oracle(self):
        # guards the checked-in files themselves against drift
        tel = parse_edge_list((DATA / "alpha.txt").read_text())
        series = build_snapshots(tel, SnapshotPolicy("aggregate", width=10, count=4))
        oracle = sum(
            exhaustive_transitions(series[i], series[i + 1], 4)[0] for i in range(3)
        )
        rows = read_rows(GOLDEN / "alpha.transitions.csv")
        got = np.array([[int(x) for x in r[1:]] for r in rows[1:]])
        assert np.array_equal(got, oracle)
