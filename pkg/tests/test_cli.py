"""File format, DOT export, and command-line behaviour."""

import json
import re

import pytest

from treelts import Component, GenConfig, ParseError, ValidationError, gen_random_tree
from treelts.cli import (
    dot_string,
    export_dot,
    load,
    main,
    network_from_doc,
    save,
    save_string,
)
from treelts.fixtures import gx_path, gy_path
from treelts.product import component_lts, full_product
from treelts.reduction import build_sq


class TestLoad:
    def test_gx_fixture(self, gx):
        assert [c.name for c in gx.components] == ["R", "S1", "S2"]
        assert gx.root.name == "R"
        assert gx.root.label_of("r3") == {"r3_reached"}
        r = gx.index_of("R")
        assert gx.downacts[r] == {"open", "chooseL", "chooseR"}

    def test_gy_fixture_labels(self, gy):
        assert gy.components[0].label_of("r2") == {"p"}
        assert gy.components[1].label_of("s1") == {"p"}
        assert gy.components[2].label_of("t0") == {"p"}

    def test_empty_components_rejected(self):
        with pytest.raises(ValidationError, match="non-empty"):
            network_from_doc({"root": "x", "components": []})

    def test_unknown_top_level_keys_rejected(self):
        with pytest.raises(ValidationError, match="unknown keys"):
            network_from_doc({"root": "x", "components": [], "extra": 1})

    def test_unknown_component_keys_rejected(self):
        doc = {"root": "c", "components": [
            {"name": "c", "states": ["s0"], "initial": "s0", "color": "red"}]}
        with pytest.raises(ValidationError, match="unknown component keys"):
            network_from_doc(doc)

    def test_malformed_json_reports_position(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{\n  broken\n}", encoding="utf-8")
        with pytest.raises(ParseError) as exc:
            load(bad)
        assert exc.value.line == 2

    def test_direction_marks_are_checked(self):
        # the '!' claims an upstream synchronisation that does not exist
        doc = {"root": "a", "components": [
            {"name": "a", "states": ["s0"], "initial": "s0",
             "transitions": [["s0", "!solo", "s0"]]}]}
        with pytest.raises(ValidationError, match="marked '!'"):
            network_from_doc(doc)

    def test_direction_marks_accepted_when_consistent(self, gx):
        # the bundled fixture uses ? and ! markers throughout
        assert gx.upacts[gx.index_of("S1")] == {"open"}

    def test_conflicting_marks_rejected(self):
        doc = {"root": "a", "components": [
            {"name": "a", "states": ["s0"], "initial": "s0",
             "transitions": [["s0", "!x", "s0"], ["s0", "?x", "s0"]]}]}
        with pytest.raises(ValidationError, match="both"):
            network_from_doc(doc)


class TestSaveRoundTrip:
    def test_fixture_round_trip(self, gx, tmp_path):
        out = tmp_path / "copy.json"
        save(gx, out)
        again = load(out)
        assert again == gx

    def test_generated_round_trips(self, tmp_path):
        for seed in range(25):
            net = gen_random_tree(GenConfig(seed=seed, max_depth=3, max_children=3))
            out = tmp_path / f"g{seed}.json"
            save(net, out)
            assert load(out) == net

    def test_save_is_canonical(self, gx):
        assert save_string(gx) == save_string(load(gx_path()))


class TestDotExport:
    def test_gx_squares_have_twelve_node_lines(self, gx, tmp_path):
        sq = build_sq(gx)
        out = tmp_path / "sq.dot"
        export_dot(sq.lts, out, silent=gx.silent | {sq.epsilon})
        text = out.read_text(encoding="utf-8")
        node_lines = [l for l in text.splitlines() if re.match(r"^  s\d+ \[", l)]
        assert len(node_lines) == 12

    def test_single_state_component(self):
        c_lts = component_lts(Component("c", ("s0",), "s0"))
        text = dot_string(c_lts)
        assert len([l for l in text.splitlines() if re.match(r"^  s\d+ \[", l)]) == 1
        assert " -> " not in text.replace("__start -> s0", "")

    def test_reexport_is_byte_identical(self, gx):
        lts = full_product(gx)
        assert dot_string(lts, gx.silent) == dot_string(lts, gx.silent)

    def test_silent_edges_are_dashed(self, gx):
        lts = full_product(gx)
        dashed = [l for l in dot_string(lts, gx.silent).splitlines()
                  if 'label="tau"' in l]
        assert dashed and all("dashed" in l for l in dashed)


class TestMain:
    def test_validate_gx(self, capsys):
        assert main(["validate", str(gx_path())]) == 0
        assert "live-reset: OK" in capsys.readouterr().out

    def test_validate_broken_file(self, tmp_path, capsys):
        doc = json.loads(gx_path().read_text(encoding="utf-8"))
        # break the reset discipline: chooseR now lands on t1
        s2 = doc["components"][2]
        s2["transitions"] = [
            t if t != ["t2", "!chooseR", "t0"] else ["t2", "!chooseR", "t1"]
            for t in s2["transitions"]]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        assert main(["validate", str(bad)]) == 2
        assert "violation" in capsys.readouterr().out

    def test_check_ef_full_with_witness(self, capsys):
        code = main(["check", str(gx_path()), "--ef", "r3_reached", "--full", "--witness"])
        out = capsys.readouterr().out
        assert code == 0
        assert "HOLDS" in out and "witness:" in out and "r3" in out

    def test_check_ef_reduced_agrees(self):
        assert main(["check", str(gx_path()), "--ef", "r3_reached", "--reduced"]) == 0

    def test_check_eg_full_vs_reduced_on_gy(self):
        assert main(["check", str(gy_path()), "--eg", "p", "--full"]) == 0
        assert main(["check", str(gy_path()), "--eg", "p", "--reduced"]) == 1

    def test_missing_proposition_exits_one(self):
        assert main(["check", str(gx_path()), "--ef", "nothing", "--full"]) == 1

    def test_parse_error_exits_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        assert main(["validate", str(bad)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_cap_exit_code(self, capsys):
        assert main(["product", str(gx_path()), "--cap", "3"]) == 3
        assert "error:" in capsys.readouterr().err

    def test_usage_error_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["check", str(gx_path()), "--full"])  # no formula given
        assert exc.value.code == 2

    def test_stats_output(self, capsys):
        assert main(["stats", str(gx_path())]) == 0
        out = capsys.readouterr().out
        assert "full product : 15 states" in out
        assert "reduced      : 12 states" in out

    def test_reduce_output_can_be_rechecked(self, tmp_path, capsys):
        out = tmp_path / "reduced.json"
        assert main(["reduce", str(gx_path()), "-o", str(out)]) == 0
        capsys.readouterr()
        # the reduction preserves reachability end to end
        assert main(["check", str(out), "--ef", "r3_reached", "--full"]) == 0
        assert main(["check", str(out), "--ef", "nothing", "--full"]) == 1

    def test_reduce_keep_locked(self, tmp_path, capsys):
        out = tmp_path / "unpruned.json"
        assert main(["reduce", str(gx_path()), "--keep-locked", "-o", str(out)]) == 0
        net = load(out)
        assert len(net.components[0].states) == 21

    def test_reduce_refuses_broken_input(self, tmp_path, capsys):
        doc = json.loads(gx_path().read_text(encoding="utf-8"))
        s2 = doc["components"][2]
        s2["transitions"] = [
            t if t != ["t2", "!chooseR", "t0"] else ["t2", "!chooseR", "t1"]
            for t in s2["transitions"]]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        assert main(["reduce", str(bad), "-o", str(tmp_path / "out.json")]) == 2

    def test_product_save_and_dot(self, tmp_path, capsys):
        out = tmp_path / "product.json"
        dot = tmp_path / "product.dot"
        assert main(["product", str(gx_path()), "-o", str(out), "--dot", str(dot)]) == 0
        net = load(out)
        assert len(net.components[0].states) == 15
        assert dot.read_text(encoding="utf-8").startswith("digraph")

    def test_gen_is_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["gen", "--seed", "5", "-o", str(a)]) == 0
        assert main(["gen", "--seed", "5", "-o", str(b)]) == 0
        assert a.read_text(encoding="utf-8") == b.read_text(encoding="utf-8")
        assert main(["validate", str(a)]) == 0

    def test_suite_runs_clean(self, tmp_path, capsys):
        report = tmp_path / "suite.json"
        code = main(["suite", "--seeds", "8", "--max-states", "4",
                     "--json", str(report)])
        out = capsys.readouterr().out
        assert code == 0
        assert "0 reachability disagreement(s)" in out
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["disagreements"] == 0
        assert len(data["instances"]) == 8
