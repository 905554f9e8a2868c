import json

import numpy as np
import pytest

from rotorpair.config import (
    ConfigError,
    ExperimentConfig,
    apply_overrides,
    config_as_dict,
    parse_config,
    parse_config_text,
    render_config,
)
from rotorpair.emit import (
    GridFormatError,
    manifest_without_timing,
    read_grid,
    read_manifest,
    read_purity_csv,
    write_distances_csv,
    write_grid,
    write_manifest,
    write_purity_csv,
    write_rescaled_csv,
)
from rotorpair.observables import PuritySeries

MINIMAL = """
[experiment]
kind = purity-sweep
seed = 42
"""


class TestConfigParsing:
    def test_minimal_config_fills_defaults(self):
        cfg = parse_config_text(MINIMAL)
        assert cfg.kind == "purity-sweep"
        assert cfg.seed == 42
        assert cfg.n1 == 512 and cfg.n_kicks == 25

    def test_render_parse_round_trip(self):
        cfg = parse_config_text(MINIMAL)
        cfg = apply_overrides(cfg, ["coupling.eps=0.2,0.4,4", "grid.n1=128", "run.sigma_scale=1.5"])
        assert parse_config_text(render_config(cfg)) == cfg

    def test_unknown_key_names_it(self):
        with pytest.raises(ConfigError, match="rotor.k3"):
            parse_config_text("[experiment]\nkind = purity-sweep\nseed = 1\n[rotor]\nk3 = 2\n")

    def test_malformed_numeric_reports_line(self):
        text = "[experiment]\nkind = purity-sweep\nseed = 1\n[grid]\nn1 = twelve\n"
        with pytest.raises(ConfigError, match="line 5"):
            parse_config_text(text)

    def test_missing_mandatory_key(self):
        with pytest.raises(ConfigError, match="experiment.seed"):
            parse_config_text("[experiment]\nkind = purity-sweep\n")

    def test_duplicate_key_rejected(self):
        text = MINIMAL + "[grid]\nn1 = 64\nn1 = 128\n"
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text(text)

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="frobnicator"):
            parse_config_text("[frobnicator]\nx = 1\n")

    def test_key_before_section_rejected(self):
        with pytest.raises(ConfigError, match="before any"):
            parse_config_text("kind = purity-sweep\n")

    def test_comments_and_blank_lines_ignored(self):
        text = "# top comment\n\n[experiment]\nkind = gamma-estimate  # inline\nseed = 3\n"
        assert parse_config_text(text).kind == "gamma-estimate"

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError, match="kind"):
            parse_config_text("[experiment]\nkind = banana\nseed = 1\n")

    def test_file_missing(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            parse_config(str(tmp_path / "nope.cfg"))

    def test_bad_override_shape(self):
        cfg = parse_config_text(MINIMAL)
        with pytest.raises(ConfigError):
            apply_overrides(cfg, ["grид"])
        with pytest.raises(ConfigError):
            apply_overrides(cfg, ["run.bogus=1"])

    def test_as_dict_sections(self):
        d = config_as_dict(parse_config_text(MINIMAL))
        assert d["experiment"]["kind"] == "purity-sweep"
        assert d["rotor"]["k1"] == [5.09]
        assert set(d) == {"experiment", "grid", "rotor", "coupling", "run"}


def make_series(n_kicks):
    vals = np.clip(np.exp(-0.4 * np.arange(n_kicks + 1)) + 2 / 512.0, None, 1.0)
    return PuritySeries(
        times=np.arange(n_kicks + 1), values=vals, stderr=np.full(n_kicks + 1, 1e-3),
        n1=512, n2=512, k1=5.09, k2=5.09, eps=0.8, seed=0, n_initial_states=20,
    )


class TestCsv:
    def test_purity_round_trip(self, tmp_path):
        path = tmp_path / "p.csv"
        rows = write_purity_csv(path, make_series(25))
        assert rows == 26  # t = 0..25
        t, p, se = read_purity_csv(path)
        assert t.tolist() == list(range(26))
        np.testing.assert_array_equal(p, make_series(25).values)
        np.testing.assert_array_equal(se, np.full(26, 1e-3))

    def test_header_line(self, tmp_path):
        path = tmp_path / "p.csv"
        write_purity_csv(path, make_series(3))
        assert path.read_text().splitlines()[0] == "t,P,P_stderr"

    def test_rescaled_times_keep_float_precision(self, tmp_path):
        path = tmp_path / "r.csv"
        times = np.array([0.0, 0.6958, 1.3916])
        write_rescaled_csv(path, times, [1.0, 0.5, 0.25], [0.0, 0.0, 0.0])
        got = [float(line.split(",")[0]) for line in path.read_text().splitlines()[1:]]
        assert got == times.tolist()

    def test_distances_format(self, tmp_path):
        path = tmp_path / "d.csv"
        rows = write_distances_csv(path, [("husimi_N512_eps0", 512, 0.0, 0.29713)])
        assert rows == 1
        lines = path.read_text().splitlines()
        assert lines[0] == "label,N,eps,distance"
        assert lines[1] == "husimi_N512_eps0,512,0.0,0.29713"


class TestGrid:
    def test_round_trip_and_byte_count(self, tmp_path):
        path = tmp_path / "g.lewg"
        vals = np.arange(12.0).reshape(3, 4)
        nbytes = write_grid(path, vals, "wigner")
        assert nbytes == 32 + 8 * 3 * 4
        assert path.stat().st_size == nbytes
        back, kind = read_grid(path)
        np.testing.assert_array_equal(back, vals)
        assert kind == "wigner"

    def test_magic_bytes(self, tmp_path):
        path = tmp_path / "g.lewg"
        write_grid(path, np.zeros((2, 2)), "classical")
        assert path.read_bytes()[:4] == b"LEWG"

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "g.lewg"
        write_grid(path, np.zeros((2, 2)), "husimi")
        raw = bytearray(path.read_bytes())
        raw[:4] = b"NOPE"
        path.write_bytes(bytes(raw))
        with pytest.raises(GridFormatError, match="magic"):
            read_grid(path)

    def test_truncated_rejected(self, tmp_path):
        path = tmp_path / "g.lewg"
        write_grid(path, np.zeros((4, 4)), "husimi")
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(GridFormatError, match="size"):
            read_grid(path)

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(GridFormatError):
            write_grid(tmp_path / "g.lewg", np.zeros((2, 2)), "mystery")


class TestManifest:
    def test_round_trip_sorted_and_stable(self, tmp_path):
        path = tmp_path / "m.json"
        write_manifest(path, {"b": 1, "a": {"z": [1, 2], "y": 0.5}})
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert read_manifest(path) == {"b": 1, "a": {"z": [1, 2], "y": 0.5}}

    def test_non_finite_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_manifest(tmp_path / "m.json", {"x": float("nan")})

    def test_without_timing_drops_only_timing(self):
        m = {"timing": {"wall_seconds": 3.2}, "cells": [1], "config": {}}
        out = manifest_without_timing(m)
        assert "timing" not in out
        assert out["cells"] == [1]
        assert "timing" in m  # original untouched
