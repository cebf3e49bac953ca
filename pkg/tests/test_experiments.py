from pathlib import Path

import pytest

from src.utils.config import load_config
from src.utils.errors import InvalidConfig

EXPERIMENTS = Path(__file__).resolve().parents[1] / "config" / "experiments.yml"


def test_shipped_presets():
    cfg = load_config(str(EXPERIMENTS), ensure_dirs=False)
    names = {"pdr_vs_selfish", "overhead_vs_nodes", "fg_overhead_vs_nodes", "fg_reduction", "smoke"}
    assert names <= set(cfg.presets)
    pdr = cfg.presets["pdr_vs_selfish"]
    assert pdr.axis == "SELFISH-FRACTION"
    assert pdr.values == ["0.0", "0.1", "0.2", "0.3", "0.4"]
    assert pdr.variants == ["PDSR", "MDSR"]
    assert cfg.presets["fg_overhead_vs_nodes"].keep_spacing is True
    assert cfg.presets["fg_reduction"].axis is None
    assert cfg.presets["fg_reduction"].overrides["FLOW-SCOPE"] == "GROUP"
    for name in ("pdr_vs_selfish", "overhead_vs_nodes"):
        overrides = cfg.presets[name].overrides
        assert (overrides["PROTECTED-WINDOW"], overrides["NORMAL-WINDOW"]) == ("2.5S", "0.5S")


def test_load_creates_directories(tmp_path):
    path = tmp_path / "exp.yml"
    path.write_text(
        f"io:\n  out_dir: {tmp_path / 'o'}\n  logs_dir: {tmp_path / 'l'}\n"
        "presets:\n  p:\n    variants: [mdsr]\n    overrides:\n      PROMISCUOUS-MODE: false\n",
        encoding="utf-8",
    )
    cfg = load_config(str(path))
    assert (tmp_path / "o").is_dir() and (tmp_path / "l").is_dir()
    preset = cfg.presets["p"]
    assert preset.variants == ["MDSR"] and preset.seeds == [1]
    assert preset.overrides == {"PROMISCUOUS-MODE": "NO"}


def test_missing_io_section(tmp_path):
    path = tmp_path / "exp.yml"
    path.write_text("presets: {}\n", encoding="utf-8")
    with pytest.raises(InvalidConfig):
        load_config(str(path))
