import json

import pytest

from src.cli.run_sweep import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    SweepSpec,
    build_parser,
    main,
    resolve,
    sweep_points,
)
from src.metrics.record import CSV_COLUMNS, parse_csv
from src.sim.config import Variant

SMALL = """\
NUMBER-OF-NODES     9
TERRAIN-DIMENSIONS  (200, 200)
MOBILITY            NONE
SIMULATION-TIME     6S
PROTECTED-WINDOW    2S
NORMAL-WINDOW       1S
FLOW-COUNT          2
"""


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "small.config").write_text(SMALL, encoding="utf-8")
    return tmp_path


def sweep(out, *extra):
    return main(
        [
            "--config",
            "small.config",
            "--experiments",
            "missing.yml",
            "--name",
            "t",
            "--variant",
            "PDSR,MDSR",
            "--selfish",
            "0,20",
            "--seeds",
            "1",
            "--out",
            out,
            *extra,
        ]
    )


def test_sweep_writes_outputs(workdir):
    assert sweep("out", "--debug-tables") == EXIT_OK
    out = workdir / "out"
    text = (out / "t.csv").read_text(encoding="utf-8")
    records, labels = parse_csv(text)
    assert text.split("\n")[0] == ",".join(CSV_COLUMNS)
    assert [(r.selfish_fraction, r.variant) for r in records] == [
        (0.0, "PDSR"),
        (0.0, "MDSR"),
        (0.2, "PDSR"),
        (0.2, "MDSR"),
    ]
    assert set(labels) == {"t"}
    assert (out / "t_tables.csv").exists()
    energy = (out / "t_transmissions.csv").read_text(encoding="utf-8").split("\n")
    assert energy[0] == "variant,selfish_pct,node_count,seed,node,transmissions"
    assert energy[1].startswith("PDSR,0.000000,")
    assert (out / "series" / "t_MDSR_pdr.dat").exists()
    manifest = json.loads((out / "t_manifest.json").read_text(encoding="utf-8"))
    assert manifest["runs"] == 4
    assert "t.csv" in manifest["artifacts"]
    assert "t_transmissions.csv" in manifest["artifacts"]
    assert (workdir / "logs" / "run_lineage.jsonl").exists()


def test_sweep_is_reproducible(workdir):
    assert sweep("a") == EXIT_OK
    assert sweep("b") == EXIT_OK
    for name in ("t.csv", "t_manifest.json", "series/t_PDSR_pdr.dat"):
        assert (workdir / "a" / name).read_bytes() == (workdir / "b" / name).read_bytes()


@pytest.mark.parametrize(
    "content",
    ["NUMBER-OF-NODES twelve\n", "NO-SUCH-KEY 1\n", "NUMBER-OF-NODES 10\n"],
)
def test_bad_config_exits_with_config_error(workdir, content):
    (workdir / "bad.config").write_text(content, encoding="utf-8")
    code = main(["--config", "bad.config", "--experiments", "missing.yml", "--out", "out"])
    assert code == EXIT_CONFIG_ERROR
    assert not (workdir / "out" / "sweep.csv").exists()


def test_two_axes_are_rejected(workdir):
    assert sweep("out", "--nodes", "9,16") == EXIT_CONFIG_ERROR


def test_unknown_preset(workdir):
    assert main(["--preset", "nope", "--experiments", "missing.yml"]) == EXIT_CONFIG_ERROR


def test_flags_override_preset(workdir):
    (workdir / "exp.yml").write_text(
        "io:\n  out_dir: res\n  logs_dir: lg\n"
        "presets:\n  demo:\n    axis: SELFISH-FRACTION\n    values: [0.0, 0.1]\n"
        "    variants: [PDSR]\n    seeds: [1, 2]\n    overrides:\n      SEED: 5\n",
        encoding="utf-8",
    )
    args = build_parser().parse_args(
        ["--experiments", "exp.yml", "--preset", "demo", "--config", "small.config", "--seeds", "3"]
    )
    items, spec, out_dir, logs_dir = resolve(args)
    assert items["SEED"] == "5" and items["NUMBER-OF-NODES"] == "9"
    assert spec.axis == "SELFISH-FRACTION" and spec.values == ("0.0", "0.1")
    assert spec.variants == (Variant.PDSR,) and spec.seeds == (3,)
    assert (str(out_dir), str(logs_dir)) == ("res", "lg")


def test_node_sweep_keeps_grid_spacing():
    spec = SweepSpec("n", "NUMBER-OF-NODES", ("49", "25"), (Variant.MDSR,), (2, 1), True)
    points = sweep_points({"NUMBER-OF-NODES": "121"}, spec)
    assert [(p.node_count, p.seed) for p in points] == [(25, 1), (25, 2), (49, 1), (49, 2)]
    assert points[0].terrain == pytest.approx((500.0, 500.0))
    assert points[2].terrain == pytest.approx((750.0, 750.0))
