import pytest

from src.cli.plot_data import emit_plot_data
from src.metrics.record import (
    CSV_COLUMNS,
    MetricsRecord,
    compute_pdr,
    emit_csv,
    parse_csv,
    read_metrics_frame,
    total_overhead,
    transmissions_frame,
)
from src.routing.packets import PacketKind
from src.utils.errors import CountInversion, MetricsError, MissingColumns


def record(sent=100, received=73, variant="MDSR", selfish=0.3, seed=1, nodes=121, **kw):
    drops = kw.pop("drops", {"selfish": 20, "punishment": 5, "no_route": 2})
    return MetricsRecord(
        variant=variant,
        selfish_fraction=selfish,
        node_count=nodes,
        seed=seed,
        packets_sent=sent,
        packets_received=received,
        control_packets=kw.pop(
            "control",
            {
                PacketKind.RREQ: 50,
                PacketKind.RREP: 10,
                PacketKind.RERR: 2,
                PacketKind.PFR_REPORT: 0,
                PacketKind.LBP_REPORT: 0,
            },
        ),
        drops=drops,
        in_flight=kw.pop("in_flight", sent - received - sum(drops.values())),
        **kw,
    )


def test_compute_pdr():
    assert compute_pdr(100, 73) == 0.73
    assert compute_pdr(0, 0) == 1.0
    with pytest.raises(CountInversion):
        compute_pdr(100, 101)
    with pytest.raises(CountInversion):
        compute_pdr(-1, 0)


def test_total_overhead():
    assert total_overhead(record()) == 62
    assert total_overhead(record(control={})) == 0
    with_reports = record(control={PacketKind.RREQ: 5, PacketKind.PFR_REPORT: 7})
    assert total_overhead(with_reports) == 12


def test_conservation_flag():
    assert record().is_conserved
    assert not record(in_flight=5).is_conserved


def test_emit_csv_layout():
    text = emit_csv([record()], ["pdr_vs_selfish"])
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[-1] == "" and len(lines) == 3
    row = dict(zip(CSV_COLUMNS, lines[1].split(",")))
    assert row["pdr"] == "0.730000"
    assert row["selfish_pct"] == "30.000000"
    assert row["total_overhead"] == "62"
    drops = (row["drops_selfish"], row["drops_punishment"], row["drops_no_route"])
    assert drops == ("20", "5", "2")


def test_emit_csv_rejects_bad_input():
    with pytest.raises(MetricsError):
        emit_csv([], [])
    with pytest.raises(MetricsError):
        emit_csv([record()], ["a", "b"])


def test_parse_csv_restores_schema_fields():
    original = [record(), record(sent=40, received=13, variant="PDSR", selfish=0.0, seed=2)]
    parsed, labels = parse_csv(emit_csv(original, ["x", "y"]))
    assert labels == ["x", "y"]
    assert parsed[0] == original[0]
    assert parsed[1] == original[1]
    assert parsed[1].in_flight == 0


def test_missing_columns():
    with pytest.raises(MissingColumns):
        read_metrics_frame("")
    with pytest.raises(MissingColumns):
        read_metrics_frame("label,variant\nx,MDSR\n")
    header_only = emit_csv([record()], ["x"]).split("\n")[0] + "\n"
    with pytest.raises(MissingColumns):
        read_metrics_frame(header_only)


def test_transmissions_frame_is_ordered_by_node():
    df = transmissions_frame(record(per_node_transmissions={2: 5, 0: 1, 1: 0}))
    assert list(df["node"]) == [0, 1, 2]
    assert list(df["transmissions"]) == [1, 0, 5]


def test_plot_series_average_over_seeds():
    records = [
        record(sent=10, received=9, drops={}, variant="PDSR", selfish=0.0, seed=1),
        record(sent=10, received=7, drops={}, variant="PDSR", selfish=0.0, seed=2),
        record(sent=10, received=5, drops={}, variant="PDSR", selfish=0.2, seed=1),
        record(sent=10, received=8, drops={}, variant="MDSR", selfish=0.0, seed=1),
    ]
    series = emit_plot_data(emit_csv(records, ["s"] * 4))
    assert set(series) == {
        ("MDSR", "pdr"),
        ("MDSR", "total_overhead"),
        ("PDSR", "pdr"),
        ("PDSR", "total_overhead"),
    }
    assert series[("PDSR", "pdr")].split("\n") == [
        "# selfish_pct pdr",
        "0.000000 0.800000",
        "20.000000 0.500000",
        "",
    ]
    assert series[("MDSR", "total_overhead")].split("\n")[1] == "0.000000 62.000000"


def test_plot_series_use_node_count_when_it_varies():
    records = [record(nodes=25), record(nodes=49)]
    series = emit_plot_data(emit_csv(records, ["s", "s"]), metrics=("pdr",))
    assert series[("MDSR", "pdr")].startswith("# node_count pdr\n25.000000 ")
