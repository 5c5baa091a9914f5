"""Run reports: JSON round-trip, CSV traces, text tables and figures."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .core import INF
from .machine import CostTable, MachineConfig, TraceEntry, cost_report, energy_breakdown

SCHEMA_VERSION = 1


@dataclass
class RunReport:
    command: str
    inputs: dict
    results: dict
    totals: dict
    per_opcode: dict
    config: dict
    warnings: list = field(default_factory=list)
    oracle: dict = field(default_factory=dict)
    oracle_match: bool | None = None
    schema_version: int = SCHEMA_VERSION


def build_report(command: str, inputs: dict, results: dict, trace: list[TraceEntry],
                 config: MachineConfig, *, warnings=(), oracle=None,
                 oracle_match: bool | None = None) -> RunReport:
    rep = cost_report(trace)
    totals = {
        "energy_pJ": rep.energy_pJ,
        "latency_ns": rep.latency_ns,
        "transitions": rep.transitions,
        "instructions": rep.instructions,
        "edges_traversed": rep.edges_traversed,
        "GETS": rep.gets,
        "GETJ": rep.getj,
        "overflow_events": rep.overflow_events,
    }
    warnings = list(warnings)
    if rep.overflow_events:
        warnings.append(f"{rep.overflow_events} value(s) saturated to infinity")
    return RunReport(command=command, inputs=inputs, results=results, totals=totals,
                     per_opcode=rep.by_opcode, config=config.to_dict(), warnings=warnings,
                     oracle=oracle or {}, oracle_match=oracle_match)


def reconciles(report: RunReport, trace: list[TraceEntry], rel: float = 1e-9) -> bool:
    """True when the report totals equal a fresh re-summation of ``trace``."""
    energy = sum(e.energy_pJ for e in trace)
    latency = sum(e.latency_ns for e in trace)
    t = report.totals
    return (math.isclose(t["energy_pJ"], energy, rel_tol=rel, abs_tol=1e-9)
            and math.isclose(t["latency_ns"], latency, rel_tol=rel, abs_tol=1e-9)
            and t["transitions"] == sum(e.transitions_consumed for e in trace)
            and math.isclose(sum(r["energy_pJ"] for r in report.per_opcode.values()), energy,
                             rel_tol=rel, abs_tol=1e-9))


# -- JSON -------------------------------------------------------------------------

def _encode(obj: Any) -> Any:
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


def _decode(obj: Any) -> Any:
    if obj == "inf":
        return INF
    if isinstance(obj, dict):
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def report_to_json(report: RunReport) -> str:
    return json.dumps(_encode(asdict(report)), indent=2, ensure_ascii=False)


def report_from_json(text: str) -> RunReport:
    return RunReport(**_decode(json.loads(text)))


def write_report(report: RunReport, path) -> None:
    Path(path).write_text(report_to_json(report) + "\n")


def read_report(path) -> RunReport:
    return report_from_json(Path(path).read_text())


def load_bindings(path) -> dict:
    """JSON object of name -> list, with INF spelled ``"inf"``."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError("bindings file must hold a JSON object")
    from .core import wavefront
    return {name: wavefront(values) for name, values in data.items()}


# -- delimited output ----------------------------------------------------------------

TRACE_COLUMNS = ["step", "opcode", "instruction", "transitions", "lines_read", "lines_written",
                 "vmm_cells", "ew_channels", "programmed_cells", "read_pJ", "write_pJ", "vmm_pJ",
                 "elementwise_pJ", "program_pJ", "energy_pJ", "latency_ns", "cumulative_energy_pJ",
                 "norm_constant", "overflow_events"]


def trace_rows(trace: list[TraceEntry], costs: CostTable):
    total = 0.0
    for step, e in enumerate(trace):
        parts = energy_breakdown(e, costs)
        total += e.energy_pJ
        yield {
            "step": step, "opcode": e.opcode.value, "instruction": str(e.instruction),
            "transitions": e.transitions_consumed, "lines_read": e.lines_read,
            "lines_written": e.lines_written, "vmm_cells": e.vmm_cells,
            "ew_channels": e.ew_channels, "programmed_cells": e.programmed_cells,
            "read_pJ": parts["read"], "write_pJ": parts["write"], "vmm_pJ": parts["vmm"],
            "elementwise_pJ": parts["elementwise"], "program_pJ": parts["program"],
            "energy_pJ": e.energy_pJ, "latency_ns": e.latency_ns, "cumulative_energy_pJ": total,
            "norm_constant": "inf" if e.norm_constant_emitted == INF else e.norm_constant_emitted,
            "overflow_events": e.overflow_events,
        }


def write_trace_csv(trace: list[TraceEntry], costs: CostTable, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRACE_COLUMNS)
        writer.writeheader()
        writer.writerows(trace_rows(trace, costs))


# -- human-readable ------------------------------------------------------------------

def format_table(report: RunReport) -> str:
    lines = [f"== {report.command} =="]
    for key, value in report.results.items():
        lines.append(f"{key:>18}: {_fmt(value)}")
    if report.oracle_match is not None:
        lines.append(f"{'oracle_match':>18}: {str(report.oracle_match).lower()}")
    lines.append("")
    lines.append(f"{'opcode':<16}{'count':>7}{'trans':>8}{'energy_pJ':>14}{'latency_ns':>14}")
    for op, row in sorted(report.per_opcode.items(), key=lambda kv: -kv[1]["energy_pJ"]):
        lines.append(f"{op:<16}{row['count']:>7}{row['transitions']:>8}"
                     f"{row['energy_pJ']:>14.1f}{row['latency_ns']:>14.1f}")
    t = report.totals
    lines.append(f"{'total':<16}{t['instructions']:>7}{t['transitions']:>8}"
                 f"{t['energy_pJ']:>14.1f}{t['latency_ns']:>14.1f}")
    lines.append(f"edges traversed {t['edges_traversed']}  GETS {t['GETS']:.3f}  GETJ {t['GETJ']:.3f}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def _fmt(value) -> str:
    if isinstance(value, float) and math.isinf(value):
        return "∞"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_fmt(v)}" for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


# -- figures -------------------------------------------------------------------------

def plot_report(report: RunReport, trace: list[TraceEntry], path) -> None:
    """Per-opcode energy bars next to cumulative energy over the run."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ops = sorted(report.per_opcode, key=lambda op: -report.per_opcode[op]["energy_pJ"])
    energies = [report.per_opcode[op]["energy_pJ"] / 1000.0 for op in ops]

    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 3.8))
    ax0.barh(ops[::-1], energies[::-1], color="tab:blue")
    ax0.set_xlabel("energy (nJ)")
    ax0.set_title("energy by opcode")

    cum_e, cum_t, e_acc, t_acc = [0.0], [0.0], 0.0, 0.0
    for entry in trace:
        e_acc += entry.energy_pJ / 1000.0
        t_acc += entry.latency_ns
        cum_e.append(e_acc)
        cum_t.append(t_acc)
    ax1.step(cum_t, cum_e, where="post", color="tab:red")
    ax1.set_xlabel("elapsed time (ns)")
    ax1.set_ylabel("cumulative energy (nJ)")
    t = report.totals
    ax1.set_title(f"{report.command}: {t['GETS']:.2f} GETS, {t['GETJ']:.1f} GETJ")
    for ax in (ax0, ax1):
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
