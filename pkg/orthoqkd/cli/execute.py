import os
from dataclasses import dataclass, field
from typing import Any, Dict, List

from dbt.adapters.events.logging import AdapterLogger

from orthoqkd.analysis.grid import COLUMNS, SecurityGrid, build_grid
from orthoqkd.analysis.models import Interpretation
from orthoqkd.analysis.suites import (
    duality_suite,
    heisenberg_report,
    knowledge_bound_report,
    monogamy_suite,
    ng_oracle_report,
    pairing_suite,
)
from orthoqkd.analysis.threshold import monotonicity_violations, tolerable_error
from orthoqkd.cli.config import OutputFormat, ScenarioCommand, ScenarioConfig, SuiteName
from orthoqkd.exceptions import ScenarioConfigError
from orthoqkd.protocols.base import basis_audit
from orthoqkd.protocols.runner import run_protocol
from orthoqkd.utility import dumps, spawn_generators


logger = AdapterLogger("orthoqkd")

EVENT_COLUMNS = (
    "index",
    "kind",
    "step",
    "party",
    "particle_ids",
    "leg",
    "slot",
    "topic",
    "basis",
    "outcome",
)


@dataclass
class ExecutionResult:
    status: int
    artifacts: List[str] = field(default_factory=list)
    summaries: List[str] = field(default_factory=list)


class ArtifactWriter:
    """Collects every output in memory and writes them together once the task is done."""

    def __init__(self, config: ScenarioConfig) -> None:
        self.config = config
        self.pending: Dict[str, Any] = {}

    def envelope(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        return {
            "seed": self.config.seed,
            "config_hash": self.config.config_hash,
            "interpretation": self.config.interpretation.to_dict(),
            **payload,
        }

    def json(self, name: str, payload: Dict[str, Any]) -> None:
        if OutputFormat.json in self.config.formats:
            self.pending[f"{name}.json"] = dumps(self.envelope(payload)) + "\n"

    def table(self, name: str, table) -> None:
        if OutputFormat.csv in self.config.formats:
            self.pending[f"{name}.csv"] = table

    def csv_header(self) -> str:
        seed = "none" if self.config.seed is None else self.config.seed
        return f"# seed={seed} config_hash={self.config.config_hash}\n"

    def flush(self) -> List[str]:
        os.makedirs(self.config.output_dir, exist_ok=True)
        written = []
        for name, content in sorted(self.pending.items()):
            path = os.path.join(self.config.output_dir, name)
            if isinstance(content, str):
                with open(path, "w", encoding="utf-8") as handle:
                    handle.write(content)
            else:
                with open(path, "w", encoding="utf-8", newline="") as handle:
                    handle.write(self.csv_header())
                    content.to_csv(handle)
            written.append(path)
        self.pending = {}
        return written


def _event_table(events: List[Dict[str, Any]]):
    import agate

    rows = [
        [
            None if event.get(column) is None else str(event.get(column))
            for column in EVENT_COLUMNS
        ]
        for event in events
    ]
    return agate.Table(rows, column_names=EVENT_COLUMNS, column_types=[agate.Text()] * len(EVENT_COLUMNS))


def _run(config: ScenarioConfig, writer: ArtifactWriter) -> str:
    protocol_config = config.protocol_config()
    transcript = run_protocol(protocol_config)
    dump_matrices = config.attack is not None and config.attack.dump_matrices
    payload = transcript.to_dict(dump_matrices=dump_matrices)
    payload["basis_audit"] = sorted(basis_audit(transcript))
    name = f"{config.protocol}_run_seed{config.seed}"
    writer.json(name, {"transcript": payload})
    writer.table(f"{name}_events", _event_table(payload["events"]))
    message_error = transcript.error_rates.get("message")
    return (
        f"run {config.protocol} n={config.n} seed={config.seed}: "
        f"aborted={str(transcript.aborted).lower()} message_error={message_error}"
    )


def _grid_payload(grid: SecurityGrid) -> Dict[str, Any]:
    return {
        "grid": grid.metadata(),
        "columns": list(COLUMNS),
        "cells": [[row[column] for column in COLUMNS] for row in grid.rows()],
    }


def _sweep(config: ScenarioConfig, writer: ArtifactWriter) -> str:
    grid = build_grid(config.protocol, config.resolution, config.interpretation, config.theta_max)  # type: ignore
    name = f"{config.protocol}_grid"
    writer.table(name, grid.as_table())
    writer.json(name, _grid_payload(grid))
    return (
        f"sweep {config.protocol} {grid.resolution}x{grid.resolution}: "
        f"{len(grid.thetas) * len(grid.lambdas)} cells, flag fraction {grid.flag_fraction:.4f}"
    )


def _threshold(config: ScenarioConfig, writer: ArtifactWriter) -> str:
    grid = build_grid(config.protocol, config.resolution, config.interpretation, config.theta_max)  # type: ignore
    primary = tolerable_error(grid)
    variants = []
    if config.all_interpretations:
        for interpretation in Interpretation.variants():
            if interpretation == config.interpretation:
                variants.append(primary)
            else:
                variants.append(
                    tolerable_error(
                        build_grid(config.protocol, config.resolution, interpretation, config.theta_max)  # type: ignore
                    )
                )
    name = f"{config.protocol}_threshold"
    writer.json(
        name,
        {
            "threshold": primary.to_dict(),
            "variants": [result.to_dict() for result in variants],
            "monotonicity_violations": monotonicity_violations(grid),
        },
    )
    if variants:
        import agate

        writer.table(
            name,
            agate.Table(
                [[result.interpretation.label, result.e0] for result in variants],
                column_names=("interpretation", "e0"),
                column_types=[agate.Text(), agate.Number()],
            ),
        )
    e0 = f"{primary.e0:.4f}" if primary.finite else "none"
    return f"threshold {config.protocol} ({config.interpretation.label}): e0={e0}"


def _suites(config: ScenarioConfig, writer: ArtifactWriter) -> str:
    rngs = spawn_generators(config.seed, [str(name) for name in SuiteName])  # type: ignore
    reports: Dict[str, Any] = {}
    for name in config.suites:
        if name == SuiteName.duality:
            reports[name] = duality_suite(config.samples, rngs[name])
        elif name == SuiteName.monogamy:
            reports[name] = monogamy_suite(config.samples, rngs[name])
        elif name == SuiteName.heisenberg:
            reports[name] = heisenberg_report()
        elif name == SuiteName.knowledge_bound:
            reports[name] = knowledge_bound_report(config.samples, rngs[name])
        elif name == SuiteName.ng_oracle:
            reports[name] = ng_oracle_report()
        elif name == SuiteName.pairing:
            reports[name] = pairing_suite(config.pairing_samples, rngs[name])
        else:
            raise ScenarioConfigError(f"Unknown suite '{name}'")
    writer.json("suites", {"suites": {str(name): report for name, report in reports.items()}})
    return f"suites {', '.join(str(name) for name in config.suites)}: seed={config.seed}"


def execute(config: ScenarioConfig) -> ExecutionResult:
    """
    Run one scenario and write its artifacts. Protocol aborts are results; errors propagate
    to the caller.
    """
    writer = ArtifactWriter(config)
    if config.command == ScenarioCommand.run:
        summary = _run(config, writer)
    elif config.command == ScenarioCommand.sweep:
        summary = _sweep(config, writer)
    elif config.command == ScenarioCommand.threshold:
        summary = _threshold(config, writer)
    elif config.command == ScenarioCommand.suites:
        summary = _suites(config, writer)
    else:
        raise ScenarioConfigError(f"Invalid command: '{config.command}'")
    artifacts = writer.flush()
    logger.info(summary)
    return ExecutionResult(status=0, artifacts=artifacts, summaries=[summary])
