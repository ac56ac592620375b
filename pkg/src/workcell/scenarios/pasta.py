"""Pasta quality control: a belt of pieces inspected one per cycle.

Each cycle injects the next piece at the inspection position, asks the
gateway (through a scripted chat turn) to run a check, and reads the
decision back out of the event log.  Pieces classified as broken are
diverted to the drop zone by a pick job.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..gateway.http import serve
from .client import GatewayClient
from .config import ScenarioConfig, build_service

GOOD_TEMPLATE = "pasta_good"
BROKEN_TEMPLATE = "pasta_broken"
DEFAULT_QC_UTTERANCE = "run a standard quality check"


@dataclass(frozen=True)
class BeltItem:
    id: str
    good: bool

    @property
    def template(self) -> str:
        return GOOD_TEMPLATE if self.good else BROKEN_TEMPLATE


@dataclass
class QcItemRecord:
    item_id: str
    truth: str  # "good" | "broken"
    decision: str | None
    diverted: bool
    job_id: str


@dataclass
class QcReport:
    items: list[QcItemRecord]
    precision: float
    recall: float

    def to_text(self) -> str:
        lines = [f"{r.item_id}\t{r.truth}\t{r.decision}\t{'divert' if r.diverted else 'pass'}"
                 for r in self.items]
        total = len(self.items)
        diverted = sum(r.diverted for r in self.items)
        lines.append("-- summary --")
        lines.append(f"items={total} diverted={diverted} "
                     f"precision={self.precision:.3f} recall={self.recall:.3f}")
        return "\n".join(lines) + "\n"


def _score(items: list[QcItemRecord]) -> tuple[float, float]:
    """Precision/recall of the 'broken' classification (divert = positive)."""
    tp = sum(1 for r in items if r.diverted and r.truth == "broken")
    fp = sum(1 for r in items if r.diverted and r.truth == "good")
    fn = sum(1 for r in items if not r.diverted and r.truth == "broken")
    precision = tp / (tp + fp) if (tp + fp) else 1.0
    recall = tp / (tp + fn) if (tp + fn) else 1.0
    return precision, recall


def run_pasta_qc_cycle(config: ScenarioConfig, belt: list[BeltItem],
                       session_id: str = "qc-line") -> QcReport:
    """Inspect every belt item; returns the per-item report."""
    inspect = config.extras.get("inspect_position")
    if inspect is None:
        (x0, y0), (x1, y1) = config.scene.extent
        inspect = [(x0 + x1) / 2.0, (y0 + y1) / 2.0]
    utterance = config.extras.get("qc_utterance", DEFAULT_QC_UTTERANCE)
    service = build_service(config)
    server, _ = serve(service)
    client = GatewayClient(f"http://127.0.0.1:{server.port}")
    records: list[QcItemRecord] = []
    try:
        for item in belt:
            client.set_scene(
                [
                    {
                        "id": item.id,
                        "label": item.template,
                        "position": list(inspect),
                        "mass_kg": 0.02,
                        "template": item.template,
                    }
                ]
            )
            reply = client.command(session_id, utterance)
            job_id = reply.get("job_id")
            if not job_id:
                raise RuntimeError(f"QC turn produced no job (reply: {reply['reply']!r})")
            outcome = client.wait_for_job(job_id)
            result = outcome.get("result", {})
            records.append(
                QcItemRecord(
                    item_id=item.id,
                    truth="good" if item.good else "broken",
                    decision=result.get("decision"),
                    diverted=bool(result.get("diverted")),
                    job_id=job_id,
                )
            )
        service.wait_idle()
    finally:
        server.shutdown()
        service.close()
    precision, recall = _score(records)
    return QcReport(items=records, precision=precision, recall=recall)
