"""Run summaries and the quantum-vs-classical comparison report."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

from . import _kernels
from .classical import (
    BallColor,
    ClassicalInstruction,
    ClassicalMessage,
    ClassicalTrialRecord,
    run_classical_teleport,
)
from .protocol import MessageCoefficients, ProtocolVariant, TrialBatch, sample_batch

SIGMAS = 4.0


def binomial_radius(p: float, n: int, sigmas: float = SIGMAS) -> float:
    return sigmas * math.sqrt(p * (1.0 - p) / n)


def run_summary(batch: TrialBatch) -> dict:
    return {
        "trials": len(batch),
        "variant": batch.variant.name,
        "histogram": batch.histogram(),
        "correction_rate": batch.correction_rate,
        "final_h_rate": batch.final_h_rate,
        "call_rate": batch.call_rate,
    }


@dataclass(frozen=True)
class ClassicalSummary:
    box: str
    message: str
    exact: bool
    pairs: int
    discarded: int
    replaced: int

    @property
    def discard_rate(self) -> float:
        return self.discarded / self.pairs if self.pairs else 0.0

    @property
    def replace_rate(self) -> float:
        kept = self.pairs - self.discarded
        return self.replaced / kept if kept else 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["discard_rate"] = self.discard_rate
        d["replace_rate"] = self.replace_rate
        return d


def classical_summary(
    msg: ClassicalMessage, box: Sequence[BallColor], records: Sequence[ClassicalTrialRecord]
) -> ClassicalSummary:
    box_text = "".join(b.name for b in box)
    return ClassicalSummary(
        box=box_text,
        message=msg.to_text(),
        exact=box_text == msg.to_text(),
        pairs=len(records),
        discarded=sum(r.filtered for r in records),
        replaced=sum(r.instruction is ClassicalInstruction.REPLACE for r in records),
    )


@dataclass(frozen=True)
class ComparisonReport:
    trials: int
    classical_balls: int
    quantum_correction_rate: float
    classical_replace_rate: float
    correction_radius: float
    quantum_bobH_rate: float
    expected_bobH_rate: float
    bobH_radius: float
    message_R_fraction: float
    classical_exact: bool

    @property
    def correction_gap(self) -> float:
        return abs(self.quantum_correction_rate - self.classical_replace_rate)

    @property
    def rates_agree(self) -> bool:
        return self.correction_gap <= self.correction_radius

    @property
    def bobH_ok(self) -> bool:
        return abs(self.quantum_bobH_rate - self.expected_bobH_rate) <= self.bobH_radius

    @property
    def passed(self) -> bool:
        return self.rates_agree and self.bobH_ok and self.classical_exact

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(
            correction_gap=self.correction_gap,
            rates_agree=self.rates_agree,
            bobH_ok=self.bobH_ok,
            passed=self.passed,
        )
        return d


def _matching_message(c: MessageCoefficients, batch: TrialBatch) -> ClassicalMessage:
    """Basis messages map H -> R and V -> B; otherwise replay Bob's quantum results."""
    n = len(batch)
    if c.p_h == 1.0:
        return ClassicalMessage((BallColor.R,) * n)
    if c.p_v == 1.0:
        return ClassicalMessage((BallColor.B,) * n)
    return ClassicalMessage(tuple(BallColor.R if h else BallColor.B for h in batch.final_h.tolist()))


def compare(
    c: MessageCoefficients,
    variant: ProtocolVariant,
    trials: int,
    seed: int,
    message: Optional[ClassicalMessage] = None,
) -> ComparisonReport:
    if message is not None and not len(message):
        raise ValueError("comparison needs a non-empty classical message")
    batch = sample_batch(c, variant, trials, seed)
    msg = message if message is not None else _matching_message(c, batch)
    # classical stream continues the master sequence after the quantum trials
    box, records = run_classical_teleport(msg, _kernels.trial_seed(seed, trials))
    summary = classical_summary(msg, box, records)
    n_c = len(msg)
    # both rates are exactly 1/2 in expectation, whatever the message
    radius = SIGMAS * math.sqrt(0.25 / trials + 0.25 / n_c)
    p_h = c.p_h
    return ComparisonReport(
        trials=trials,
        classical_balls=n_c,
        quantum_correction_rate=batch.correction_rate,
        classical_replace_rate=summary.replace_rate,
        correction_radius=radius,
        quantum_bobH_rate=batch.final_h_rate,
        expected_bobH_rate=p_h,
        bobH_radius=binomial_radius(p_h, trials),
        message_R_fraction=msg.balls.count(BallColor.R) / n_c,
        classical_exact=summary.exact,
    )


def report_lines(report: ComparisonReport) -> List[str]:
    return [
        f"quantum correction rate   {report.quantum_correction_rate:.6f}",
        f"classical replace rate    {report.classical_replace_rate:.6f}",
        f"|difference|              {report.correction_gap:.6f}  (4σ radius {report.correction_radius:.6f})",
        f"quantum Bob-H rate        {report.quantum_bobH_rate:.6f}  (|α|² = {report.expected_bobH_rate:.6f}, 4σ radius {report.bobH_radius:.6f})",
        f"message R fraction        {report.message_R_fraction:.6f}",
        f"classical box exact       {'yes' if report.classical_exact else 'no'}",
        f"verdict                   {'PASS' if report.passed else 'FAIL'}",
    ]
