"""Command-line front end.

    teleport-sim symbolic --alpha 0.6 --beta 0.8
    teleport-sim run --alpha 0.6 --beta 0.8 --trials 100000 --seed 7 --format jsonl
    teleport-sim classical --message RRB --seed 3
    teleport-sim compare --alpha 1 --beta 0 --trials 100000

Exit status: 0 on success, 1 when a teleportation check fails, 2 on invalid
input.  Output is assembled in memory and written once, so a given
configuration always yields the same bytes.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .classical import ClassicalMessage, MessageError, run_classical_teleport
from .fock import FockError
from .harness import classical_summary, compare, report_lines, run_summary
from .protocol import (
    MessageCoefficients,
    ProtocolError,
    ProtocolVariant,
    sample_batch,
    symbolic_run,
)
from .trace import FORMATS, format_record, format_records, stage_lines

CLI_NORM_TOL = 1e-9

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2


class InputError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """``"re,im"`` or a bare real."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            z = complex(float(parts[0]), 0.0)
        elif len(parts) == 2:
            z = complex(float(parts[0]), float(parts[1]))
        else:
            raise ValueError
    except ValueError:
        raise InputError(f"cannot read {text!r} as 're,im' or a real number") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"non-finite coefficient {text!r}")
    return z


@dataclass
class RunConfig:
    command: str
    alpha: complex = 1.0
    beta: complex = 0.0
    trials: int = 10_000
    seed: int = 0
    variant: ProtocolVariant = field(default_factory=ProtocolVariant)
    message: Optional[ClassicalMessage] = None
    out: Optional[str] = None
    format: str = "text"

    def coefficients(self) -> MessageCoefficients:
        total = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(total - 1.0) > CLI_NORM_TOL:
            raise InputError(f"unnormalized input: |alpha|^2 + |beta|^2 = {total:.12g}")
        return MessageCoefficients.normalized(self.alpha, self.beta)


def cmd_symbolic(cfg: RunConfig) -> Tuple[int, List[str]]:
    c = cfg.coefficients()
    try:
        stages = symbolic_run(c)
    except ProtocolError as exc:
        return EXIT_CHECK_FAILED, [f"check failed at stage {exc.stage}: {exc}"]
    return EXIT_OK, list(stage_lines(stages, cfg.format))


def cmd_run(cfg: RunConfig) -> Tuple[int, List[str]]:
    c = cfg.coefficients()
    if cfg.trials < 1:
        raise InputError("--trials must be at least 1")
    batch = sample_batch(c, cfg.variant, cfg.trials, cfg.seed)
    lines = list(format_records((r.as_dict() for r in batch.records()), cfg.format))
    lines.append(format_record({"summary": run_summary(batch)}, cfg.format))
    return EXIT_OK, lines


def cmd_classical(cfg: RunConfig) -> Tuple[int, List[str]]:
    msg = cfg.message if cfg.message is not None else ClassicalMessage(())
    box, records = run_classical_teleport(msg, cfg.seed)
    summary = classical_summary(msg, box, records)
    lines = list(format_records((r.as_dict() for r in records), cfg.format))
    lines.append(format_record({"summary": summary.as_dict()}, cfg.format))
    if cfg.format == "text":
        lines.append(f"box: {summary.box}")
    return (EXIT_OK if summary.exact else EXIT_CHECK_FAILED), lines


def cmd_compare(cfg: RunConfig) -> Tuple[int, List[str]]:
    c = cfg.coefficients()
    if cfg.trials < 1:
        raise InputError("--trials must be at least 1")
    report = compare(c, cfg.variant, cfg.trials, cfg.seed, cfg.message)
    if cfg.format == "jsonl":
        lines = [format_record({"report": report.as_dict()}, cfg.format)]
    else:
        lines = report_lines(report)
    return (EXIT_OK if report.passed else EXIT_CHECK_FAILED), lines


COMMANDS = {
    "symbolic": cmd_symbolic,
    "run": cmd_run,
    "classical": cmd_classical,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teleport-sim",
        description="Creation-operator teleportation and its lottery-machine analog.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", default="1", help="H amplitude, 're,im' or real (default 1)")
    common.add_argument("--beta", default="0", help="V amplitude, 're,im' or real (default 0)")
    common.add_argument("--trials", type=int, default=10_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--variant", choices=("four-crystal", "two-crystal"), default="four-crystal")
    common.add_argument("--timeout", type=int, default=10, help="Bob's wait in the two-crystal variant (ns)")
    common.add_argument("--latency", type=int, default=1, help="phone-call latency (ns)")
    msg = common.add_mutually_exclusive_group()
    msg.add_argument("--message", help="classical message over {R,B}, e.g. RRB")
    msg.add_argument("--symbols", help="classical message as alphabet digits 0-7, e.g. 10")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=FORMATS, default="text")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("symbolic", parents=[common], help="print every pipeline stage and check it")
    sub.add_parser("run", parents=[common], help="Monte Carlo teleportation trials")
    sub.add_parser("classical", parents=[common], help="run the lottery-machine analog")
    sub.add_parser("compare", parents=[common], help="quantum vs classical rates")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    try:
        variant = ProtocolVariant(
            crystal_count=4 if ns.variant == "four-crystal" else 2,
            timeout_dt=ns.timeout,
            call_latency=ns.latency,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    message = None
    if ns.message is not None:
        message = ClassicalMessage.from_text(ns.message)
    elif ns.symbols is not None:
        message = ClassicalMessage.from_symbols(ns.symbols)
    return RunConfig(
        command=ns.command,
        alpha=parse_complex(ns.alpha),
        beta=parse_complex(ns.beta),
        trials=ns.trials,
        seed=ns.seed,
        variant=variant,
        message=message,
        out=ns.out,
        format=ns.format,
    )


def execute(cfg: RunConfig) -> Tuple[int, List[str]]:
    try:
        return COMMANDS[cfg.command](cfg)
    except (InputError, MessageError, FockError, ValueError) as exc:
        return EXIT_BAD_INPUT, [f"error: {exc}"]


def _emit(lines: Sequence[str], out: Optional[str], stream) -> None:
    data = "".join(line + "\n" for line in lines).encode("utf-8")
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        stream.buffer.write(data)
        stream.flush()


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (InputError, MessageError) as exc:
        _emit([f"error: {exc}"], None, sys.stderr)
        return EXIT_BAD_INPUT
    status, lines = execute(cfg)
    if status == EXIT_OK:
        _emit(lines, cfg.out, sys.stdout)
    elif status == EXIT_CHECK_FAILED:
        _emit(lines, cfg.out, sys.stdout)
        _emit(["error: teleportation check failed"], None, sys.stderr)
    else:
        _emit(lines, None, sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
