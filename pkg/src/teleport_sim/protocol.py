"""Photon teleportation pipeline built on the creation-operator algebra.

Stages, in order: the SPDC pair, the joint three-photon state, Alice's
dichroic merge of channel 2 into channel 1, frequency summation in the four
crystals, the split into detector channels ``a``-``d``, the corrected
(factorised) state and Bob's final photon.  :func:`symbolic_run` produces all
of them and checks the teleportation claims; :func:`sample_trial` and
:func:`sample_batch` draw detector clicks by the Born rule.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from functools import lru_cache
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from . import _kernels
from .fock import (
    CRYSTAL_RULES,
    DETECTOR_CHANNELS,
    Channel,
    FockError,
    Frequency,
    LinearSubstitution,
    Mode,
    Monomial,
    Polarization,
    RuleFirings,
    StateVector,
    ZeroNormError,
    apply_pair_rewrite,
    apply_substitution,
    born_distribution,
    collapse_on,
    factor_check,
    fidelity,
    linear_combine,
    project,
    tensor,
)

NORM_TOL = 1e-12
FIDELITY_TOL = 1e-12

H, V = Polarization.H, Polarization.V
W, WP, WPP = Frequency.OMEGA, Frequency.OMEGA_PRIME, Frequency.OMEGA_DOUBLE_PRIME

__all__ = [
    "DetectorOutcome",
    "Instruction",
    "MessageCoefficients",
    "ProtocolError",
    "ProtocolVariant",
    "FOUR_CRYSTAL",
    "TWO_CRYSTAL",
    "Timestamps",
    "TrialRecord",
    "TrialBatch",
    "Stage",
    "BranchCheck",
    "build_message_state",
    "build_spdc_state",
    "build_joint_state",
    "merge_alice_channel",
    "sum_frequencies",
    "split_to_detectors",
    "alice_instruction",
    "apply_bob_correction",
    "apply_branch_corrections",
    "branch_checks",
    "detector_distribution",
    "fidelity",
    "message_at_bob",
    "sample_trial",
    "sample_batch",
    "symbolic_run",
]


class ProtocolError(FockError):
    """A teleportation check failed; ``stage`` names where."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class DetectorOutcome(IntEnum):
    A = 0
    B = 1
    C = 2
    D = 3

    @property
    def channel(self) -> Channel:
        return DETECTOR_CHANNELS[self]

    @property
    def rule_index(self) -> int:
        return int(self) + 1

    @classmethod
    def from_channel(cls, channel: Channel) -> "DetectorOutcome":
        return cls(DETECTOR_CHANNELS.index(channel))

    @classmethod
    def from_rule(cls, index: int) -> "DetectorOutcome":
        return cls(index - 1)


class Instruction(Enum):
    NO_OP = "NoOp"
    FLIP_V_TO_H = "FlipVtoH"
    FLIP_H_TO_V = "FlipHtoV"

    @property
    def is_correction(self) -> bool:
        return self is not Instruction.NO_OP


_INSTRUCTIONS = {
    DetectorOutcome.A: Instruction.NO_OP,
    DetectorOutcome.B: Instruction.FLIP_V_TO_H,
    DetectorOutcome.C: Instruction.FLIP_H_TO_V,
    DetectorOutcome.D: Instruction.NO_OP,
}


def alice_instruction(outcome: DetectorOutcome) -> Instruction:
    """Crystals 1 and 4 mean Bob's photon is already right; 2 and 3 mean flip it."""
    return _INSTRUCTIONS[DetectorOutcome(outcome)]


@dataclass(frozen=True)
class MessageCoefficients:
    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        a, b = complex(self.alpha), complex(self.beta)
        for z in (a, b):
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise FockError(f"non-finite message coefficient {z!r}")
        total = abs(a) ** 2 + abs(b) ** 2
        if abs(total - 1.0) > NORM_TOL:
            raise FockError(f"|alpha|^2 + |beta|^2 = {total!r}, expected 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "MessageCoefficients":
        n = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if n == 0.0:
            raise ZeroNormError("alpha = beta = 0 is not a message")
        return cls(complex(alpha) / n, complex(beta) / n)

    @classmethod
    def haar_random(cls, rng: np.random.Generator) -> "MessageCoefficients":
        """Uniform on the Bloch sphere, with a random global phase."""
        cos_theta = rng.uniform(-1.0, 1.0)
        phi, chi = rng.uniform(0.0, 2 * math.pi, size=2)
        half = math.acos(cos_theta) / 2
        glob = cmath.exp(1j * chi)
        return cls.normalized(glob * math.cos(half), glob * cmath.exp(1j * phi) * math.sin(half))

    @property
    def p_h(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def p_v(self) -> float:
        return abs(self.beta) ** 2


@dataclass(frozen=True)
class ProtocolVariant:
    """Four crystals (Alice always calls) or two (Bob acts on timeout for a and d).

    Times are integer nanoseconds of simulated clock.
    """

    crystal_count: int = 4
    timeout_dt: int = 10
    call_latency: int = 1

    def __post_init__(self) -> None:
        if self.crystal_count not in (2, 4):
            raise ValueError(f"crystal_count must be 2 or 4, got {self.crystal_count}")
        if self.timeout_dt <= 0:
            raise ValueError("timeout_dt must be positive")
        if self.call_latency < 0:
            raise ValueError("call_latency must be nonnegative")
        if self.crystal_count == 2 and self.call_latency >= self.timeout_dt:
            raise ValueError("two-crystal variant needs call_latency < timeout_dt")

    @property
    def name(self) -> str:
        return "four-crystal" if self.crystal_count == 4 else "two-crystal"

    def has_crystal(self, outcome: DetectorOutcome) -> bool:
        return self.crystal_count == 4 or outcome in (DetectorOutcome.B, DetectorOutcome.C)


FOUR_CRYSTAL = ProtocolVariant(4)
TWO_CRYSTAL = ProtocolVariant(2)


class Timestamps(NamedTuple):
    photon_arrival: int
    click: Optional[int]
    call_sent: Optional[int]
    correction_applied: int
    detection: int


@dataclass(frozen=True)
class TrialRecord:
    outcome: DetectorOutcome
    instruction: Instruction
    bob_polarization_final: Polarization
    call_made: bool
    timestamps: Timestamps
    seed: int

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "outcome": self.outcome.name,
            "instruction": self.instruction.value,
            "final_polarization": self.bob_polarization_final.name,
            "call_made": self.call_made,
            "timestamps": self.timestamps._asdict(),
        }


# --- states -----------------------------------------------------------------


def build_message_state(c: MessageCoefficients) -> StateVector:
    return linear_combine(
        [
            (c.alpha, StateVector.basis(Mode(H, Channel.CH1, WP))),
            (c.beta, StateVector.basis(Mode(V, Channel.CH1, WP))),
        ]
    )


def build_spdc_state() -> StateVector:
    # unnormalised: the 1/sqrt(2) is dropped
    return StateVector(
        {
            Monomial((Mode(H, Channel.CH3), Mode(V, Channel.CH2))): 1.0,
            Monomial((Mode(H, Channel.CH2), Mode(V, Channel.CH3))): 1.0,
        }
    )


def build_joint_state(c: MessageCoefficients) -> StateVector:
    return tensor(build_message_state(c), build_spdc_state())


_MERGE = LinearSubstitution.channel_map({Channel.CH2: Channel.CH1})


def merge_alice_channel(v: StateVector) -> StateVector:
    return apply_substitution(_MERGE, v)


def sum_frequencies(v: StateVector) -> Tuple[StateVector, RuleFirings]:
    return apply_pair_rewrite(CRYSTAL_RULES, v)


def split_to_detectors(v: StateVector, tags: RuleFirings) -> StateVector:
    """Route each crystal's ω″ photon to its own detector channel.

    The summed state merges terms that differ only in which crystal fired,
    so the split is rebuilt from the pre-summation terms carried by ``tags``
    and cross-checked against ``v``.
    """
    acc: dict = {}
    merged: dict = {}
    for mono, amp in tags.source.items():
        try:
            index = tags[mono]
        except KeyError:
            raise FockError(f"no rule tag for monomial {mono}") from None
        rule = tags.rules[index]
        out = rule.apply(mono, output_channel=DetectorOutcome.from_rule(index).channel)
        acc[out] = acc.get(out, 0j) + amp
        plain = rule.apply(mono)
        merged[plain] = merged.get(plain, 0j) + amp
    if StateVector(merged).max_abs_diff(v) > NORM_TOL:
        raise FockError("rule tags do not reproduce the summed state")
    return StateVector(acc)


def _detector_of(m: Monomial) -> Optional[DetectorOutcome]:
    for md in m.modes:
        if md.channel.is_detector:
            return DetectorOutcome.from_channel(md.channel)
    return None


def _is_summed(m: Mode) -> bool:
    return m.frequency is WPP


_BOB_FLIP = LinearSubstitution.polarization_swap(Channel.CH3)


def apply_bob_correction(v: StateVector, instruction: Instruction) -> StateVector:
    """Flip polarization of channel-3 photons; both flips are the same H<->V swap."""
    if instruction is Instruction.NO_OP:
        return v
    return apply_substitution(_BOB_FLIP, v)


_DETECTORS_TO_CH1 = LinearSubstitution.channel_map(
    {ch: Channel.CH1 for ch in DETECTOR_CHANNELS}, frequencies=(WPP,)
)


def apply_branch_corrections(split: StateVector) -> StateVector:
    """Apply each term's correction and fold the detector channels back into channel 1.

    This is the factorised bookkeeping form, not an experimental stage.
    """
    parts = []
    for outcome in DetectorOutcome:
        branch = project(split, lambda m, o=outcome: _detector_of(m) is o)
        parts.append((1.0, apply_bob_correction(branch, alice_instruction(outcome))))
    return apply_substitution(_DETECTORS_TO_CH1, linear_combine(parts))


_MESSAGE_TO_BOB = LinearSubstitution.relabel(
    {Mode(H, Channel.CH1, WP): Mode(H, Channel.CH3, W), Mode(V, Channel.CH1, WP): Mode(V, Channel.CH3, W)}
)


def message_at_bob(c: MessageCoefficients) -> StateVector:
    """The message relabelled to Bob's channel and the SPDC frequency."""
    return apply_substitution(_MESSAGE_TO_BOB, build_message_state(c))


def detector_distribution(c: MessageCoefficients) -> Dict[DetectorOutcome, float]:
    split = _split_state(c)
    probs = born_distribution(split, _detector_of)
    return {o: probs.get(o, 0.0) for o in DetectorOutcome}


@lru_cache(maxsize=256)
def _split_state(c: MessageCoefficients) -> StateVector:
    merged = merge_alice_channel(build_joint_state(c))
    summed, tags = sum_frequencies(merged)
    return split_to_detectors(summed, tags)


# --- symbolic run -----------------------------------------------------------


class Stage(NamedTuple):
    name: str
    state: StateVector

    @property
    def factors(self) -> Optional[Tuple[StateVector, StateVector]]:
        """(channel-3 factor, channel-1 factor) for the factorised stage."""
        if self.name != "factorized":
            return None
        return factor_check(self.state, [Channel.CH3])

    def to_text(self) -> str:
        text = f"{self.name}: {self.state.to_text()}"
        factors = self.factors
        if factors is not None:
            bob, alice = factors
            text += f"\n{self.name} factors: ({bob.to_text()}) × ({alice.to_text()})"
        return text


STAGE_NAMES = ("spdc", "joint", "merged", "summed", "split", "factorized", "final")


@dataclass(frozen=True)
class BranchCheck:
    """One detector outcome after correction, weighted by its amplitude.

    ``state`` is Bob's photon in this branch with the ω″ photon absorbed and
    the amplitude kept; ``expected`` is the message component carrying the
    same polarization.  ``conditional_state`` is the renormalised state
    Bob holds once the click is known.
    """

    outcome: DetectorOutcome
    probability: float
    state: StateVector
    expected: StateVector
    deviation: float
    branch_fidelity: float
    conditional_state: StateVector


def branch_checks(c: MessageCoefficients) -> List[BranchCheck]:
    split = _split_state(c)
    target = message_at_bob(c)
    probs = detector_distribution(c)
    out = []
    for outcome in DetectorOutcome:
        if probs[outcome] == 0.0:
            continue
        contains = lambda m, o=outcome: _detector_of(m) is o  # noqa: E731
        raw = project(split, contains, _is_summed)
        corrected = apply_bob_correction(raw, alice_instruction(outcome))
        expected = project(target, lambda m, keep=frozenset(corrected): m in keep)
        conditional = apply_bob_correction(
            collapse_on(split, contains, _is_summed), alice_instruction(outcome)
        )
        out.append(
            BranchCheck(
                outcome=outcome,
                probability=probs[outcome],
                state=corrected,
                expected=expected,
                deviation=corrected.max_abs_diff(expected),
                branch_fidelity=fidelity(corrected, expected) if expected else 0.0,
                conditional_state=conditional,
            )
        )
    return out


def symbolic_run(c: MessageCoefficients) -> List[Stage]:
    """All pipeline stages for message ``c``, with the teleportation checks applied.

    Raises :class:`ProtocolError` naming the first stage whose check fails.
    """
    spdc = build_spdc_state()
    joint = build_joint_state(c)
    merged = merge_alice_channel(joint)
    if abs(merged.norm_sq() - joint.norm_sq()) > NORM_TOL:
        raise ProtocolError("merged", "channel merge changed the norm")
    try:
        summed, tags = sum_frequencies(merged)
    except FockError as exc:
        raise ProtocolError("summed", str(exc)) from exc
    if any(m.degree != 2 for m in summed):
        raise ProtocolError("summed", "summation must leave biphoton terms")
    split = split_to_detectors(summed, tags)

    corrected = apply_branch_corrections(split)
    factors = factor_check(corrected, [Channel.CH3])
    if factors is None:
        raise ProtocolError("factorized", "corrected state does not factorise across channel 3")
    target = message_at_bob(c)
    if abs(fidelity(factors[0], target) - 1.0) > FIDELITY_TOL:
        raise ProtocolError("factorized", "channel-3 factor differs from the message")

    for check in branch_checks(c):
        if check.deviation > FIDELITY_TOL or abs(check.branch_fidelity - 1.0) > FIDELITY_TOL:
            raise ProtocolError(
                "final", f"branch {check.outcome.name} leaves {check.state}, expected {check.expected}"
            )
    final = collapse_on(corrected, lambda m: True, _is_summed)
    branch_sum = linear_combine((1.0, b.state) for b in branch_checks(c)).normalized()
    if abs(fidelity(final, branch_sum) - 1.0) > FIDELITY_TOL:
        raise ProtocolError("final", "branch-by-branch result disagrees with the factorised form")
    if abs(fidelity(final, target) - 1.0) > FIDELITY_TOL:
        raise ProtocolError("final", f"final state {final} is not the message {target}")

    return [
        Stage("spdc", spdc),
        Stage("joint", joint),
        Stage("merged", merged),
        Stage("summed", summed),
        Stage("split", split),
        Stage("factorized", corrected),
        Stage("final", final),
    ]


# --- sampling ---------------------------------------------------------------


@lru_cache(maxsize=256)
def _outcome_table(c: MessageCoefficients) -> Tuple[np.ndarray, Tuple[Optional[Polarization], ...]]:
    probs = detector_distribution(c)
    p = np.array([probs[o] for o in DetectorOutcome])
    cum = np.cumsum(p)
    cum /= cum[-1]
    last = int(np.flatnonzero(p > 0)[-1])
    cum[last:] = 1.0
    finals: List[Optional[Polarization]] = []
    split = _split_state(c)
    for o in DetectorOutcome:
        if p[o] == 0.0:
            finals.append(None)
            continue
        bob = collapse_on(split, lambda m, o=o: _detector_of(m) is o, _is_summed)
        bob = apply_bob_correction(bob, alice_instruction(o))
        (mono,) = bob.keys()
        finals.append(mono.modes[0].polarization)
    cum.flags.writeable = False
    return cum, tuple(finals)


def _timestamps(outcome: DetectorOutcome, variant: ProtocolVariant, arrival: int = 0) -> Timestamps:
    if variant.has_crystal(outcome):
        click = arrival
        applied = click + variant.call_latency
        return Timestamps(arrival, click, click, applied, applied)
    applied = arrival + variant.timeout_dt
    return Timestamps(arrival, None, None, applied, applied)


def _record(variant, outcome, seed, final) -> TrialRecord:
    return TrialRecord(
        outcome=outcome,
        instruction=alice_instruction(outcome),
        bob_polarization_final=final,
        call_made=variant.has_crystal(outcome),
        timestamps=_timestamps(outcome, variant),
        seed=seed,
    )


def sample_trial(c: MessageCoefficients, variant: ProtocolVariant, seed: int) -> TrialRecord:
    """One teleportation event; deterministic in ``seed``."""
    cum, finals = _outcome_table(c)
    seed = _kernels.to_u64(seed)
    outcome = DetectorOutcome(_kernels.categorical_from_seed(seed, cum))
    return _record(variant, outcome, seed, finals[outcome])


@dataclass(frozen=True)
class TrialBatch:
    """Columnar Monte Carlo results; ``records()`` materialises TrialRecords."""

    coefficients: MessageCoefficients
    variant: ProtocolVariant
    master_seed: int
    seeds: np.ndarray
    outcomes: np.ndarray
    final_h: np.ndarray

    def __len__(self) -> int:
        return len(self.outcomes)

    def records(self) -> Iterator[TrialRecord]:
        _, finals = _outcome_table(self.coefficients)
        for seed, o in zip(self.seeds.tolist(), self.outcomes.tolist()):
            outcome = DetectorOutcome(o)
            yield _record(self.variant, outcome, seed, finals[outcome])

    def histogram(self) -> Dict[str, int]:
        counts = np.bincount(self.outcomes, minlength=4)
        return {o.name: int(counts[o]) for o in DetectorOutcome}

    @property
    def correction_rate(self) -> float:
        corrected = (self.outcomes == DetectorOutcome.B) | (self.outcomes == DetectorOutcome.C)
        return float(corrected.mean()) if len(self) else 0.0

    @property
    def final_h_rate(self) -> float:
        return float(self.final_h.mean()) if len(self) else 0.0

    @property
    def call_rate(self) -> float:
        if self.variant.crystal_count == 4:
            return 1.0 if len(self) else 0.0
        return self.correction_rate


def sample_batch(
    c: MessageCoefficients, variant: ProtocolVariant, trials: int, master_seed: int
) -> TrialBatch:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cum, finals = _outcome_table(c)
    master = _kernels.to_u64(master_seed)
    seeds, outcomes = _kernels.sample_outcomes(master, trials, cum)
    lookup = np.array([f is H for f in finals], dtype=bool)
    return TrialBatch(c, variant, master, seeds, outcomes, lookup[outcomes])
