"""Classical analog: two lottery machines, Cliff's filter, Alice's comparison, Bob's box.

Colours are coded as integers (R = 0, B = 1) so the conveyor can run as a
batch kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels


class BallColor(IntEnum):
    R = 0
    B = 1

    def opposite(self) -> "BallColor":
        return BallColor.B if self is BallColor.R else BallColor.R


# index order as listed, not binary order
ALPHABET: Tuple[str, ...] = ("RRR", "RRB", "RBR", "BRR", "RBB", "BRB", "BBR", "BBB")
_CODE_INDEX = {word: i for i, word in enumerate(ALPHABET)}


class MessageError(ValueError):
    pass


def alphabet_encode(symbols: Sequence[int]) -> List[BallColor]:
    balls: List[BallColor] = []
    for s in symbols:
        if not isinstance(s, (int, np.integer)) or not 0 <= s < len(ALPHABET):
            raise MessageError(f"symbol {s!r} outside 0..7")
        balls.extend(BallColor[ch] for ch in ALPHABET[s])
    return balls


def alphabet_decode(balls: Sequence[BallColor]) -> List[int]:
    if len(balls) % 3:
        raise MessageError(f"message length {len(balls)} is not a multiple of 3")
    word = "".join(BallColor(b).name for b in balls)
    return [_CODE_INDEX[word[i : i + 3]] for i in range(0, len(word), 3)]


@dataclass(frozen=True)
class ClassicalMessage:
    balls: Tuple[BallColor, ...]
    symbols: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        balls = tuple(BallColor(b) for b in self.balls)
        object.__setattr__(self, "balls", balls)
        if self.symbols is not None:
            symbols = tuple(int(s) for s in self.symbols)
            if list(balls) != alphabet_encode(symbols):
                raise MessageError("balls do not spell the given symbols")
            object.__setattr__(self, "symbols", symbols)

    @classmethod
    def from_text(cls, text: str) -> "ClassicalMessage":
        text = text.strip().upper()
        bad = set(text) - {"R", "B"}
        if bad:
            raise MessageError(f"message may only contain R and B, got {''.join(sorted(bad))!r}")
        return cls(tuple(BallColor[ch] for ch in text))

    @classmethod
    def from_symbols(cls, symbols) -> "ClassicalMessage":
        if isinstance(symbols, str):
            text = symbols.strip()
            if not all(ch in "01234567" for ch in text):
                raise MessageError(f"symbols must be digits 0-7, got {symbols!r}")
            symbols = [int(ch) for ch in text]
        symbols = tuple(symbols)
        return cls(tuple(alphabet_encode(symbols)), symbols)

    def __len__(self) -> int:
        return len(self.balls)

    def to_text(self) -> str:
        return balls_text(self.balls)


def balls_text(balls: Sequence[BallColor]) -> str:
    return "".join(BallColor(b).name for b in balls)


@dataclass(frozen=True)
class BallPair:
    to_alice: BallColor
    to_bob: BallColor


class ClassicalInstruction(Enum):
    KEEP = "Keep"
    REPLACE = "Replace"


@dataclass(frozen=True)
class ClassicalTrialRecord:
    lm_pair: BallPair
    filtered: bool
    instruction: Optional[ClassicalInstruction] = None
    bob_final: Optional[BallColor] = None

    def __post_init__(self) -> None:
        if self.filtered and (self.instruction is not None or self.bob_final is not None):
            raise ValueError("a filtered pair never reaches Alice or Bob")

    def as_dict(self) -> dict:
        return {
            "lm_pair": self.lm_pair.to_alice.name + self.lm_pair.to_bob.name,
            "filtered": self.filtered,
            "instruction": self.instruction.value if self.instruction else None,
            "bob_final": self.bob_final.name if self.bob_final is not None else None,
        }


def lm_emit_pair(rng: np.random.Generator) -> BallPair:
    a, b = rng.integers(0, 2, size=2)
    return BallPair(BallColor(int(a)), BallColor(int(b)))


def lm_emit_pairs(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` pairs at once as an ``(n, 2)`` int8 array of (Alice, Bob) colours."""
    return rng.integers(0, 2, size=(n, 2), dtype=np.int8)


def cliff_filter(pair: BallPair) -> Optional[BallPair]:
    return None if pair.to_alice == pair.to_bob else pair


def alice_compare(message_ball: BallColor, alice_ball: BallColor) -> ClassicalInstruction:
    """Different colours: Bob already holds the message colour."""
    if message_ball == alice_ball:
        return ClassicalInstruction.REPLACE
    return ClassicalInstruction.KEEP


def bob_apply(bob_ball: BallColor, instruction: ClassicalInstruction) -> BallColor:
    if instruction is ClassicalInstruction.REPLACE:
        return BallColor(bob_ball).opposite()
    return BallColor(bob_ball)


_PAIRS = [[BallPair(BallColor(a), BallColor(b)) for b in (0, 1)] for a in (0, 1)]


def run_classical_teleport(
    msg: ClassicalMessage, seed: int
) -> Tuple[List[BallColor], List[ClassicalTrialRecord]]:
    """Send ``msg`` ball by ball; returns Bob's box and the per-pair trace.

    Filtered pairs consume machine draws but no message balls, so the run
    keeps drawing until every ball has a surviving pair.
    """
    rng = np.random.default_rng(_kernels.to_u64(seed))
    message = np.fromiter((int(b) for b in msg.balls), dtype=np.int8, count=len(msg.balls))
    box: List[BallColor] = []
    records: List[ClassicalTrialRecord] = []
    done = 0
    while done < len(message):
        remaining = message[done:]
        lm = lm_emit_pairs(rng, 2 * len(remaining) + 8)
        used, k, filtered, replace, bob_final = _kernels.classical_stream(remaining, lm)
        for i in range(used):
            pair = _PAIRS[lm[i, 0]][lm[i, 1]]
            if filtered[i]:
                records.append(ClassicalTrialRecord(pair, True))
                continue
            instr = ClassicalInstruction.REPLACE if replace[i] else ClassicalInstruction.KEEP
            final = BallColor(int(bob_final[i]))
            box.append(final)
            records.append(ClassicalTrialRecord(pair, False, instr, final))
        done += k
    return box, records
