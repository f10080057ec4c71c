"""Symbolic algebra over labelled bosonic creation operators.

States are polynomials in commuting creation operators acting on the vacuum.
A :class:`Monomial` is a canonical (sorted) multiset of :class:`Mode` labels
and a :class:`StateVector` is a sparse map from monomials to complex
amplitudes.  Distinct monomials are orthogonal; a monomial with occupation
numbers ``n_i`` has squared norm ``prod(n_i!)``.

Amplitudes are never normalised implicitly.  Only :func:`collapse_on`,
:func:`born_distribution` and :func:`fidelity` divide by the norm.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Tuple, Union

PRUNE_TOL = 1e-12
SIG_DIGITS = 15

Scalar = Union[complex, float, int]


class FockError(ValueError):
    """Invalid operation in the creation-operator algebra."""


class RewriteError(FockError):
    """A monomial matched zero or several pair-rewrite rules."""


class ZeroNormError(FockError):
    """An operation that needs a normalisable state got the zero vector."""


class Polarization(IntEnum):
    H = 0
    V = 1

    def flip(self) -> "Polarization":
        return Polarization.V if self is Polarization.H else Polarization.H


class Channel(IntEnum):
    CH1 = 0
    CH2 = 1
    CH3 = 2
    CHA = 3
    CHB = 4
    CHC = 5
    CHD = 6

    @property
    def label(self) -> str:
        return _CHANNEL_LABELS[self]

    @property
    def is_detector(self) -> bool:
        return self >= Channel.CHA

    @classmethod
    def from_label(cls, label: str) -> "Channel":
        try:
            return _CHANNEL_BY_LABEL[label.lower()]
        except KeyError:
            raise FockError(f"unknown channel label {label!r}") from None


_CHANNEL_LABELS = {
    Channel.CH1: "1",
    Channel.CH2: "2",
    Channel.CH3: "3",
    Channel.CHA: "a",
    Channel.CHB: "b",
    Channel.CHC: "c",
    Channel.CHD: "d",
}
_CHANNEL_BY_LABEL = {v: k for k, v in _CHANNEL_LABELS.items()}

DETECTOR_CHANNELS = (Channel.CHA, Channel.CHB, Channel.CHC, Channel.CHD)


class Frequency(IntEnum):
    OMEGA = 0
    OMEGA_PRIME = 1
    OMEGA_DOUBLE_PRIME = 2
    OMEGA_PUMP = 3

    @property
    def symbol(self) -> str:
        return _FREQUENCY_SYMBOLS[self]


_FREQUENCY_SYMBOLS = {
    Frequency.OMEGA: "ω",
    Frequency.OMEGA_PRIME: "ω′",
    Frequency.OMEGA_DOUBLE_PRIME: "ω″",
    Frequency.OMEGA_PUMP: "ωp",
}


@dataclass(frozen=True)
class Mode:
    """One bosonic mode: polarization, propagation channel and frequency label.

    Detector channels ``a``-``d`` only carry summed-frequency photons.
    Modes are totally ordered by ``(channel, polarization, frequency)``.
    """

    polarization: Polarization
    channel: Channel
    frequency: Frequency = Frequency.OMEGA
    key: Tuple[int, int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        try:
            pol = Polarization(self.polarization)
            chan = Channel(self.channel)
            freq = Frequency(self.frequency)
        except ValueError as exc:
            raise FockError(f"invalid mode field: {exc}") from None
        if chan.is_detector and freq is not Frequency.OMEGA_DOUBLE_PRIME:
            raise FockError(
                f"detector channel {chan.label} only carries ω″ photons, got {freq.symbol}"
            )
        object.__setattr__(self, "polarization", pol)
        object.__setattr__(self, "channel", chan)
        object.__setattr__(self, "frequency", freq)
        object.__setattr__(self, "key", (int(chan), int(pol), int(freq)))

    def __lt__(self, other: "Mode") -> bool:
        if not isinstance(other, Mode):
            return NotImplemented
        return self.key < other.key

    def replace(self, **changes) -> "Mode":
        fields = {
            "polarization": self.polarization,
            "channel": self.channel,
            "frequency": self.frequency,
        }
        fields.update(changes)
        return Mode(**fields)

    def __str__(self) -> str:
        return f"({self.polarization.name}{self.channel.label},{self.frequency.symbol})"


def mode(label: str, frequency: Optional[Frequency] = None) -> Mode:
    """Shorthand constructor: ``mode("H3")``, ``mode("V1", Frequency.OMEGA_PRIME)``.

    Detector channels default to ω″, everything else to ω.
    """
    if len(label) != 2:
        raise FockError(f"mode label must look like 'H3' or 'Va', got {label!r}")
    try:
        pol = Polarization[label[0].upper()]
    except KeyError:
        raise FockError(f"unknown polarization in {label!r}") from None
    chan = Channel.from_label(label[1])
    if frequency is None:
        frequency = Frequency.OMEGA_DOUBLE_PRIME if chan.is_detector else Frequency.OMEGA
    return Mode(pol, chan, frequency)


@dataclass(frozen=True)
class Monomial:
    """Commuting product of creation operators, stored as a sorted mode tuple."""

    modes: Tuple[Mode, ...] = ()

    def __post_init__(self) -> None:
        modes = tuple(self.modes)
        for m in modes:
            if not isinstance(m, Mode):
                raise FockError(f"monomial entries must be Mode, got {type(m).__name__}")
        object.__setattr__(self, "modes", tuple(sorted(modes, key=_mode_key)))

    @property
    def degree(self) -> int:
        return len(self.modes)

    @property
    def sort_key(self) -> Tuple[Tuple[int, int, int], ...]:
        return tuple(m.key for m in self.modes)

    def __lt__(self, other: "Monomial") -> bool:
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.sort_key < other.sort_key

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self) -> Iterator[Mode]:
        return iter(self.modes)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        return Monomial(self.modes + other.modes)

    def occupations(self) -> Counter:
        return Counter(self.modes)

    def norm_sq(self) -> int:
        """``<m|m>`` for the normalised-operator convention: product of n_i!."""
        out = 1
        for n in Counter(self.modes).values():
            out *= math.factorial(n)
        return out

    def remove(self, *modes: Mode) -> "Monomial":
        """Drop one occurrence of each given mode."""
        rest = list(self.modes)
        for m in modes:
            try:
                rest.remove(m)
            except ValueError:
                raise FockError(f"{m} not present in {self}") from None
        return Monomial(tuple(rest))

    def without(self, drop: Callable[[Mode], bool]) -> "Monomial":
        return Monomial(tuple(m for m in self.modes if not drop(m)))

    def split(self, channels: Iterable[Channel]) -> Tuple["Monomial", "Monomial"]:
        """Split into (modes inside ``channels``, modes outside)."""
        chans = frozenset(channels)
        inside = tuple(m for m in self.modes if m.channel in chans)
        outside = tuple(m for m in self.modes if m.channel not in chans)
        return Monomial(inside), Monomial(outside)

    def channels(self) -> frozenset:
        return frozenset(m.channel for m in self.modes)

    def __str__(self) -> str:
        if not self.modes:
            return "|0⟩"
        return "".join(str(m) for m in self.modes)


def _mode_key(m: Mode) -> Tuple[int, int, int]:
    return m.key


VACUUM = Monomial(())


def canonical_monomial(modes: Sequence[Mode]) -> Monomial:
    return Monomial(tuple(modes))


def _check_finite(z: complex, what: str) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise FockError(f"non-finite {what}: {z!r}")
    return z


def format_amplitude(z: complex) -> str:
    """Fixed-width-free canonical text: ``0.6``, ``-1``, ``0.6+0.8i``."""
    re = z.real + 0.0
    im = z.imag + 0.0
    if im == 0.0:
        return f"{re:.{SIG_DIGITS}g}"
    return f"{re:.{SIG_DIGITS}g}{im:+.{SIG_DIGITS}g}i"


class StateVector(Mapping):
    """Sparse superposition of monomials; immutable.

    Terms whose amplitude modulus falls below ``PRUNE_TOL`` are dropped at
    construction, so the empty mapping is the zero vector.  Iteration follows
    the canonical monomial order.
    """

    __slots__ = ("_terms",)

    def __init__(
        self,
        terms: Union[Mapping, Iterable[Tuple[Monomial, Scalar]]] = (),
    ) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for mono, amp in items:
            if not isinstance(mono, Monomial):
                raise FockError(f"state keys must be Monomial, got {type(mono).__name__}")
            acc[mono] = acc.get(mono, 0j) + _check_finite(amp, "amplitude")
        kept = sorted((m for m, a in acc.items() if abs(a) >= PRUNE_TOL), key=_mono_key)
        object.__setattr__(self, "_terms", {m: acc[m] for m in kept})

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @classmethod
    def basis(cls, *modes: Mode, amplitude: Scalar = 1.0) -> "StateVector":
        return cls({Monomial(modes): amplitude})

    @classmethod
    def vacuum(cls) -> "StateVector":
        return cls({VACUUM: 1.0})

    @classmethod
    def zero(cls) -> "StateVector":
        return cls()

    def __getitem__(self, mono: Monomial) -> complex:
        return self._terms[mono]

    def get(self, mono, default=0j):
        return self._terms.get(mono, default)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other: "StateVector") -> "StateVector":
        if not isinstance(other, StateVector):
            return NotImplemented
        return linear_combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "StateVector") -> "StateVector":
        if not isinstance(other, StateVector):
            return NotImplemented
        return linear_combine([(1.0, self), (-1.0, other)])

    def __neg__(self) -> "StateVector":
        return self * -1.0

    def __mul__(self, scalar: Scalar) -> "StateVector":
        if not isinstance(scalar, (int, float, complex)):
            return NotImplemented
        c = _check_finite(scalar, "coefficient")
        return StateVector((m, c * a) for m, a in self._terms.items())

    __rmul__ = __mul__

    def norm_sq(self) -> float:
        return sum(abs(a) ** 2 * m.norm_sq() for m, a in self._terms.items())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ZeroNormError("cannot normalise the zero vector")
        return self * (1.0 / n)

    def degrees(self) -> frozenset:
        return frozenset(m.degree for m in self._terms)

    def max_abs_diff(self, other: "StateVector") -> float:
        keys = set(self._terms) | set(other)
        return max((abs(self.get(k) - other.get(k)) for k in keys), default=0.0)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{format_amplitude(a)}·{m}" for m, a in self._terms.items())

    __str__ = to_text

    def __repr__(self) -> str:
        return f"StateVector({self.to_text()!r})"


def _mono_key(m: Monomial):
    return (m.degree, m.sort_key)


def linear_combine(pairs: Iterable[Tuple[Scalar, StateVector]]) -> StateVector:
    acc: dict = {}
    for coeff, vec in pairs:
        c = _check_finite(coeff, "coefficient")
        for m, a in vec.items():
            acc[m] = acc.get(m, 0j) + c * a
    return StateVector(acc)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    acc: dict = {}
    for ma, xa in a.items():
        for mb, xb in b.items():
            m = ma * mb
            acc[m] = acc.get(m, 0j) + xa * xb
    return StateVector(acc)


class LinearSubstitution:
    """Linear map on creation operators, extended multiplicatively to monomials.

    ``rules[mode]`` is a sequence of ``(coefficient, image_mode)`` pairs;
    modes without a rule map to themselves.
    """

    __slots__ = ("_rules",)

    def __init__(self, rules: Mapping[Mode, Sequence[Tuple[Scalar, Mode]]] = ()) -> None:
        frozen = {}
        for src, image in dict(rules).items():
            if not isinstance(src, Mode):
                raise FockError(f"substitution keys must be Mode, got {type(src).__name__}")
            pairs = tuple((_check_finite(c, "coefficient"), m) for c, m in image)
            targets = [m for _, m in pairs]
            if len(set(targets)) != len(targets):
                raise FockError(f"rule for {src} repeats an output mode")
            frozen[src] = pairs
        object.__setattr__(self, "_rules", frozen)

    def __setattr__(self, name, value):
        raise AttributeError("LinearSubstitution is immutable")

    @property
    def rules(self) -> Mapping[Mode, Tuple[Tuple[complex, Mode], ...]]:
        return dict(self._rules)

    def image(self, m: Mode) -> Tuple[Tuple[complex, Mode], ...]:
        return self._rules.get(m, ((1 + 0j, m),))

    @classmethod
    def relabel(cls, mapping: Mapping[Mode, Mode]) -> "LinearSubstitution":
        return cls({src: ((1.0, dst),) for src, dst in mapping.items()})

    @classmethod
    def channel_map(
        cls,
        mapping: Mapping[Channel, Channel],
        frequencies: Optional[Iterable[Frequency]] = None,
    ) -> "LinearSubstitution":
        """Move every mode of each source channel to the target channel."""
        freqs = tuple(frequencies) if frequencies is not None else tuple(Frequency)
        rules = {}
        for src, dst in mapping.items():
            for pol in Polarization:
                for f in freqs:
                    if Channel(src).is_detector and f is not Frequency.OMEGA_DOUBLE_PRIME:
                        continue
                    rules[Mode(pol, src, f)] = ((1.0, Mode(pol, dst, f)),)
        return cls(rules)

    @classmethod
    def polarization_swap(
        cls, channel: Channel, frequencies: Optional[Iterable[Frequency]] = None
    ) -> "LinearSubstitution":
        """H <-> V on one channel; an involution."""
        if frequencies is None:
            frequencies = (
                (Frequency.OMEGA_DOUBLE_PRIME,) if Channel(channel).is_detector else tuple(Frequency)
            )
        rules = {}
        for f in frequencies:
            for pol in Polarization:
                rules[Mode(pol, channel, f)] = ((1.0, Mode(pol.flip(), channel, f)),)
        return cls(rules)


IDENTITY = LinearSubstitution()


def _substitute_monomial(s: LinearSubstitution, mono: Monomial) -> dict:
    partial = {(): 1 + 0j}
    for m in mono.modes:
        nxt: dict = {}
        for prefix, c in partial.items():
            for k, target in s.image(m):
                key = prefix + (target,)
                nxt[key] = nxt.get(key, 0j) + c * k
        partial = nxt
    out: dict = {}
    for modes, c in partial.items():
        mm = Monomial(modes)
        out[mm] = out.get(mm, 0j) + c
    return out


def apply_substitution(s: LinearSubstitution, v: StateVector) -> StateVector:
    acc: dict = {}
    for mono, amp in v.items():
        for out, c in _substitute_monomial(s, mono).items():
            acc[out] = acc.get(out, 0j) + amp * c
    return StateVector(acc)


class MatchingType(IntEnum):
    TYPE_I = 1
    TYPE_II = 2


@dataclass(frozen=True)
class RewriteRule:
    """Frequency-summing crystal: a (ω′, ω) photon pair in channel 1 becomes one ω″ photon.

    ``matching_type`` is phase-matching metadata only.
    """

    index: int
    inputs: Tuple[Tuple[Polarization, Frequency], Tuple[Polarization, Frequency]]
    output_polarization: Polarization
    matching_type: MatchingType
    output_frequency: Frequency = Frequency.OMEGA_DOUBLE_PRIME
    output_channel: Channel = Channel.CH1
    input_channel: Channel = Channel.CH1

    def __post_init__(self) -> None:
        if len(self.inputs) != 2:
            raise FockError("a pair rewrite consumes exactly two modes")
        ins = tuple(sorted((Polarization(p), Frequency(f)) for p, f in self.inputs))
        object.__setattr__(self, "inputs", ins)

    @property
    def input_modes(self) -> Tuple[Mode, Mode]:
        (p1, f1), (p2, f2) = self.inputs
        return Mode(p1, self.input_channel, f1), Mode(p2, self.input_channel, f2)

    @property
    def output_mode(self) -> Mode:
        return Mode(self.output_polarization, self.output_channel, self.output_frequency)

    def matches(self, mono: Monomial) -> bool:
        need = Counter(self.input_modes)
        have = mono.occupations()
        return all(have[m] >= n for m, n in need.items())

    def apply(self, mono: Monomial, output_channel: Optional[Channel] = None) -> Monomial:
        out = self.output_mode
        if output_channel is not None:
            out = out.replace(channel=output_channel)
        return Monomial(mono.remove(*self.input_modes).modes + (out,))


_H, _V = Polarization.H, Polarization.V
_W, _WP = Frequency.OMEGA, Frequency.OMEGA_PRIME

CRYSTAL_RULES: Tuple[RewriteRule, ...] = (
    RewriteRule(1, ((_H, _WP), (_V, _W)), _H, MatchingType.TYPE_II),
    RewriteRule(2, ((_H, _WP), (_H, _W)), _V, MatchingType.TYPE_I),
    RewriteRule(3, ((_V, _WP), (_V, _W)), _H, MatchingType.TYPE_I),
    RewriteRule(4, ((_V, _WP), (_H, _W)), _V, MatchingType.TYPE_II),
)


class RuleFirings(Mapping):
    """Which rule fired on each input monomial of a pair rewrite.

    Keeps the pre-rewrite state so that terms merged by the rewrite can
    still be told apart downstream.
    """

    __slots__ = ("_tags", "source", "rules")

    def __init__(
        self, tags: Mapping[Monomial, int], source: StateVector, rules: Sequence[RewriteRule]
    ) -> None:
        object.__setattr__(self, "_tags", dict(tags))
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "rules", {r.index: r for r in rules})

    def __setattr__(self, name, value):
        raise AttributeError("RuleFirings is immutable")

    def __getitem__(self, mono: Monomial) -> int:
        return self._tags[mono]

    def __iter__(self):
        return iter(self._tags)

    def __len__(self) -> int:
        return len(self._tags)

    def fired(self) -> Tuple[int, ...]:
        return tuple(self._tags[m] for m in self.source)


def apply_pair_rewrite(
    rules: Sequence[RewriteRule], v: StateVector
) -> Tuple[StateVector, RuleFirings]:
    acc: dict = {}
    tags = {}
    for mono, amp in v.items():
        hits = [r for r in rules if r.matches(mono)]
        if len(hits) != 1:
            which = "no" if not hits else f"{len(hits)} ({', '.join(str(r.index) for r in hits)})"
            raise RewriteError(f"monomial {mono} matches {which} crystal rules")
        rule = hits[0]
        out = rule.apply(mono)
        acc[out] = acc.get(out, 0j) + amp
        tags[mono] = rule.index
    return StateVector(acc), RuleFirings(tags, v, rules)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if len(b) < len(a):
        small, large, conj_small = b, a, False
    else:
        small, large, conj_small = a, b, True
    total = 0j
    for m, x in small.items():
        y = large.get(m)
        if y:
            total += (x.conjugate() * y if conj_small else y.conjugate() * x) * m.norm_sq()
    return total


def fidelity(a: StateVector, b: StateVector) -> float:
    na, nb = a.norm_sq(), b.norm_sq()
    if na == 0.0 or nb == 0.0:
        raise ZeroNormError("fidelity is undefined for the zero vector")
    return min(1.0, abs(inner_product(a, b)) ** 2 / (na * nb))


def equal_up_to_phase(a: StateVector, b: StateVector, tol: float = 1e-12) -> bool:
    return abs(fidelity(a, b) - 1.0) <= tol


def born_distribution(v: StateVector, key: Callable[[Monomial], Hashable]) -> dict:
    total = v.norm_sq()
    if total == 0.0:
        raise ZeroNormError("Born distribution of the zero vector")
    weights: dict = {}
    for m, a in v.items():
        label = key(m)
        weights[label] = weights.get(label, 0.0) + abs(a) ** 2 * m.norm_sq()
    return {label: w / total for label, w in weights.items()}


def _never(_: Mode) -> bool:
    return False


def project(
    v: StateVector,
    predicate: Callable[[Monomial], bool],
    absorb: Callable[[Mode], bool] = _never,
) -> StateVector:
    """Keep monomials satisfying ``predicate`` and delete absorbed modes; no renormalisation."""
    acc: dict = {}
    for m, a in v.items():
        if predicate(m):
            rest = m.without(absorb)
            acc[rest] = acc.get(rest, 0j) + a
    return StateVector(acc)


def collapse_on(
    v: StateVector,
    predicate: Callable[[Monomial], bool],
    absorb: Callable[[Mode], bool] = _never,
) -> StateVector:
    out = project(v, predicate, absorb)
    if not out:
        raise ZeroNormError("no monomial survives the post-selection")
    return out.normalized()


def factor_check(
    v: StateVector, partition: Iterable[Channel], tol: float = 1e-12
) -> Optional[Tuple[StateVector, StateVector]]:
    """Try to write ``v`` as (part inside ``partition``) x (part outside).

    Returns ``(inside, outside)`` with ``tensor(inside, outside) == v`` when
    the coefficient matrix has rank one, otherwise ``None``.  The outside
    factor is scaled so that its amplitude at the pivot column is 1.
    """
    if not v:
        return None
    chans = frozenset(partition)
    cells: dict = {}
    rows: dict = {}
    cols: dict = {}
    for m, a in v.items():
        inside, outside = m.split(chans)
        cells[(inside, outside)] = a
        rows.setdefault(inside, None)
        cols.setdefault(outside, None)
    (pi, pj), pivot = max(cells.items(), key=lambda kv: abs(kv[1]))
    left = {i: cells.get((i, pj), 0j) for i in rows}
    right = {j: cells.get((pi, j), 0j) / pivot for j in cols}
    scale = abs(pivot)
    for i in rows:
        for j in cols:
            if abs(cells.get((i, j), 0j) - left[i] * right[j]) > tol * scale:
                return None
    return StateVector(left), StateVector(right)


def wavelength_table(
    pump_um: float,
    spdc_um: float,
    message_um: float,
    summed_um: Optional[float] = None,
    rtol: float = 1e-9,
) -> dict:
    """Numeric wavelengths (µm) for the symbolic frequency labels.

    Checks the degenerate down-conversion relation ``ω = ω_p / 2`` and derives
    (or checks) the summed wavelength from ``ω″ = ω′ + ω``.
    """
    for name, lam in (("pump", pump_um), ("spdc", spdc_um), ("message", message_um)):
        if not (lam > 0 and math.isfinite(lam)):
            raise FockError(f"{name} wavelength must be positive, got {lam!r}")
    if not math.isclose(1.0 / spdc_um, 0.5 / pump_um, rel_tol=rtol):
        raise FockError(f"SPDC wavelength {spdc_um} is not twice the pump wavelength {pump_um}")
    expected = 1.0 / (1.0 / message_um + 1.0 / spdc_um)
    if summed_um is None:
        summed_um = expected
    elif not math.isclose(summed_um, expected, rel_tol=rtol):
        raise FockError(f"summed wavelength {summed_um} violates ω″ = ω′ + ω (expected {expected})")
    return {
        Frequency.OMEGA_PUMP: float(pump_um),
        Frequency.OMEGA: float(spdc_um),
        Frequency.OMEGA_PRIME: float(message_um),
        Frequency.OMEGA_DOUBLE_PRIME: float(summed_um),
    }


EXAMPLE_WAVELENGTHS = wavelength_table(0.5, 1.0, 0.7)


def check_energy_conservation(rule: RewriteRule, table: Mapping, rtol: float = 1e-9) -> float:
    """Return the output wavelength of ``rule``; raise if 1/λ_out != Σ 1/λ_in."""
    inverse_in = sum(1.0 / table[f] for _, f in rule.inputs)
    lam_out = table[rule.output_frequency]
    if not math.isclose(1.0 / lam_out, inverse_in, rel_tol=rtol):
        raise FockError(
            f"rule {rule.index}: 1/λ_out = {1.0 / lam_out} but inputs sum to {inverse_in}"
        )
    return lam_out
