import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teleport_sim.fock import (
    CRYSTAL_RULES,
    Channel,
    Frequency,
    LinearSubstitution,
    Mode,
    Monomial,
    Polarization,
    StateVector,
    apply_pair_rewrite,
    apply_substitution,
    born_distribution,
    canonical_monomial,
    fidelity,
    inner_product,
    linear_combine,
    mode,
    tensor,
)
from teleport_sim.protocol import Instruction, apply_bob_correction

W, WP = Frequency.OMEGA, Frequency.OMEGA_PRIME

ALL_MODES = [
    Mode(p, ch, f)
    for ch in Channel
    for p in Polarization
    for f in Frequency
    if not ch.is_detector or f is Frequency.OMEGA_DOUBLE_PRIME
]

modes = st.sampled_from(ALL_MODES)
amplitudes = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
monomials = st.lists(modes, max_size=4).map(lambda ms: Monomial(tuple(ms)))
states = st.dictionaries(monomials, amplitudes, max_size=5).map(StateVector)


def substitutions(pool):
    image = st.lists(st.tuples(amplitudes, st.sampled_from(pool)), min_size=1, max_size=3, unique_by=lambda p: p[1])
    return st.dictionaries(st.sampled_from(pool), image, max_size=len(pool)).map(LinearSubstitution)


@given(st.lists(modes, max_size=6), st.randoms())
def test_permutation_invariance(ms, rnd):
    shuffled = list(ms)
    rnd.shuffle(shuffled)
    assert canonical_monomial(ms) == canonical_monomial(shuffled)
    assert canonical_monomial(ms).degree == len(ms)


@settings(max_examples=60)
@given(st.lists(st.tuples(amplitudes, states), max_size=3), substitutions(ALL_MODES[:8]))
def test_substitution_is_linear(pairs, s):
    lhs = apply_substitution(s, linear_combine(pairs))
    rhs = linear_combine((c, apply_substitution(s, v)) for c, v in pairs)
    scale = max([1.0] + [abs(a) for a in lhs.values()] + [abs(a) for a in rhs.values()])
    assert lhs.max_abs_diff(rhs) <= 1e-12 * scale


@given(states, st.permutations(ALL_MODES))
def test_relabeling_is_isometry(v, perm):
    s = LinearSubstitution.relabel(dict(zip(ALL_MODES, perm)))
    assert apply_substitution(s, v).norm_sq() == pytest.approx(v.norm_sq(), rel=1e-12, abs=1e-12)


@given(st.lists(st.tuples(st.sampled_from([(Polarization.H, Polarization.V)] * 2 + [(Polarization.V, Polarization.H)]),
                          st.sampled_from(list(Polarization)),
                          st.sampled_from(list(Polarization)),
                          st.lists(st.sampled_from([mode("H3"), mode("V3"), mode("H2")]), max_size=2),
                          amplitudes), max_size=4))
def test_pair_rewrite_drops_degree_by_one(terms):
    state = StateVector(
        {
            Monomial((Mode(p1, Channel.CH1, WP), Mode(p2, Channel.CH1, W), *rest)): a
            for _, p1, p2, rest, a in terms
        }
    )
    out, tags = apply_pair_rewrite(CRYSTAL_RULES, state)
    for mono in state:
        rule = next(r for r in CRYSTAL_RULES if r.index == tags[mono])
        assert rule.apply(mono).degree == mono.degree - 1
    assert all(m.degree == d - 1 for m in out for d in {max(state.degrees())} if len(state.degrees()) == 1)


@given(states.filter(bool))
def test_born_completeness(v):
    p = born_distribution(v, lambda m: m.degree)
    assert all(x >= 0 for x in p.values())
    assert sum(p.values()) == pytest.approx(1.0, abs=1e-12)


@given(states, states)
def test_inner_product_hermitian(a, b):
    assert inner_product(a, b) == pytest.approx(inner_product(b, a).conjugate(), rel=1e-12, abs=1e-9)
    assert inner_product(a, a).imag == 0.0
    assert inner_product(a, a).real >= 0.0


@given(st.lists(st.sampled_from(ALL_MODES[:3]), min_size=1, max_size=6))
def test_multi_occupancy_norm(ms):
    m = Monomial(tuple(ms))
    expected = math.prod(math.factorial(ms.count(x)) for x in set(ms))
    assert StateVector.basis(*ms).norm_sq() == expected == m.norm_sq()


@given(st.integers(0, 4), st.integers(0, 4))
def test_balanced_mixing_is_unitary_on_fock_states(n_h, n_v):
    # a 50:50 polarization rotation conserves <v|v> only with the n! weights
    h, v = mode("H3"), mode("V3")
    r = 1 / math.sqrt(2)
    s = LinearSubstitution({h: [(r, h), (r, v)], v: [(r, h), (-r, v)]})
    state = StateVector.basis(*([h] * n_h + [v] * n_v))
    out = apply_substitution(s, state)
    assert out.norm_sq() == pytest.approx(state.norm_sq(), rel=1e-12)


def test_hong_ou_mandel_bunching():
    h, v = mode("H3"), mode("V3")
    r = 1 / math.sqrt(2)
    s = LinearSubstitution({h: [(r, h), (r, v)], v: [(r, h), (-r, v)]})
    out = apply_substitution(s, StateVector.basis(h, v))
    assert Monomial((h, v)) not in out
    assert fidelity(out, StateVector({Monomial((h, h)): 1, Monomial((v, v)): -1})) == pytest.approx(1.0)


@given(states, st.sampled_from([Instruction.FLIP_V_TO_H, Instruction.FLIP_H_TO_V]))
def test_correction_involution(v, instruction):
    assert apply_bob_correction(apply_bob_correction(v, instruction), instruction) == v


@given(states, states)
def test_tensor_norm_multiplies_for_disjoint_modes(a, b):
    # move b into channel 3 / channel 1 modes disjoint from a's by relabelling
    a = apply_substitution(LinearSubstitution.channel_map({Channel.CH3: Channel.CH2}), a)
    b = StateVector({Monomial(tuple(mode("H3") if x.polarization is Polarization.H else mode("V3") for x in m)): c for m, c in b.items()})
    a = StateVector({m: c for m, c in a.items() if Channel.CH3 not in m.channels()})
    prod = tensor(a, b)
    if any(m.channels() & {Channel.CH3} for m in a):
        return
    expected = a.norm_sq() * b.norm_sq()
    assert prod.norm_sq() == pytest.approx(expected, rel=1e-9, abs=1e-9)
