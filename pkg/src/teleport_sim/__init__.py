"""Creation-operator simulation of photon teleportation and its classical lottery-machine analog."""

from .classical import (
    ALPHABET,
    BallColor,
    BallPair,
    ClassicalInstruction,
    ClassicalMessage,
    ClassicalTrialRecord,
    alice_compare,
    alphabet_decode,
    alphabet_encode,
    bob_apply,
    cliff_filter,
    lm_emit_pair,
    run_classical_teleport,
)
from .fock import (
    CRYSTAL_RULES,
    Channel,
    FockError,
    Frequency,
    LinearSubstitution,
    Mode,
    Monomial,
    Polarization,
    RewriteError,
    RewriteRule,
    StateVector,
    ZeroNormError,
    apply_pair_rewrite,
    apply_substitution,
    born_distribution,
    canonical_monomial,
    collapse_on,
    factor_check,
    fidelity,
    inner_product,
    linear_combine,
    mode,
    tensor,
)
from .harness import ComparisonReport, compare
from .protocol import (
    FOUR_CRYSTAL,
    TWO_CRYSTAL,
    DetectorOutcome,
    Instruction,
    MessageCoefficients,
    ProtocolError,
    ProtocolVariant,
    TrialRecord,
    alice_instruction,
    apply_bob_correction,
    build_joint_state,
    build_message_state,
    build_spdc_state,
    merge_alice_channel,
    sample_batch,
    sample_trial,
    split_to_detectors,
    sum_frequencies,
    symbolic_run,
)

__version__ = "0.1.0"
