"""Policy-based resource exchanges and their decision in contract logic."""

from .certificate import dumps as dump_certificate
from .certificate import loads as load_certificate
from .decision import Decision, contract_closure, decide, hilbert_basis
from .dsl import Scenario, parse_allocation, parse_exchange, parse_scenario, print_scenario
from .encoder import (
    check_transition_via_logic,
    decode_exchange,
    encode_exchange,
    encode_policies,
    encode_policy,
    encode_scenario,
    encode_state,
)
from .errors import CelxError, NotDecodable, NotInitial, ParseError, PreconditionError
from .model import Allocation, Environment, Exchange, Transfer, apply_exchange, exchange, validate_allocation
from .multiset import Multiset
from .normalize import normalize_proof
from .policy import (
    ExchangeRule,
    Policy,
    PolicySet,
    accepts,
    agreement_transitions,
    enumerate_agreements,
    is_agreement,
    validate_policy,
)
from .proof import Proof, Rule, check_proof, normal_form
from .syntax import Sequent, parse_prop, parse_sequent
from .valuation import (
    Valuation,
    ValuationSet,
    check_pareto,
    exchange_weight,
    is_deal,
    is_sound_policy,
    state_value,
    synthesize_rational_policy,
)

__version__ = "0.1.0"
