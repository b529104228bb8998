import random

import pytest

from achievechain.contract import (
    CODE_VERSION,
    CREATE_ADDRESS,
    ContractState,
    Deploy,
    RegisterUniversity,
    RevokeCertificate,
    StoreCertificate,
    call_to_payload,
    derive_contract_address,
    execute_call,
    payload_to_call,
    replay_state,
    replay_with_receipts,
    verify_certificate,
)
from achievechain.crypto import hex_decode, md5_digest
from achievechain.ledger import (
    Ledger,
    LedgerConfig,
    build_transaction,
    derive_address,
)
from permission_oracle import audit_log_against_oracle, random_call_log

ADMIN = derive_address(b"actor/admin")
UNI_A = derive_address(b"actor/uni-a")
UNI_B = derive_address(b"actor/uni-b")
STRANGER = derive_address(b"actor/stranger")

DIGEST_1 = md5_digest(b"certificate one")
DIGEST_2 = md5_digest(b"certificate two")


def deployed_state() -> ContractState:
    state = ContractState()
    assert execute_call(state, ADMIN, CREATE_ADDRESS, Deploy(), 1).ok
    return state


def registered_state() -> ContractState:
    state = deployed_state()
    target = state.contract_address
    assert execute_call(state, ADMIN, target, RegisterUniversity("Alpha University", UNI_A), 2).ok
    assert execute_call(state, ADMIN, target, RegisterUniversity("Beta Institute", UNI_B), 2).ok
    return state


# ---------------------------------------------------------------------------
# payload wire format
# ---------------------------------------------------------------------------


def test_payload_round_trip():
    calls = [
        Deploy(),
        RegisterUniversity("Alpha University", UNI_A),
        StoreCertificate(DIGEST_1, "s-100"),
        RevokeCertificate(DIGEST_1),
    ]
    for call in calls:
        assert payload_to_call(call_to_payload(call)) == call


def test_payload_kind_strings():
    assert call_to_payload(Deploy()) == {"kind": "deploy"}
    payload = call_to_payload(StoreCertificate(DIGEST_1, "s-1"))
    assert payload == {"kind": "store_certificate", "cert_digest": DIGEST_1, "student_ref": "s-1"}


@pytest.mark.parametrize(
    "bad",
    [
        None,
        {},
        {"kind": "mint_money"},
        {"kind": "store_certificate", "cert_digest": "nope", "student_ref": "s"},
        {"kind": "store_certificate", "cert_digest": DIGEST_1},
        {"kind": "register_university", "name": "X", "university_address": "short"},
        {"kind": "revoke_certificate", "cert_digest": 5},
    ],
)
def test_malformed_payloads_do_not_parse(bad):
    assert payload_to_call(bad) is None


def test_certificate_call_cannot_carry_document_bytes():
    # The store call accepts only a 32-hex digest; raw bytes are unrepresentable.
    doc = b"very secret certificate content"
    assert payload_to_call({"kind": "store_certificate", "cert_digest": doc.hex(), "student_ref": "s"}) is None


# ---------------------------------------------------------------------------
# deployment
# ---------------------------------------------------------------------------


def test_deploy_sets_admin_and_address():
    state = deployed_state()
    assert state.deployed
    assert state.admin == ADMIN
    assert state.contract_address == derive_contract_address(ADMIN)
    assert len(hex_decode(state.contract_address)) == 20


def test_contract_address_deterministic():
    assert derive_contract_address(ADMIN) == derive_contract_address(ADMIN)
    assert derive_contract_address(ADMIN) != derive_contract_address(UNI_A)


def test_redeploy_rejected_state_unchanged():
    state = deployed_state()
    result = execute_call(state, STRANGER, CREATE_ADDRESS, Deploy(), 5)
    assert not result.ok and result.error == "already deployed"
    assert state.admin == ADMIN
    assert state.code_version == CODE_VERSION


def test_calls_before_deploy_fail():
    state = ContractState()
    result = execute_call(state, ADMIN, CREATE_ADDRESS, RegisterUniversity("X", UNI_A), 1)
    assert not result.ok
    assert state.universities == {}


# ---------------------------------------------------------------------------
# university registration
# ---------------------------------------------------------------------------


def test_admin_registers_university():
    state = registered_state()
    assert state.universities[UNI_A].name == "Alpha University"
    assert state.universities[UNI_A].registered_at == 2


def test_non_admin_cannot_register():
    state = deployed_state()
    result = execute_call(state, UNI_A, state.contract_address, RegisterUniversity("Sneaky", UNI_B), 3)
    assert result.error == "unauthorized"
    assert UNI_B not in state.universities


def test_duplicate_registration_rejected():
    state = registered_state()
    result = execute_call(
        state, ADMIN, state.contract_address, RegisterUniversity("Alpha Again", UNI_A), 4
    )
    assert result.error == "duplicate"
    assert state.universities[UNI_A].name == "Alpha University"


def test_empty_name_rejected():
    state = deployed_state()
    result = execute_call(state, ADMIN, state.contract_address, RegisterUniversity("   ", UNI_A), 3)
    assert result.error == "empty name"


# ---------------------------------------------------------------------------
# certificates: store, revoke, verify
# ---------------------------------------------------------------------------


def test_store_certificate():
    state = registered_state()
    result = execute_call(
        state, UNI_A, state.contract_address, StoreCertificate(DIGEST_1, "s-100"), 5
    )
    assert result.ok
    entry = state.certificates[DIGEST_1]
    assert entry.issuer == UNI_A
    assert entry.stored_at == 5
    assert not entry.revoked


def test_store_requires_registration():
    state = registered_state()
    result = execute_call(
        state, STRANGER, state.contract_address, StoreCertificate(DIGEST_1, "s"), 5
    )
    assert result.error == "unauthorized"
    assert DIGEST_1 not in state.certificates


def test_store_duplicate_digest_rejected():
    state = registered_state()
    execute_call(state, UNI_A, state.contract_address, StoreCertificate(DIGEST_1, "s"), 5)
    result = execute_call(state, UNI_B, state.contract_address, StoreCertificate(DIGEST_1, "t"), 6)
    assert result.error == "duplicate digest"
    assert state.certificates[DIGEST_1].issuer == UNI_A


def test_revoke_by_issuer():
    state = registered_state()
    execute_call(state, UNI_A, state.contract_address, StoreCertificate(DIGEST_1, "s"), 5)
    result = execute_call(state, UNI_A, state.contract_address, RevokeCertificate(DIGEST_1), 8)
    assert result.ok
    entry = state.certificates[DIGEST_1]
    assert entry.revoked and entry.revoked_at == 8
    assert entry.revoked_at >= entry.stored_at


def test_revoke_rejections():
    state = registered_state()
    execute_call(state, UNI_A, state.contract_address, StoreCertificate(DIGEST_1, "s"), 5)
    target = state.contract_address
    assert execute_call(state, UNI_B, target, RevokeCertificate(DIGEST_1), 6).error == "unauthorized"
    assert execute_call(state, UNI_A, target, RevokeCertificate(DIGEST_2), 6).error == "unknown digest"
    assert execute_call(state, UNI_A, target, RevokeCertificate(DIGEST_1), 7).ok
    assert execute_call(state, UNI_A, target, RevokeCertificate(DIGEST_1), 8).error == "already revoked"


def test_verify_certificate_outcomes():
    state = registered_state()
    target = state.contract_address
    execute_call(state, UNI_A, target, StoreCertificate(DIGEST_1, "s"), 5)
    stored = verify_certificate(state, DIGEST_1)
    assert stored.valid and stored.issuer_name == "Alpha University" and not stored.revoked
    unknown = verify_certificate(state, DIGEST_2)
    assert not unknown.valid and unknown.issuer_name is None and not unknown.revoked
    execute_call(state, UNI_A, target, RevokeCertificate(DIGEST_1), 9)
    revoked = verify_certificate(state, DIGEST_1)
    assert not revoked.valid and revoked.revoked and revoked.issuer_name == "Alpha University"


# ---------------------------------------------------------------------------
# replay over a real mined chain
# ---------------------------------------------------------------------------


def mined_registry_ledger():
    ledger = Ledger(LedgerConfig(difficulty=1, seed=11))
    ledger.faucet(ADMIN, 50)
    ledger.faucet(UNI_A, 50)
    contract = derive_contract_address(ADMIN)

    def send(sender, target, call):
        tx = build_transaction(sender, target, call_to_payload(call), 1)
        assert ledger.submit(tx).state == "pending"
        return tx

    send(ADMIN, CREATE_ADDRESS, Deploy())
    ledger.run_round()
    send(ADMIN, contract, RegisterUniversity("Alpha University", UNI_A))
    ledger.run_round()
    send(UNI_A, contract, StoreCertificate(DIGEST_1, "s-100"))
    # a failing call that stays on chain: stranger tries to store
    ledger.faucet(STRANGER, 5)
    failing = send(STRANGER, contract, StoreCertificate(DIGEST_2, "s-999"))
    ledger.run_round()
    return ledger, failing


def test_replay_state_from_chain():
    ledger, failing = mined_registry_ledger()
    state, receipts = replay_with_receipts(ledger.chain)
    assert state.admin == ADMIN
    assert state.universities[UNI_A].name == "Alpha University"
    assert verify_certificate(state, DIGEST_1).valid
    assert not verify_certificate(state, DIGEST_2).valid
    assert receipts[failing.tx_id].error == "unauthorized"
    # the failed call is on chain regardless
    assert any(tx.tx_id == failing.tx_id for _, tx in ledger.iter_transactions())


def test_replay_counts_registrations():
    ledger = Ledger(LedgerConfig(difficulty=1, seed=21))
    ledger.faucet(ADMIN, 10)
    contract = derive_contract_address(ADMIN)
    ledger.submit(build_transaction(ADMIN, CREATE_ADDRESS, call_to_payload(Deploy()), 1))
    for i, addr in enumerate([UNI_A, UNI_B, STRANGER]):
        call = RegisterUniversity(f"University {i}", addr)
        ledger.submit(build_transaction(ADMIN, contract, call_to_payload(call), 1))
    ledger.run_round()
    assert len(replay_state(ledger.chain).universities) == 3


def test_replay_empty_chain_is_undeployed():
    ledger = Ledger(LedgerConfig(difficulty=0))
    state = replay_state(ledger.chain)
    assert not state.deployed
    assert state.admin is None
    assert state.universities == {} and state.certificates == {}


def test_replay_is_deterministic():
    ledger, _ = mined_registry_ledger()
    assert replay_state(ledger.chain) == replay_state(ledger.chain)
    other, _ = mined_registry_ledger()
    assert replay_state(ledger.chain) == replay_state(other.chain)


def test_all_nodes_derive_identical_state():
    ledger, _ = mined_registry_ledger()
    states = [replay_state(node.chain) for node in ledger.nodes]
    assert all(state == states[0] for state in states)


# ---------------------------------------------------------------------------
# randomized audit against the brute-force permission oracle
# ---------------------------------------------------------------------------


ACTORS = [ADMIN, UNI_A, UNI_B, STRANGER]
AUDIT_DIGESTS = [md5_digest(f"doc-{i}".encode()) for i in range(4)]


def test_replay_audit_against_permission_oracle():
    rng = random.Random(2024)
    for _ in range(60):
        log = random_call_log(rng, rng.randrange(1, 31), ACTORS, AUDIT_DIGESTS)
        audit_log_against_oracle(log, AUDIT_DIGESTS)


def test_registry_is_monotone_and_admin_immutable():
    rng = random.Random(77)
    log = random_call_log(rng, 30, ACTORS, AUDIT_DIGESTS)
    state = ContractState()
    seen_admin = None
    uni_count = cert_count = 0
    for sender, target, payload, block_index in log:
        execute_call(state, sender, target, payload_to_call(payload), block_index)
        if seen_admin is None:
            seen_admin = state.admin
        else:
            assert state.admin == seen_admin  # admin never changes once set
        assert len(state.universities) >= uni_count
        assert len(state.certificates) >= cert_count
        uni_count, cert_count = len(state.universities), len(state.certificates)
        assert state.code_version == CODE_VERSION
