"""The achievement-registry contract: a state machine replayed from the chain.

There is no VM and no contract language; the registry's rules are the
contract. Its state is never stored directly -- it is the fold of every
confirmed call, in (block index, intra-block position) order, so any node
holding the same chain derives the same registry. Failed calls burn their
fee and stay on chain, but leave the state untouched.

Only 128-bit document fingerprints ever enter a payload; the call types
make storing raw document bytes structurally impossible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .crypto import hex_decode, is_digest_hex
from .ledger import Address, Block, derive_address, is_address

CODE_VERSION = "registry-v1"

# Deploy transactions target this sentinel; the registry's own address is
# derived from the deployer and only exists after deployment.
CREATE_ADDRESS = "00" * 20


# ---------------------------------------------------------------------------
# Calls (the transaction payload vocabulary)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Deploy:
    pass


@dataclass(frozen=True)
class RegisterUniversity:
    name: str
    university_address: Address


@dataclass(frozen=True)
class StoreCertificate:
    cert_digest: str
    student_ref: str


@dataclass(frozen=True)
class RevokeCertificate:
    cert_digest: str


ContractCall = Union[Deploy, RegisterUniversity, StoreCertificate, RevokeCertificate]


def call_to_payload(call: ContractCall) -> dict:
    if isinstance(call, Deploy):
        return {"kind": "deploy"}
    if isinstance(call, RegisterUniversity):
        return {
            "kind": "register_university",
            "name": call.name,
            "university_address": call.university_address,
        }
    if isinstance(call, StoreCertificate):
        return {
            "kind": "store_certificate",
            "cert_digest": call.cert_digest,
            "student_ref": call.student_ref,
        }
    if isinstance(call, RevokeCertificate):
        return {"kind": "revoke_certificate", "cert_digest": call.cert_digest}
    raise TypeError(f"not a contract call: {call!r}")


def payload_to_call(payload: dict) -> ContractCall | None:
    """Parse a transaction payload; None means the payload is malformed."""
    if not isinstance(payload, dict):
        return None
    kind = payload.get("kind")
    if kind == "deploy":
        return Deploy()
    if kind == "register_university":
        name = payload.get("name")
        uni = payload.get("university_address")
        if isinstance(name, str) and isinstance(uni, str) and is_address(uni):
            return RegisterUniversity(name, uni)
        return None
    if kind == "store_certificate":
        digest = payload.get("cert_digest")
        ref = payload.get("student_ref")
        if isinstance(digest, str) and is_digest_hex(digest) and isinstance(ref, str):
            return StoreCertificate(digest, ref)
        return None
    if kind == "revoke_certificate":
        digest = payload.get("cert_digest")
        if isinstance(digest, str) and is_digest_hex(digest):
            return RevokeCertificate(digest)
        return None
    return None


def derive_contract_address(deployer: Address) -> Address:
    """20-octet registry address, a pure function of the deployer."""
    return derive_address(hex_decode(deployer) + b"deploy")


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------


@dataclass
class UniversityEntry:
    name: str
    registered_at: int  # block index of the confirming block


@dataclass
class CertificateEntry:
    cert_digest: str
    issuer: Address
    student_ref: str
    stored_at: int
    revoked: bool = False
    revoked_at: int | None = None


@dataclass
class ContractState:
    """Replay-derived registry snapshot. Treat as read-only once handed out."""

    deployed: bool = False
    contract_address: Address | None = None
    admin: Address | None = None
    code_version: str = CODE_VERSION
    universities: dict[Address, UniversityEntry] = field(default_factory=dict)
    certificates: dict[str, CertificateEntry] = field(default_factory=dict)


@dataclass(frozen=True)
class CallResult:
    ok: bool
    error: str | None = None


_OK = CallResult(True)


def _fail(error: str) -> CallResult:
    return CallResult(False, error)


def execute_call(
    state: ContractState,
    sender: Address,
    target: Address,
    call: ContractCall,
    block_index: int,
) -> CallResult:
    """Apply one confirmed call; on failure the state is left untouched."""
    if isinstance(call, Deploy):
        if target != CREATE_ADDRESS:
            return _fail("wrong target")
        if state.deployed:
            return _fail("already deployed")
        state.deployed = True
        state.admin = sender
        state.contract_address = derive_contract_address(sender)
        return _OK

    if not state.deployed:
        return _fail("not deployed")
    if target != state.contract_address:
        return _fail("wrong target")

    if isinstance(call, RegisterUniversity):
        if sender != state.admin:
            return _fail("unauthorized")
        if not call.name.strip():
            return _fail("empty name")
        if call.university_address in state.universities:
            return _fail("duplicate")
        state.universities[call.university_address] = UniversityEntry(call.name, block_index)
        return _OK

    if isinstance(call, StoreCertificate):
        if sender not in state.universities:
            return _fail("unauthorized")
        if call.cert_digest in state.certificates:
            return _fail("duplicate digest")
        state.certificates[call.cert_digest] = CertificateEntry(
            cert_digest=call.cert_digest,
            issuer=sender,
            student_ref=call.student_ref,
            stored_at=block_index,
        )
        return _OK

    if isinstance(call, RevokeCertificate):
        entry = state.certificates.get(call.cert_digest)
        if entry is None:
            return _fail("unknown digest")
        if sender != entry.issuer:
            return _fail("unauthorized")
        if entry.revoked:
            return _fail("already revoked")
        entry.revoked = True
        entry.revoked_at = block_index
        return _OK

    return _fail("malformed payload")


def replay_with_receipts(blocks: Sequence[Block]) -> tuple[ContractState, dict[str, CallResult]]:
    """Fold every confirmed transaction through the execution rules.

    Precondition: the chain already validated; garbage blocks are the
    caller's bug, not this function's concern.
    """
    state = ContractState()
    receipts: dict[str, CallResult] = {}
    for block in blocks:
        index = block.header.index
        for tx in block.transactions:
            call = payload_to_call(tx.payload)
            if call is None:
                receipts[tx.tx_id] = _fail("malformed payload")
                continue
            receipts[tx.tx_id] = execute_call(state, tx.sender, tx.target, call, index)
    return state, receipts


def replay_state(blocks: Sequence[Block]) -> ContractState:
    state, _ = replay_with_receipts(blocks)
    return state


@dataclass(frozen=True)
class VerificationOutcome:
    valid: bool
    issuer_name: str | None
    revoked: bool

    def as_dict(self) -> dict:
        return {"valid": self.valid, "issuer_name": self.issuer_name, "revoked": self.revoked}


def verify_certificate(state: ContractState, cert_digest: str) -> VerificationOutcome:
    """Free read-only query: does this fingerprint name an unrevoked certificate?"""
    entry = state.certificates.get(cert_digest)
    if entry is None:
        return VerificationOutcome(valid=False, issuer_name=None, revoked=False)
    issuer = state.universities[entry.issuer]
    return VerificationOutcome(valid=not entry.revoked, issuer_name=issuer.name, revoked=entry.revoked)
