"""The off-chain registry service.

Everything the chain must not hold lives here: user accounts with roles,
per-student achievement records, the simulated email outbox, credential
resets, and the uploaded documents themselves (content-addressed by their
digest). The service owns an embedded ledger, drives mining rounds, and
reacts to confirmations: a stored certificate becomes a record entry plus
an outbox email only once its transaction sits in a block.

Persistence, when a data directory is configured, is two files: the chain
as block-per-line JSON, and a single append-only JSON-lines event log for
service state. Reloading folds the log back up; rerunning a fresh service
with equal seed and inputs reproduces both files byte for byte.
"""

from __future__ import annotations

import hmac
import json
import random
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .config import ServiceConfig
from .contract import (
    CREATE_ADDRESS,
    CallResult,
    ContractState,
    Deploy,
    RegisterUniversity,
    RevokeCertificate,
    StoreCertificate,
    call_to_payload,
    derive_contract_address,
    payload_to_call,
    execute_call,
    verify_certificate,
)
from .crypto import is_digest_hex, md5_digest
from .ledger import (
    Block,
    Ledger,
    Transaction,
    block_line,
    build_transaction,
    is_address,
    load_chain,
    transaction_from_dict,
    transaction_to_dict,
    validate_chain,
)

ROLE_ADMIN = "admin"
ROLE_UNIVERSITY = "university"
ROLE_STUDENT = "student"
ROLE_EMPLOYER = "employer"
ROLES = (ROLE_ADMIN, ROLE_UNIVERSITY, ROLE_STUDENT, ROLE_EMPLOYER)

CATEGORIES = ("Academic", "ExtraCurricular", "Employability", "Voluntary", "Prize")

# Which roles may call which gated operation. Ungated operations (login,
# verify, list_universities, chain inspection, resets) are absent.
AUTH_MATRIX = {
    "deploy_contract": {ROLE_ADMIN},
    "register_university": {ROLE_ADMIN},
    "add_employer": {ROLE_ADMIN},
    "faucet": {ROLE_ADMIN},
    "read_outbox": {ROLE_ADMIN},
    "add_student": {ROLE_UNIVERSITY},
    "authenticate_certificate": {ROLE_UNIVERSITY},
    "revoke_certificate": {ROLE_UNIVERSITY},
    "get_record": {ROLE_STUDENT, ROLE_UNIVERSITY, ROLE_EMPLOYER},
    "search_students": {ROLE_EMPLOYER},
}

# Every state transition reachable over the API or needed to drive it; the
# scenario runner must cover all of these (tested).
SERVICE_OPERATIONS = (
    "login",
    "logout",
    "deploy_contract",
    "register_university",
    "add_student",
    "add_employer",
    "authenticate_certificate",
    "revoke_certificate",
    "verify",
    "get_record",
    "search_students",
    "list_universities",
    "request_reset",
    "apply_reset",
    "read_outbox",
    "faucet",
    "chain_summary",
    "tx_status",
    "mine_rounds",
)


class ServiceError(Exception):
    code = "error"
    http_status = 400

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class ValidationError(ServiceError):
    code = "invalid"
    http_status = 400


class AuthenticationError(ServiceError):
    code = "unauthenticated"
    http_status = 401


class AuthorizationError(ServiceError):
    code = "forbidden"
    http_status = 403


class NotFoundError(ServiceError):
    code = "not_found"
    http_status = 404


class ConflictError(ServiceError):
    code = "conflict"
    http_status = 409


class UnderfundedError(ServiceError):
    code = "wallet_underfunded"
    http_status = 402


class DataDirError(Exception):
    """The data directory refuses to load; names the offending file."""

    def __init__(self, path, reason: str):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{path}: {reason}")


# ---------------------------------------------------------------------------
# Rows
# ---------------------------------------------------------------------------


@dataclass
class UserAccount:
    user_id: str
    role: str
    display_name: str
    email: str
    secret_digest: str
    salt: str  # 16 octets, hex
    linked_address: str | None = None  # admin / university roles
    university_id: str | None = None   # student role

    def public_row(self) -> dict:
        return {
            "user_id": self.user_id,
            "role": self.role,
            "display_name": self.display_name,
            "email": self.email,
            "linked_address": self.linked_address,
            "university_id": self.university_id,
        }


@dataclass
class AchievementEntry:
    cert_digest: str
    title: str
    category: str
    issuer_university: str
    tx_id: str
    confirmed_block: int


@dataclass
class EmailEvent:
    event_id: int
    to: str
    subject: str
    body: str
    created_at: int
    delivered: bool = False  # outbox only; nothing ever leaves

    def as_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "to": self.to,
            "subject": self.subject,
            "body": self.body,
            "created_at": self.created_at,
            "delivered": self.delivered,
        }


@dataclass
class ResetToken:
    token: str
    user_id: str
    expires_at: int
    used: bool = False


@dataclass
class Session:
    token: str
    user_id: str
    last_seen: int


@dataclass
class PendingOp:
    kind: str  # deploy | register_university | store | revoke
    fields: dict = field(default_factory=dict)


def _secret_digest(salt_hex: str, secret: str) -> str:
    return md5_digest(bytes.fromhex(salt_hex) + secret.encode("utf-8"))


class RegistryService:
    """Single-writer service core; every public method takes the lock."""

    def __init__(self, config: ServiceConfig | None = None):
        self.config = config or ServiceConfig()
        self._lock = threading.RLock()
        self.ledger = Ledger(self.config.ledger_config())
        self.accounts: dict[str, UserAccount] = {}
        self.sessions: dict[str, Session] = {}
        self.records: dict[str, list[AchievementEntry]] = {}
        self.outbox: list[EmailEvent] = []
        self.reset_tokens: dict[str, ResetToken] = {}
        self.documents: dict[str, bytes] = {}
        self._pending: dict[str, PendingOp] = {}
        self._failed_ops: dict[str, str] = {}
        self._state = ContractState()
        self._receipts: dict[str, object] = {}
        self._events_path: Path | None = None
        self._chain_path: Path | None = None
        self._documents_dir: Path | None = None
        if self.config.data_dir is not None:
            self._attach_storage(Path(self.config.data_dir))
        else:
            self._rng = random.Random(f"{self.config.seed}/service")
            self._create_admin()

    # -- storage ------------------------------------------------------------

    def _attach_storage(self, data_dir: Path) -> None:
        data_dir.mkdir(parents=True, exist_ok=True)
        self._events_path = data_dir / "events.jsonl"
        self._chain_path = data_dir / "chain.jsonl"
        self._documents_dir = data_dir / "documents"
        self._documents_dir.mkdir(exist_ok=True)
        if self._chain_path.exists():
            self._load_existing()
        else:
            self._rng = random.Random(f"{self.config.seed}/service")
            with open(self._chain_path, "w", encoding="utf-8") as fh:
                fh.write(block_line(self.ledger.chain[0]) + "\n")
            self._events_path.touch()
            self._create_admin()

    def _load_existing(self) -> None:
        blocks = load_chain(self._chain_path)  # raises ChainFileError on garbage
        result = validate_chain(blocks, self.config.difficulty, self.config.capacity)
        if not result:
            raise DataDirError(self._chain_path, f"invalid chain: {result.reason}")
        events = []
        with open(self._events_path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    events.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise DataDirError(self._events_path, f"line {line_no}: {exc}") from exc
        # A restarted service continues on a fresh, non-colliding stream.
        self._rng = random.Random(f"{self.config.seed}/service/resume/{len(events)}")
        by_index = {block.header.index: block for block in blocks}
        for event in events:
            self._replay_event(event, by_index)
        self._state = ContractState()
        self._receipts = {}
        for block in blocks:
            self._absorb_block(block, record_effects=False)

    def _replay_event(self, event: dict, blocks_by_index: dict[int, Block]) -> None:
        kind = event.get("event")
        if kind == "account":
            row = UserAccount(**{k: v for k, v in event.items() if k not in ("event",)})
            self.accounts[row.user_id] = row
            if row.role == ROLE_STUDENT:
                self.records.setdefault(row.user_id, [])
        elif kind == "faucet":
            self.ledger.faucet(event["address"], event["amount"])
        elif kind == "tx_submitted":
            tx = transaction_from_dict(event["tx"])
            self.ledger.submit(Transaction(tx.tx_id, tx.sender, tx.target, tx.payload, tx.gas_fee))
            if event.get("op") is not None:
                op = event["op"]
                self._pending[tx.tx_id] = PendingOp(op["kind"], op["fields"])
        elif kind == "round":
            block = blocks_by_index.get(event["block_index"])
            if block is None:
                raise DataDirError(self._chain_path, f"round event for missing block {event['block_index']}")
            self.ledger.adopt_block(block, event["winner_address"])
        elif kind == "entry":
            entry = AchievementEntry(**{k: v for k, v in event.items() if k not in ("event", "student_id")})
            self.records.setdefault(event["student_id"], []).append(entry)
            self._pending.pop(entry.tx_id, None)
        elif kind == "email":
            self.outbox.append(
                EmailEvent(
                    event_id=event["event_id"],
                    to=event["to"],
                    subject=event["subject"],
                    body=event["body"],
                    created_at=event["created_at"],
                )
            )
        elif kind == "reset_token":
            row = ResetToken(
                token=event["token"],
                user_id=event["user_id"],
                expires_at=event["expires_at"],
                used=event["used"],
            )
            self.reset_tokens[row.token] = row
        elif kind == "reset_applied":
            account = self.accounts[event["user_id"]]
            account.salt = event["salt"]
            account.secret_digest = event["secret_digest"]
            self.reset_tokens[event["token"]].used = True
        elif kind == "op_failed":
            self._failed_ops[event["tx_id"]] = event["error"]
            self._pending.pop(event["tx_id"], None)
        else:
            raise DataDirError(self._events_path, f"unknown event kind {kind!r}")

    def _log(self, kind: str, **fields) -> None:
        if self._events_path is None:
            return
        line = json.dumps({"event": kind, **fields}, sort_keys=True, separators=(",", ":"))
        with open(self._events_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def _append_chain(self, block: Block) -> None:
        if self._chain_path is None:
            return
        with open(self._chain_path, "a", encoding="utf-8") as fh:
            fh.write(block_line(block) + "\n")

    # -- account plumbing -----------------------------------------------------

    def _create_admin(self) -> None:
        self._create_account(
            user_id=self.config.admin_user,
            role=ROLE_ADMIN,
            display_name="System Administrator",
            email=f"{self.config.admin_user}@registry.local",
            secret=self.config.admin_secret,
            linked_address=self._rng.randbytes(20).hex(),
        )

    def _create_account(
        self,
        user_id: str,
        role: str,
        display_name: str,
        email: str,
        secret: str,
        linked_address: str | None = None,
        university_id: str | None = None,
    ) -> UserAccount:
        if not user_id or not user_id.strip():
            raise ValidationError("user id must not be empty")
        if not secret:
            raise ValidationError("secret must not be empty")
        if user_id in self.accounts:
            raise ConflictError(f"user {user_id!r} already exists")
        salt = self._rng.randbytes(16).hex()
        account = UserAccount(
            user_id=user_id,
            role=role,
            display_name=display_name,
            email=email,
            secret_digest=_secret_digest(salt, secret),
            salt=salt,
            linked_address=linked_address,
            university_id=university_id,
        )
        self.accounts[user_id] = account
        if role == ROLE_STUDENT:
            self.records.setdefault(user_id, [])
        self._log(
            "account",
            user_id=account.user_id,
            role=account.role,
            display_name=account.display_name,
            email=account.email,
            secret_digest=account.secret_digest,
            salt=account.salt,
            linked_address=account.linked_address,
            university_id=account.university_id,
        )
        return account

    # -- sessions -------------------------------------------------------------

    def _session_account(self, token: str | None) -> UserAccount:
        if not token:
            raise AuthenticationError("authentication required")
        session = self.sessions.get(token)
        if session is None:
            raise AuthenticationError("authentication required")
        if self.ledger.tick - session.last_seen > self.config.session_ttl:
            del self.sessions[token]
            raise AuthenticationError("session expired")
        session.last_seen = self.ledger.tick
        return self.accounts[session.user_id]

    def _require(self, token: str | None, operation: str) -> UserAccount:
        account = self._session_account(token)
        allowed = AUTH_MATRIX[operation]
        if account.role not in allowed:
            raise AuthorizationError(f"{operation} requires role {' or '.join(sorted(allowed))}")
        return account

    # -- confirmation plumbing --------------------------------------------------

    def _absorb_block(self, block: Block, record_effects: bool = True) -> None:
        index = block.header.index
        for tx in block.transactions:
            call = payload_to_call(tx.payload)
            if call is None:
                receipt = CallResult(False, "malformed payload")
            else:
                receipt = execute_call(self._state, tx.sender, tx.target, call, index)
            self._receipts[tx.tx_id] = receipt
            if not record_effects:
                continue
            op = self._pending.pop(tx.tx_id, None)
            if op is None:
                continue
            if not receipt.ok:
                self._failed_ops[tx.tx_id] = receipt.error
                self._log("op_failed", tx_id=tx.tx_id, error=receipt.error)
                continue
            if op.kind == "store":
                self._settle_store(tx, op, index)

    def _settle_store(self, tx: Transaction, op: PendingOp, block_index: int) -> None:
        student = self.accounts[op.fields["student_id"]]
        entry = AchievementEntry(
            cert_digest=tx.payload["cert_digest"],
            title=op.fields["title"],
            category=op.fields["category"],
            issuer_university=op.fields["issuer_university"],
            tx_id=tx.tx_id,
            confirmed_block=block_index,
        )
        self.records.setdefault(student.user_id, []).append(entry)
        self._log(
            "entry",
            student_id=student.user_id,
            cert_digest=entry.cert_digest,
            title=entry.title,
            category=entry.category,
            issuer_university=entry.issuer_university,
            tx_id=entry.tx_id,
            confirmed_block=entry.confirmed_block,
        )
        self._send_email(
            to=student.email,
            subject=f"Achievement authenticated: {entry.title}",
            body=(
                f"Hello {student.display_name},\n\n"
                f"Your achievement \"{entry.title}\" was authenticated by "
                f"{entry.issuer_university} and recorded on the ledger.\n"
                f"Share this fingerprint with anyone who needs to verify it:\n\n"
                f"{entry.cert_digest}\n"
            ),
        )

    def _send_email(self, to: str, subject: str, body: str) -> EmailEvent:
        event = EmailEvent(
            event_id=len(self.outbox),
            to=to,
            subject=subject,
            body=body,
            created_at=self.ledger.tick,
        )
        self.outbox.append(event)
        self._log(
            "email",
            event_id=event.event_id,
            to=event.to,
            subject=event.subject,
            body=event.body,
            created_at=event.created_at,
        )
        return event

    def _submit(self, sender: str, target: str, payload: dict, op: PendingOp | None) -> Transaction:
        tx = build_transaction(sender, target, payload, self.config.tx_fee)
        status = self.ledger.submit(tx)
        if status.state == "rejected":
            if status.reason == "insufficient balance":
                raise UnderfundedError("wallet underfunded")
            raise ConflictError(f"transaction rejected: {status.reason}")
        if op is not None:
            self._pending[tx.tx_id] = op
        self._log(
            "tx_submitted",
            tx=transaction_to_dict(self.ledger.pool[tx.tx_id]),
            op=None if op is None else {"kind": op.kind, "fields": op.fields},
        )
        return tx

    def _contract_target(self) -> str:
        admin = self.accounts[self.config.admin_user]
        return derive_contract_address(admin.linked_address)

    def _deploy_pending(self) -> bool:
        return any(op.kind == "deploy" for op in self._pending.values())

    # -- public operations ------------------------------------------------------

    def login(self, user_id: str, secret: str) -> dict:
        with self._lock:
            account = self.accounts.get(user_id)
            if account is None:
                # Burn the comparison anyway: no user-existence oracle.
                hmac.compare_digest(_secret_digest("00" * 16, secret), "0" * 32)
                raise AuthenticationError("invalid credentials")
            candidate = _secret_digest(account.salt, secret)
            if not hmac.compare_digest(candidate, account.secret_digest):
                raise AuthenticationError("invalid credentials")
            token = self._rng.randbytes(16).hex()
            self.sessions[token] = Session(token, user_id, last_seen=self.ledger.tick)
            return {
                "token": token,
                "user_id": user_id,
                "role": account.role,
                "display_name": account.display_name,
            }

    def logout(self, token: str | None) -> dict:
        with self._lock:
            self._session_account(token)
            del self.sessions[token]
            return {"ok": True}

    def whoami(self, token: str | None) -> dict:
        with self._lock:
            return self._session_account(token).public_row()

    def deploy_contract(self, token: str | None) -> dict:
        with self._lock:
            admin = self._require(token, "deploy_contract")
            if self._state.deployed or self._deploy_pending():
                raise ConflictError("contract already deployed")
            if self.ledger.balance(admin.linked_address) < self.config.tx_fee:
                raise UnderfundedError("wallet underfunded")
            tx = self._submit(
                admin.linked_address, CREATE_ADDRESS, call_to_payload(Deploy()), PendingOp("deploy")
            )
            return {
                "tx_id": tx.tx_id,
                "contract_address": derive_contract_address(admin.linked_address),
                "status": "pending",
            }

    def register_university(self, token: str | None, name: str, user_id: str, email: str, secret: str) -> dict:
        with self._lock:
            admin = self._require(token, "register_university")
            if not name or not name.strip():
                raise ValidationError("university name must not be empty")
            if not self._state.deployed and not self._deploy_pending():
                raise ConflictError("contract not deployed")
            taken = {entry.name for entry in self._state.universities.values()}
            taken.update(
                acc.display_name for acc in self.accounts.values() if acc.role == ROLE_UNIVERSITY
            )
            if name in taken:
                raise ConflictError(f"university {name!r} already registered")
            if user_id in self.accounts:
                raise ConflictError(f"user {user_id!r} already exists")
            if self.ledger.balance(admin.linked_address) < self.config.tx_fee:
                raise UnderfundedError("wallet underfunded")
            address = self._rng.randbytes(20).hex()
            account = self._create_account(
                user_id=user_id,
                role=ROLE_UNIVERSITY,
                display_name=name,
                email=email,
                secret=secret,
                linked_address=address,
            )
            self.ledger.faucet(address, self.config.faucet_amount)
            self._log("faucet", address=address, amount=self.config.faucet_amount)
            tx = self._submit(
                admin.linked_address,
                self._contract_target(),
                call_to_payload(RegisterUniversity(name, address)),
                PendingOp("register_university", {"user_id": user_id}),
            )
            return {"user_id": account.user_id, "address": address, "tx_id": tx.tx_id, "status": "pending"}

    def add_student(self, token: str | None, student_id: str, name: str, email: str, secret: str) -> dict:
        with self._lock:
            university = self._require(token, "add_student")
            account = self._create_account(
                user_id=student_id,
                role=ROLE_STUDENT,
                display_name=name,
                email=email,
                secret=secret,
                university_id=university.user_id,
            )
            return account.public_row()

    def add_employer(self, token: str | None, user_id: str, name: str, email: str, secret: str) -> dict:
        with self._lock:
            self._require(token, "add_employer")
            account = self._create_account(
                user_id=user_id,
                role=ROLE_EMPLOYER,
                display_name=name,
                email=email,
                secret=secret,
            )
            return account.public_row()

    def authenticate_certificate(
        self, token: str | None, student_id: str, title: str, category: str, document: bytes
    ) -> dict:
        with self._lock:
            university = self._require(token, "authenticate_certificate")
            student = self.accounts.get(student_id)
            if student is None or student.role != ROLE_STUDENT:
                raise NotFoundError(f"unknown student {student_id!r}")
            if student.university_id != university.user_id:
                raise AuthorizationError("student belongs to another university")
            if not document:
                raise ValidationError("document must not be empty")
            if not title or not title.strip():
                raise ValidationError("title must not be empty")
            if category not in CATEGORIES:
                raise ValidationError(f"category must be one of {', '.join(CATEGORIES)}")
            digest = md5_digest(document)
            pending_digests = {
                op.fields.get("cert_digest") for op in self._pending.values() if op.kind == "store"
            }
            if digest in self._state.certificates or digest in pending_digests:
                raise ConflictError("duplicate digest")
            if self.ledger.balance(university.linked_address) < self.config.tx_fee:
                raise UnderfundedError("wallet underfunded")
            tx = self._submit(
                university.linked_address,
                self._contract_target(),
                call_to_payload(StoreCertificate(digest, student_id)),
                PendingOp(
                    "store",
                    {
                        "student_id": student_id,
                        "title": title,
                        "category": category,
                        "issuer_university": university.display_name,
                        "cert_digest": digest,
                    },
                ),
            )
            self.documents[digest] = bytes(document)
            if self._documents_dir is not None:
                (self._documents_dir / digest).write_bytes(document)
            return {"cert_digest": digest, "tx_id": tx.tx_id, "status": "pending"}

    def revoke_certificate(self, token: str | None, cert_digest: str) -> dict:
        with self._lock:
            university = self._require(token, "revoke_certificate")
            digest = (cert_digest or "").strip().lower()
            if not is_digest_hex(digest):
                raise ValidationError("malformed digest")
            entry = self._state.certificates.get(digest)
            if entry is None:
                raise NotFoundError("unknown digest")
            if entry.issuer != university.linked_address:
                raise AuthorizationError("only the issuing university may revoke")
            if entry.revoked:
                raise ConflictError("already revoked")
            if self.ledger.balance(university.linked_address) < self.config.tx_fee:
                raise UnderfundedError("wallet underfunded")
            tx = self._submit(
                university.linked_address,
                self._contract_target(),
                call_to_payload(RevokeCertificate(digest)),
                PendingOp("revoke", {"cert_digest": digest}),
            )
            return {"tx_id": tx.tx_id, "status": "pending"}

    def verify(self, digest: str | None = None, document: bytes | None = None, token: str | None = None) -> dict:
        with self._lock:
            if token:
                self._session_account(token)  # optional session: refresh if given
            if (digest is None) == (document is None):
                raise ValidationError("provide exactly one of digest or document")
            if document is not None:
                checked = md5_digest(document)
            else:
                checked = digest.strip().lower()
                if not is_digest_hex(checked):
                    raise ValidationError("malformed digest")
            outcome = verify_certificate(self._state, checked)
            return {"checked_digest": checked, **outcome.as_dict()}

    def get_record(self, token: str | None, student_id: str) -> dict:
        with self._lock:
            caller = self._require(token, "get_record")
            student = self.accounts.get(student_id)
            if student is None or student.role != ROLE_STUDENT:
                raise NotFoundError(f"unknown student {student_id!r}")
            if caller.role == ROLE_STUDENT and caller.user_id != student_id:
                raise AuthorizationError("students may only read their own record")
            if caller.role == ROLE_UNIVERSITY and student.university_id != caller.user_id:
                raise AuthorizationError("student belongs to another university")
            return {
                "student_id": student_id,
                "display_name": student.display_name,
                "entries": [self._entry_row(e) for e in self.records.get(student_id, [])],
            }

    def _entry_row(self, entry: AchievementEntry) -> dict:
        chain_entry = self._state.certificates.get(entry.cert_digest)
        return {
            "cert_digest": entry.cert_digest,
            "title": entry.title,
            "category": entry.category,
            "issuer_university": entry.issuer_university,
            "tx_id": entry.tx_id,
            "confirmed_block": entry.confirmed_block,
            "revoked": bool(chain_entry and chain_entry.revoked),
        }

    def search_students(
        self,
        token: str | None,
        category: str | None = None,
        university: str | None = None,
        keyword: str | None = None,
    ) -> dict:
        with self._lock:
            self._require(token, "search_students")
            if category is not None and category not in CATEGORIES:
                raise ValidationError(f"category must be one of {', '.join(CATEGORIES)}")
            results = []
            for student_id, entries in sorted(self.records.items()):
                matching = []
                for entry in entries:
                    row = self._entry_row(entry)
                    if row["revoked"]:
                        continue
                    if category is not None and row["category"] != category:
                        continue
                    if university is not None and row["issuer_university"] != university:
                        continue
                    if keyword is not None and keyword.lower() not in row["title"].lower():
                        continue
                    matching.append(row)
                if matching:
                    results.append(
                        {
                            "student_id": student_id,
                            "display_name": self.accounts[student_id].display_name,
                            "entries": matching,
                        }
                    )
            return {"results": results}

    def list_universities(self) -> dict:
        with self._lock:
            rows = [
                {"name": entry.name, "address": address, "registered_at": entry.registered_at}
                for address, entry in self._state.universities.items()
            ]
            rows.sort(key=lambda r: (r["registered_at"], r["name"]))
            return {"universities": rows, "names": [r["name"] for r in rows]}

    def request_reset(self, user_id: str) -> dict:
        """Always claims success; unknown ids draw no token and no email."""
        with self._lock:
            account = self.accounts.get(user_id)
            if account is None:
                return {"ok": True, "token": None}
            token = self._rng.randbytes(16).hex()
            row = ResetToken(
                token=token,
                user_id=user_id,
                expires_at=self.ledger.tick + self.config.reset_ttl,
            )
            self.reset_tokens[token] = row
            self._log(
                "reset_token",
                token=row.token,
                user_id=row.user_id,
                expires_at=row.expires_at,
                used=row.used,
            )
            self._send_email(
                to=account.email,
                subject="Credential reset requested",
                body=(
                    f"Hello {account.display_name},\n\n"
                    f"Use this one-time code to choose a new sign-in secret:\n\n"
                    f"{token}\n\n"
                    f"It stops working after {self.config.reset_ttl} rounds or one use.\n"
                ),
            )
            return {"ok": True, "token": token}

    def apply_reset(self, token: str, new_secret: str) -> dict:
        with self._lock:
            if not new_secret:
                raise ValidationError("secret must not be empty")
            row = self.reset_tokens.get((token or "").strip().lower())
            if row is None or row.used or self.ledger.tick > row.expires_at:
                raise ValidationError("invalid token")
            account = self.accounts[row.user_id]
            salt = self._rng.randbytes(16).hex()
            account.salt = salt
            account.secret_digest = _secret_digest(salt, new_secret)
            row.used = True
            self.sessions = {
                key: sess for key, sess in self.sessions.items() if sess.user_id != row.user_id
            }
            self._log(
                "reset_applied",
                user_id=row.user_id,
                salt=salt,
                secret_digest=account.secret_digest,
                token=row.token,
            )
            return {"ok": True}

    def read_outbox(self, token: str | None) -> dict:
        with self._lock:
            self._require(token, "read_outbox")
            return {"events": [event.as_dict() for event in self.outbox]}

    def faucet(self, token: str | None, address: str, amount: int) -> dict:
        with self._lock:
            self._require(token, "faucet")
            return self.faucet_address(address, amount)

    def faucet_address(self, address: str, amount: int) -> dict:
        """Operator-context funding; the session-gated path wraps this."""
        with self._lock:
            if not is_address(address):
                raise ValidationError("malformed address")
            if not isinstance(amount, int) or amount < 1:
                raise ValidationError("amount must be a positive integer")
            balance = self.ledger.faucet(address, amount)
            self._log("faucet", address=address, amount=amount)
            return {"address": address, "balance": balance}

    def chain_summary(self) -> dict:
        with self._lock:
            from .ledger import block_to_dict

            chain = self.ledger.chain
            return {
                "length": len(chain),
                "tip_index": chain[-1].header.index,
                "tip_hash": chain[-1].hash,
                "pending": len(self.ledger.pool),
                "contract_address": self._state.contract_address,
                "blocks": [block_to_dict(b) for b in chain],
            }

    def tx_status(self, tx_id: str) -> dict:
        with self._lock:
            normalized = (tx_id or "").strip().lower()
            if not is_digest_hex(normalized):
                raise ValidationError("malformed transaction id")
            status = self.ledger.confirmation_status(normalized).as_dict()
            if normalized in self._failed_ops:
                status["execution_error"] = self._failed_ops[normalized]
            return status

    def mine_rounds(self, rounds: int = 1) -> dict:
        with self._lock:
            if not isinstance(rounds, int) or rounds < 1:
                raise ValidationError("rounds must be a positive integer")
            reports = []
            for _ in range(rounds):
                report = self.ledger.run_round()
                self._log(
                    "round",
                    winner_node_id=report.winner_node_id,
                    winner_address=report.winner_address,
                    block_index=report.block.header.index,
                    fees=report.fees,
                )
                self._append_chain(report.block)
                self._absorb_block(report.block)
                reports.append(
                    {
                        "winner_node_id": report.winner_node_id,
                        "block_index": report.block.header.index,
                        "transactions": len(report.block.transactions),
                        "fees": report.fees,
                    }
                )
            return {"rounds": reports}

    def mine_until_confirmed(self, tx_id: str, max_rounds: int = 16) -> dict:
        with self._lock:
            for _ in range(max_rounds):
                status = self.ledger.confirmation_status(tx_id)
                if status.state != "pending":
                    return status.as_dict()
                self.mine_rounds(1)
            return self.ledger.confirmation_status(tx_id).as_dict()

    def bootstrap(self, funding: int | None = None) -> dict:
        """Fresh-system setup: fund the admin, deploy the registry, confirm it."""
        with self._lock:
            if self._state.deployed:
                return {"contract_address": self._state.contract_address, "bootstrapped": False}
            admin = self.accounts[self.config.admin_user]
            amount = self.config.faucet_amount if funding is None else funding
            if amount > 0:
                self.ledger.faucet(admin.linked_address, amount)
                self._log("faucet", address=admin.linked_address, amount=amount)
            session = self.login(self.config.admin_user, self.config.admin_secret)
            deployed = self.deploy_contract(session["token"])
            self.mine_until_confirmed(deployed["tx_id"])
            self.logout(session["token"])
            return {"contract_address": deployed["contract_address"], "bootstrapped": True}

    # -- invariant helpers (used by tests and `chain inspect`) -----------------

    def snapshot(self) -> dict:
        """Cheap structural fingerprint used to prove 'no state change'."""
        with self._lock:
            return {
                "accounts": len(self.accounts),
                "records": {k: len(v) for k, v in self.records.items()},
                "outbox": len(self.outbox),
                "chain_length": len(self.ledger.chain),
                "pool": sorted(self.ledger.pool),
                "wallets": dict(self.ledger.wallets),
                "reset_tokens": len(self.reset_tokens),
                "universities": sorted(self._state.universities),
                "certificates": sorted(self._state.certificates),
            }

    @property
    def contract_state(self) -> ContractState:
        return self._state
