"""Deterministic simulated proof-of-work ledger.

Wallets hold abstract fee units, transactions carry a contract call plus a
gas fee, a mempool orders pending work by fee, and a set of simulated nodes
takes turns mining blocks. The whole simulation is a pure function of
(config, seed, submitted transaction sequence): rerunning with equal inputs
produces byte-identical chains.

Simulation boundaries, on purpose:

- the mining race is a seeded single-process lottery, not parallel hashing;
- one winner per round, so forks and reorgs never occur;
- transactions are not signed; sender authenticity is the service layer's
  job and the sender field is trusted inside the simulation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

from .crypto import Md5, ZERO_DIGEST, is_digest_hex, md5_bytes, md5_digest

Address = str  # 20 octets, written as 40 lowercase hex characters

ADDRESS_HEX_LEN = 40
MAX_DIFFICULTY = 6

# Stored-intent statuses for a transaction.
PENDING = "pending"
CONFIRMED = "confirmed"
REJECTED = "rejected"


class RoundAborted(Exception):
    """A broadcast block failed verification at an honest node.

    The lottery winner mines constructively, so this firing means the
    implementation itself is broken; tests treat it as fatal.
    """


class ChainFileError(Exception):
    def __init__(self, path, reason: str):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{path}: {reason}")


def is_address(text: str) -> bool:
    if not isinstance(text, str) or len(text) != ADDRESS_HEX_LEN:
        return False
    return all(ch in "0123456789abcdef" for ch in text)


def derive_address(material: bytes) -> Address:
    """Deterministic 20-octet address from arbitrary seed material.

    MD5 yields 16 octets; the remaining 4 come from a second digest round
    over the first, so the address is still a pure function of the input.
    """
    first = md5_bytes(material)
    return (first + md5_bytes(first))[:20].hex()


# ---------------------------------------------------------------------------
# Canonical serializations (the exact byte strings that get hashed)
# ---------------------------------------------------------------------------


def canonical_payload(payload: dict) -> str:
    """Contract-call payload as canonical JSON: sorted keys, no whitespace, ASCII."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def tx_serialization(sender: Address, target: Address, payload: dict, gas_fee: int) -> str:
    return f"{sender}|{target}|{canonical_payload(payload)}|{gas_fee}"


def header_serialization(header: "BlockHeader") -> str:
    return (
        f"{header.index}|{header.timestamp}|{header.prev_hash}"
        f"|{header.tx_root}|{header.nonce}"
    )


def compute_tx_id(sender: Address, target: Address, payload: dict, gas_fee: int) -> str:
    return md5_digest(tx_serialization(sender, target, payload, gas_fee).encode("utf-8"))


def block_hash(header: "BlockHeader") -> str:
    return md5_digest(header_serialization(header).encode("utf-8"))


def tx_root(transactions: Sequence["Transaction"]) -> str:
    """Digest of the concatenated tx_id hex strings in block order."""
    return md5_digest("".join(tx.tx_id for tx in transactions).encode("ascii"))


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LedgerConfig:
    difficulty: int = 3
    capacity: int = 4
    node_count: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.difficulty <= MAX_DIFFICULTY:
            raise ValueError(f"difficulty must be in 0..{MAX_DIFFICULTY}, got {self.difficulty}")
        if self.capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {self.capacity}")
        if self.node_count < 1:
            raise ValueError(f"node_count must be >= 1, got {self.node_count}")


@dataclass(frozen=True)
class Transaction:
    tx_id: str
    sender: Address
    target: Address
    payload: dict
    gas_fee: int
    submit_seq: int = -1  # assigned when the pool accepts the transaction


def build_transaction(sender: Address, target: Address, payload: dict, gas_fee: int) -> Transaction:
    if not is_address(sender):
        raise ValueError(f"malformed sender address: {sender!r}")
    if not is_address(target):
        raise ValueError(f"malformed target address: {target!r}")
    if not isinstance(gas_fee, int) or gas_fee < 1:
        raise ValueError(f"gas_fee must be an integer >= 1, got {gas_fee!r}")
    tx_id = compute_tx_id(sender, target, payload, gas_fee)
    return Transaction(tx_id, sender, target, payload, gas_fee)


@dataclass(frozen=True)
class BlockHeader:
    index: int
    timestamp: int  # logical tick, not wall clock
    prev_hash: str
    tx_root: str
    nonce: int


@dataclass(frozen=True)
class Block:
    header: BlockHeader
    transactions: tuple[Transaction, ...]
    hash: str


def genesis_block() -> Block:
    header = BlockHeader(index=0, timestamp=0, prev_hash=ZERO_DIGEST, tx_root=tx_root(()), nonce=0)
    return Block(header, (), block_hash(header))


def create_genesis(config: LedgerConfig) -> list[Block]:
    """Chain of length 1 holding the fixed genesis block."""
    if not isinstance(config, LedgerConfig):
        config = LedgerConfig(**config)
    return [genesis_block()]


@dataclass
class NodeSim:
    node_id: int
    address: Address
    rng_seed: int
    chain: list[Block]


@dataclass(frozen=True)
class TxStatus:
    state: str
    block_index: int | None = None
    depth: int | None = None
    reason: str | None = None

    @classmethod
    def pending(cls) -> "TxStatus":
        return cls(PENDING)

    @classmethod
    def confirmed(cls, block_index: int, depth: int) -> "TxStatus":
        return cls(CONFIRMED, block_index=block_index, depth=depth)

    @classmethod
    def rejected(cls, reason: str) -> "TxStatus":
        return cls(REJECTED, reason=reason)

    def as_dict(self) -> dict:
        out = {"state": self.state}
        if self.block_index is not None:
            out["block_index"] = self.block_index
        if self.depth is not None:
            out["depth"] = self.depth
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class RoundReport:
    winner_node_id: int
    winner_address: Address
    block: Block
    fees: int


# ---------------------------------------------------------------------------
# Mining and verification
# ---------------------------------------------------------------------------


def meets_difficulty(digest_hex: str, difficulty: int) -> bool:
    return digest_hex.startswith("0" * difficulty)


def _nonce_start(rng_seed: int, timestamp: int) -> int:
    return int.from_bytes(md5_bytes(f"{rng_seed}:{timestamp}".encode("ascii"))[:4], "big")


def _search_nonce(prefix: str, start: int, difficulty: int) -> tuple[int, str]:
    """Increment the nonce from `start` until the header digest meets the target."""
    base = Md5(prefix.encode("utf-8"))
    zero_bytes = difficulty // 2
    lead = b"\x00" * zero_bytes
    odd = difficulty % 2
    nonce = start
    while True:
        hasher = base.copy()
        hasher.update(str(nonce).encode("ascii"))
        digest = hasher.digest()
        if digest[:zero_bytes] == lead and (not odd or digest[zero_bytes] < 0x10):
            return nonce, digest.hex()
        nonce += 1


def mine_block(
    node: NodeSim,
    transactions: Sequence[Transaction],
    parent: Block,
    difficulty: int,
    timestamp: int | None = None,
) -> Block:
    """Proof-of-work search for the next block; terminates for difficulty <= 6."""
    if timestamp is None:
        timestamp = parent.header.timestamp + 1
    txs = tuple(transactions)
    root = tx_root(txs)
    prefix = f"{parent.header.index + 1}|{timestamp}|{parent.hash}|{root}|"
    start = _nonce_start(node.rng_seed, timestamp)
    nonce, digest = _search_nonce(prefix, start, difficulty)
    header = BlockHeader(
        index=parent.header.index + 1,
        timestamp=timestamp,
        prev_hash=parent.hash,
        tx_root=root,
        nonce=nonce,
    )
    return Block(header, txs, digest)


def verify_block(block: Block, parent: Block, difficulty: int, capacity: int) -> VerifyResult:
    """Full structural check of a broadcast block against its parent.

    Recomputes everything derived: per-transaction ids, the transaction
    root, and the header hash, so any single-field tampering surfaces here.
    """
    header = block.header
    if header.index != parent.header.index + 1:
        return VerifyResult(False, "index does not increment parent")
    if header.prev_hash != parent.hash:
        return VerifyResult(False, "prev_hash does not link to parent")
    if header.timestamp < parent.header.timestamp:
        return VerifyResult(False, "timestamp precedes parent")
    if len(block.transactions) > capacity:
        return VerifyResult(False, "over block capacity")
    for tx in block.transactions:
        if tx.gas_fee < 1:
            return VerifyResult(False, f"transaction {tx.tx_id}: gas_fee below 1")
        expected = compute_tx_id(tx.sender, tx.target, tx.payload, tx.gas_fee)
        if tx.tx_id != expected:
            return VerifyResult(False, f"transaction id mismatch (stored {tx.tx_id})")
    if header.tx_root != tx_root(block.transactions):
        return VerifyResult(False, "tx_root mismatch")
    if block.hash != block_hash(header):
        return VerifyResult(False, "header hash mismatch")
    if not meets_difficulty(block.hash, difficulty):
        return VerifyResult(False, f"difficulty target not met ({difficulty} leading zeros)")
    return VerifyResult(True)


def validate_chain(blocks: Sequence[Block], difficulty: int, capacity: int) -> VerifyResult:
    if not blocks:
        return VerifyResult(False, "empty chain")
    if blocks[0] != genesis_block():
        return VerifyResult(False, "genesis block is not canonical")
    for i in range(1, len(blocks)):
        result = verify_block(blocks[i], blocks[i - 1], difficulty, capacity)
        if not result:
            return VerifyResult(False, f"block {i}: {result.reason}")
    return VerifyResult(True)


# ---------------------------------------------------------------------------
# The ledger: single-writer state machine over wallets, pool, and nodes
# ---------------------------------------------------------------------------


class Ledger:
    """Owns the wallets, the fee-priority mempool, and the node network.

    All mutations (faucet, submit, run_round) must come from one writer;
    reads hand out immutable snapshots and may run concurrently.
    """

    def __init__(self, config: LedgerConfig | None = None):
        self.config = config or LedgerConfig()
        genesis = create_genesis(self.config)[0]
        seed = self.config.seed
        self.nodes = [
            NodeSim(
                node_id=i,
                address=derive_address(f"{seed}/node/{i}".encode("ascii")),
                rng_seed=int.from_bytes(md5_bytes(f"{seed}/node/{i}/rng".encode("ascii"))[:8], "big"),
                chain=[genesis],
            )
            for i in range(self.config.node_count)
        ]
        self.wallets: dict[Address, int] = {node.address: 0 for node in self.nodes}
        self.pool: dict[str, Transaction] = {}
        self.tick = 0
        self._next_seq = 0
        self._lottery = random.Random(f"{seed}/lottery")
        self._confirmed: dict[str, int] = {}  # tx_id -> containing block index
        self._rejected: dict[str, str] = {}
        self._issued = 0

    @property
    def chain(self) -> list[Block]:
        return self.nodes[0].chain

    @property
    def tip(self) -> Block:
        return self.chain[-1]

    @property
    def escrowed(self) -> int:
        return sum(tx.gas_fee for tx in self.pool.values())

    @property
    def total_issued(self) -> int:
        return self._issued

    def balance(self, address: Address) -> int:
        return self.wallets.get(address, 0)

    def faucet(self, address: Address, amount: int) -> int:
        """Issue fee units out of thin air; declared test/operator plumbing."""
        if not is_address(address):
            raise ValueError(f"malformed address: {address!r}")
        if amount < 0:
            raise ValueError(f"faucet amount must be >= 0, got {amount}")
        self.wallets[address] = self.wallets.get(address, 0) + amount
        self._issued += amount
        return self.wallets[address]

    def submit(self, tx: Transaction) -> TxStatus:
        """Accept a transaction into the pool, escrowing its fee, or reject it."""
        if tx.tx_id != compute_tx_id(tx.sender, tx.target, tx.payload, tx.gas_fee):
            raise ValueError("transaction id does not match its serialization")
        if tx.gas_fee < 1:
            raise ValueError("gas_fee must be >= 1")
        if tx.tx_id in self.pool or tx.tx_id in self._confirmed:
            return TxStatus.rejected("duplicate")
        balance = self.wallets.get(tx.sender, 0)
        if balance < tx.gas_fee:
            self._rejected[tx.tx_id] = "insufficient balance"
            return TxStatus.rejected("insufficient balance")
        accepted = replace(tx, submit_seq=self._next_seq)
        self._next_seq += 1
        self.wallets[tx.sender] = balance - tx.gas_fee
        self.pool[accepted.tx_id] = accepted
        self._rejected.pop(accepted.tx_id, None)
        return TxStatus.pending()

    def select_transactions(self, capacity: int | None = None) -> list[Transaction]:
        """Highest fees first, submit order breaking ties; the pool is untouched."""
        if capacity is None:
            capacity = self.config.capacity
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        ranked = sorted(self.pool.values(), key=lambda tx: (-tx.gas_fee, tx.submit_seq))
        return ranked[:capacity]

    def run_round(self) -> RoundReport:
        """One mining round: lottery, proof-of-work, broadcast, convergence."""
        self.tick += 1
        selected = self.select_transactions()
        winner = self.nodes[self._lottery.randrange(len(self.nodes))]
        block = mine_block(
            winner,
            selected,
            winner.chain[-1],
            self.config.difficulty,
            timestamp=self.tick,
        )
        for node in self.nodes:
            result = verify_block(block, node.chain[-1], self.config.difficulty, self.config.capacity)
            if not result:
                raise RoundAborted(f"node {node.node_id} rejected the block: {result.reason}")
        for node in self.nodes:
            node.chain.append(block)
        fees = 0
        for tx in block.transactions:
            del self.pool[tx.tx_id]
            self._confirmed[tx.tx_id] = block.header.index
            fees += tx.gas_fee
        self.wallets[winner.address] += fees
        return RoundReport(winner.node_id, winner.address, block, fees)

    def adopt_block(self, block: Block, winner_address: Address) -> None:
        """Append an already-mined block, settling pool and fees.

        Used when restoring a ledger from disk: submissions are replayed
        through submit(), then each historical block is adopted instead of
        re-mined. The block still has to verify against the current tip.
        """
        result = verify_block(block, self.tip, self.config.difficulty, self.config.capacity)
        if not result:
            raise RoundAborted(f"stored block {block.header.index} rejected: {result.reason}")
        for node in self.nodes:
            node.chain.append(block)
        self.tick = max(self.tick, block.header.timestamp)
        fees = 0
        for tx in block.transactions:
            if tx.tx_id not in self.pool:
                raise RoundAborted(f"stored block {block.header.index} spends unknown tx {tx.tx_id}")
            del self.pool[tx.tx_id]
            self._confirmed[tx.tx_id] = block.header.index
            fees += tx.gas_fee
        self.wallets[winner_address] = self.wallets.get(winner_address, 0) + fees
        self._lottery.randrange(len(self.nodes))  # keep the lottery stream aligned

    def confirmation_status(self, tx_id: str) -> TxStatus:
        if tx_id in self.pool:
            return TxStatus.pending()
        if tx_id in self._confirmed:
            index = self._confirmed[tx_id]
            return TxStatus.confirmed(index, self.tip.header.index - index + 1)
        if tx_id in self._rejected:
            return TxStatus.rejected(self._rejected[tx_id])
        return TxStatus.rejected("unknown")

    def validate(self) -> VerifyResult:
        return validate_chain(self.chain, self.config.difficulty, self.config.capacity)

    def iter_transactions(self) -> Iterator[tuple[int, Transaction]]:
        """(block index, transaction) pairs in confirmation order."""
        for block in self.chain:
            for tx in block.transactions:
                yield block.header.index, tx


# ---------------------------------------------------------------------------
# Chain persistence: newline-delimited JSON, one block per line
# ---------------------------------------------------------------------------


def transaction_to_dict(tx: Transaction) -> dict:
    return {
        "tx_id": tx.tx_id,
        "sender": tx.sender,
        "target": tx.target,
        "payload": tx.payload,
        "gas_fee": tx.gas_fee,
        "submit_seq": tx.submit_seq,
    }


def transaction_from_dict(data: dict) -> Transaction:
    return Transaction(
        tx_id=data["tx_id"],
        sender=data["sender"],
        target=data["target"],
        payload=data["payload"],
        gas_fee=data["gas_fee"],
        submit_seq=data["submit_seq"],
    )


def block_to_dict(block: Block) -> dict:
    return {
        "index": block.header.index,
        "timestamp": block.header.timestamp,
        "prev_hash": block.header.prev_hash,
        "tx_root": block.header.tx_root,
        "nonce": block.header.nonce,
        "hash": block.hash,
        "transactions": [transaction_to_dict(tx) for tx in block.transactions],
    }


def block_from_dict(data: dict) -> Block:
    header = BlockHeader(
        index=data["index"],
        timestamp=data["timestamp"],
        prev_hash=data["prev_hash"],
        tx_root=data["tx_root"],
        nonce=data["nonce"],
    )
    txs = tuple(transaction_from_dict(t) for t in data["transactions"])
    return Block(header, txs, data["hash"])


def block_line(block: Block) -> str:
    return json.dumps(block_to_dict(block), sort_keys=True, separators=(",", ":"))


def save_chain(blocks: Sequence[Block], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for block in blocks:
            fh.write(block_line(block) + "\n")


def load_chain(path) -> list[Block]:
    """Parse a chain file; structural validation is the caller's call."""
    path = Path(path)
    if not path.exists():
        raise ChainFileError(path, "file not found")
    blocks = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                blocks.append(block_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ChainFileError(path, f"line {line_no}: unreadable block ({exc})") from exc
    return blocks
