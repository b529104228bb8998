"""Simulated proof-of-work ledger hosting an achievement registry.

Layers, bottom up:

- crypto    -- RFC 1321 MD5, the system's only fingerprint primitive
- ledger    -- wallets, fee-priority mempool, mining across simulated nodes
- contract  -- the registry state machine, derived by replaying the chain
- service   -- accounts, achievement records, email outbox, reset flow
- api       -- HTTP/JSON surface consumed by the web console
- cli       -- operator commands and the scenario runner
"""

__version__ = "0.1.0"

from .crypto import Digest128, md5_digest

__all__ = ["Digest128", "md5_digest", "__version__"]
