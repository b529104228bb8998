"""Operator command line.

Commands: serve, scenario run <file>, chain inspect, hash <file>,
faucet <addr> <amount>, mine <n>. Exit codes are a stable contract:
0 success, 1 assertion or validation failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
import threading
from pathlib import Path

from .config import ConfigError, load_config
from .crypto import Md5
from .ledger import ChainFileError, load_chain, validate_chain
from .scenario import ScenarioParseError, ScenarioStepError, run_scenario_file
from .service import DataDirError, RegistryService, ServiceError

USAGE_ERROR = 2
FAILURE = 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--data-dir", help="state directory (chain + event log)")
    common.add_argument("--seed", type=int, help="RNG seed for the whole simulation")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog="achievechain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", parents=[common], help="run the HTTP service and mining scheduler")
    serve.add_argument("--port", type=int, help="listen port")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--static-dir", help="directory of built console assets to serve at /")

    scenario = sub.add_parser("scenario", parents=[common], help="scenario script tools")
    scenario_sub = scenario.add_subparsers(dest="scenario_command", required=True)
    scenario_run = scenario_sub.add_parser("run", parents=[common], help="execute a scenario script")
    scenario_run.add_argument("script", help="scenario script file")

    chain = sub.add_parser("chain", parents=[common], help="chain tools")
    chain_sub = chain.add_subparsers(dest="chain_command", required=True)
    chain_sub.add_parser("inspect", parents=[common], help="validate and summarize the stored chain")

    hash_cmd = sub.add_parser("hash", parents=[common], help="print a document's fingerprint")
    hash_cmd.add_argument("file", help="document to fingerprint")

    faucet = sub.add_parser("faucet", parents=[common], help="fund a wallet (test plumbing)")
    faucet.add_argument("address", help="40-hex wallet address")
    faucet.add_argument("amount", type=int)

    mine = sub.add_parser("mine", parents=[common], help="mine n rounds against the stored state")
    mine.add_argument("rounds", type=int)

    return parser


def _build_config(args, **extra):
    overrides = {
        "data_dir": getattr(args, "data_dir", None),
        "seed": getattr(args, "seed", None),
        "port": getattr(args, "port", None),
    }
    overrides.update(extra)
    return load_config(getattr(args, "config", None), overrides)


def _open_service(args) -> RegistryService:
    return RegistryService(_build_config(args))


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _cmd_serve(args) -> int:
    config = _build_config(args)
    try:
        service = RegistryService(config)
    except (DataDirError, ChainFileError) as exc:
        print(f"refusing to start: {exc}", file=sys.stderr)
        return FAILURE
    service.bootstrap()

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, config.port))
    except OSError:
        print(f"port {config.port} is already in use on {args.host}", file=sys.stderr)
        return FAILURE
    finally:
        probe.close()

    static_dir = args.static_dir
    if static_dir is None and Path("frontend/dist").is_dir():
        static_dir = "frontend/dist"

    from .api import create_app

    app = create_app(service, static_dir=static_dir)

    stop = threading.Event()

    def scheduler():
        # Mine only when work is pending so an idle service leaves the chain alone.
        while not stop.wait(config.round_interval):
            if service.ledger.pool:
                service.mine_rounds(1)

    ticker = threading.Thread(target=scheduler, name="round-scheduler", daemon=True)
    ticker.start()

    import signal

    import uvicorn

    server = uvicorn.Server(uvicorn.Config(app, host=args.host, port=config.port, log_level="warning"))

    def request_shutdown(_sig, _frame):
        # uvicorn re-raises the captured signal after a graceful stop; this
        # handler absorbs it so SIGTERM ends with exit code 0.
        server.should_exit = True

    signal.signal(signal.SIGTERM, request_shutdown)
    signal.signal(signal.SIGINT, request_shutdown)

    print(f"serving on http://{args.host}:{config.port} (data: {config.data_dir or 'in-memory'})")
    server.run()
    stop.set()
    ticker.join(timeout=5)
    return 0


def _cmd_scenario_run(args) -> int:
    script = Path(args.script)
    if not script.exists():
        print(f"scenario file not found: {script}", file=sys.stderr)
        return USAGE_ERROR
    service = _open_service(args)
    try:
        outcomes = run_scenario_file(script, service)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ScenarioStepError as exc:
        print(f"scenario failed: {exc}", file=sys.stderr)
        return FAILURE
    except (DataDirError, ChainFileError) as exc:
        print(f"data directory unusable: {exc}", file=sys.stderr)
        return FAILURE
    if args.json:
        print(json.dumps([o.as_dict() for o in outcomes], sort_keys=True))
    else:
        for outcome in outcomes:
            print(f"ok line {outcome.line_no}: {outcome.verb}")
        print(f"scenario passed ({len(outcomes)} steps)")
    return 0


def _cmd_chain_inspect(args) -> int:
    config = _build_config(args)
    if config.data_dir is None:
        print("chain inspect needs --data-dir (or data_dir in the config file)", file=sys.stderr)
        return USAGE_ERROR
    chain_path = Path(config.data_dir) / "chain.jsonl"
    try:
        blocks = load_chain(chain_path)
    except ChainFileError as exc:
        print(f"unreadable chain: {exc}", file=sys.stderr)
        return FAILURE
    result = validate_chain(blocks, config.difficulty, config.capacity)
    summary = {
        "file": str(chain_path),
        "length": len(blocks),
        "valid": bool(result),
        "reason": result.reason,
        "blocks": [
            {
                "index": b.header.index,
                "timestamp": b.header.timestamp,
                "hash": b.hash,
                "transactions": len(b.transactions),
            }
            for b in blocks
        ],
    }
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        for row in summary["blocks"]:
            print(f"#{row['index']:>4}  t={row['timestamp']:<6} txs={row['transactions']:<3} {row['hash']}")
        print("chain VALID" if result else f"chain INVALID: {result.reason}")
    return 0 if result else FAILURE


def _cmd_hash(args) -> int:
    path = Path(args.file)
    if not path.exists():
        print(f"file not found: {path}", file=sys.stderr)
        return FAILURE
    hasher = Md5()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            hasher.update(chunk)
    digest = hasher.hexdigest()
    _emit(args, {"digest": digest, "path": str(path)}, digest)
    return 0


def _cmd_faucet(args) -> int:
    config = _build_config(args)
    if config.data_dir is None:
        print("faucet needs --data-dir to have a ledger to fund", file=sys.stderr)
        return USAGE_ERROR
    try:
        service = RegistryService(config)
        result = service.faucet_address(args.address, args.amount)
    except (ServiceError, DataDirError, ChainFileError) as exc:
        print(f"faucet failed: {exc}", file=sys.stderr)
        return FAILURE
    _emit(args, result, f"{result['address']} balance {result['balance']}")
    return 0


def _cmd_mine(args) -> int:
    config = _build_config(args)
    if config.data_dir is None:
        print("mine needs --data-dir to have a ledger to extend", file=sys.stderr)
        return USAGE_ERROR
    try:
        service = RegistryService(config)
        result = service.mine_rounds(args.rounds)
    except (ServiceError, DataDirError, ChainFileError) as exc:
        print(f"mine failed: {exc}", file=sys.stderr)
        return FAILURE
    for row in result["rounds"]:
        _emit(
            args,
            row,
            f"block {row['block_index']} mined by node {row['winner_node_id']} "
            f"({row['transactions']} txs, {row['fees']} fees)",
        )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "scenario":
            return _cmd_scenario_run(args)
        if args.command == "chain":
            return _cmd_chain_inspect(args)
        if args.command == "hash":
            return _cmd_hash(args)
        if args.command == "faucet":
            return _cmd_faucet(args)
        if args.command == "mine":
            return _cmd_mine(args)
    except ConfigError as exc:
        print(f"bad configuration: {exc}", file=sys.stderr)
        return USAGE_ERROR
    parser.error(f"unknown command {args.command!r}")
    return USAGE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
