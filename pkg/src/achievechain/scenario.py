"""Line-oriented scenario scripts.

One step per line: a verb followed by a JSON object of arguments. Blank
lines and '#' comments are skipped. Step results can be captured under a
name with "as" and referenced later: any argument key ending in "_from"
resolves a dotted path ("auth.cert_digest", "rec.entries.0.title") into a
previously captured result, and the assert verb checks such paths.

Any step may carry "expect_error": "<code>"; the step then passes only if
the service refuses it with that error code. Parse problems exit 2,
assertion or execution failures exit 1, per the CLI contract.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .service import RegistryService, ServiceError

# verb -> service operation it drives (None for control verbs). The test
# suite checks this covers every service operation.
VERB_OPERATIONS = {
    "login": "login",
    "logout": "logout",
    "whoami": "whoami",
    "deploy": "deploy_contract",
    "register-university": "register_university",
    "add-student": "add_student",
    "add-employer": "add_employer",
    "authenticate": "authenticate_certificate",
    "revoke": "revoke_certificate",
    "verify": "verify",
    "record": "get_record",
    "search": "search_students",
    "universities": "list_universities",
    "request-reset": "request_reset",
    "apply-reset": "apply_reset",
    "outbox": "read_outbox",
    "faucet": "faucet",
    "mine": "mine_rounds",
    "status": "tx_status",
    "chain": "chain_summary",
    "assert": None,
}


class ScenarioParseError(Exception):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class ScenarioStepError(Exception):
    def __init__(self, line_no: int, verb: str, message: str):
        self.line_no = line_no
        self.verb = verb
        super().__init__(f"line {line_no} ({verb}): {message}")


@dataclass
class Step:
    line_no: int
    verb: str
    args: dict


@dataclass
class StepOutcome:
    line_no: int
    verb: str
    result: object

    def as_dict(self) -> dict:
        return {"line": self.line_no, "verb": self.verb, "result": self.result}


def parse_script(text: str) -> list[Step]:
    steps = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        verb = parts[0]
        if verb not in VERB_OPERATIONS:
            raise ScenarioParseError(line_no, f"unknown verb {verb!r}")
        if len(parts) == 1:
            args: dict = {}
        else:
            try:
                args = json.loads(parts[1])
            except json.JSONDecodeError as exc:
                raise ScenarioParseError(line_no, f"bad JSON arguments: {exc}") from None
            if not isinstance(args, dict):
                raise ScenarioParseError(line_no, "arguments must be a JSON object")
        steps.append(Step(line_no, verb, args))
    return steps


def resolve_path(captures: dict, path: str):
    parts = path.split(".")
    if parts[0] not in captures:
        raise KeyError(f"no captured result named {parts[0]!r}")
    value = captures[parts[0]]
    for part in parts[1:]:
        if isinstance(value, list):
            value = value[int(part)]
        elif isinstance(value, dict):
            if part not in value:
                raise KeyError(f"{path!r}: no field {part!r}")
            value = value[part]
        else:
            raise KeyError(f"{path!r}: cannot descend into {type(value).__name__}")
    return value


class ScenarioRunner:
    def __init__(self, service: RegistryService, base_dir: Path | None = None):
        self.service = service
        self.base_dir = base_dir or Path.cwd()
        self.captures: dict[str, object] = {}
        self.outcomes: list[StepOutcome] = []

    # -- argument plumbing ---------------------------------------------------

    def _expand(self, step: Step) -> dict:
        args = {}
        for key, value in step.args.items():
            if key.endswith("_from"):
                try:
                    args[key[: -len("_from")]] = resolve_path(self.captures, str(value))
                except (KeyError, IndexError, ValueError) as exc:
                    raise ScenarioStepError(step.line_no, step.verb, str(exc)) from None
            else:
                args[key] = value
        return args

    def _session(self, step: Step, args: dict) -> str | None:
        name = args.get("session")
        if name is None:
            return None
        captured = self.captures.get(name)
        if not isinstance(captured, dict) or "token" not in captured:
            raise ScenarioStepError(step.line_no, step.verb, f"{name!r} is not a login capture")
        return captured["token"]

    def _document(self, step: Step, args: dict) -> bytes | None:
        if "document" in args:
            return str(args["document"]).encode("utf-8")
        if "document_file" in args:
            path = self.base_dir / str(args["document_file"])
            if not path.exists():
                raise ScenarioStepError(step.line_no, step.verb, f"document file not found: {path}")
            return path.read_bytes()
        return None

    # -- execution -------------------------------------------------------------

    def run(self, steps: list[Step]) -> list[StepOutcome]:
        for step in steps:
            result = self._run_step(step)
            if "as" in step.args:
                self.captures[str(step.args["as"])] = result
            self.captures["last"] = result
            self.outcomes.append(StepOutcome(step.line_no, step.verb, result))
        return self.outcomes

    def _run_step(self, step: Step):
        args = self._expand(step)
        expected_error = args.pop("expect_error", None)
        if step.verb == "assert":
            return self._run_assert(step, args)
        try:
            result = self._dispatch(step, args)
        except ServiceError as exc:
            if expected_error is not None:
                if exc.code != expected_error:
                    raise ScenarioStepError(
                        step.line_no, step.verb,
                        f"expected error {expected_error!r}, got {exc.code!r}: {exc.message}",
                    ) from None
                return {"error": exc.code, "message": exc.message}
            raise ScenarioStepError(step.line_no, step.verb, f"{exc.code}: {exc.message}") from None
        if expected_error is not None:
            raise ScenarioStepError(
                step.line_no, step.verb, f"expected error {expected_error!r} but the step succeeded"
            )
        return result

    def _run_assert(self, step: Step, args: dict):
        path = args.get("that")
        if not isinstance(path, str):
            raise ScenarioStepError(step.line_no, step.verb, "assert needs a 'that' path")
        try:
            actual = resolve_path(self.captures, path)
        except (KeyError, IndexError, ValueError) as exc:
            raise ScenarioStepError(step.line_no, step.verb, str(exc)) from None
        if "equals" in args and actual != args["equals"]:
            raise ScenarioStepError(
                step.line_no, step.verb, f"{path} = {actual!r}, expected {args['equals']!r}"
            )
        if "not_equals" in args and actual == args["not_equals"]:
            raise ScenarioStepError(
                step.line_no, step.verb, f"{path} = {actual!r}, expected anything else"
            )
        if "contains" in args:
            needle = args["contains"]
            if needle not in actual:
                raise ScenarioStepError(
                    step.line_no, step.verb, f"{path} does not contain {needle!r}"
                )
        if "exists" in args and bool(args["exists"]) != (actual is not None):
            raise ScenarioStepError(step.line_no, step.verb, f"{path} existence != {args['exists']}")
        return {"ok": True, "that": path, "value": actual}

    def _dispatch(self, step: Step, args: dict):
        svc = self.service
        verb = step.verb
        token = self._session(step, args)
        if verb == "login":
            return svc.login(str(args["user"]), str(args["secret"]))
        if verb == "logout":
            return svc.logout(token)
        if verb == "whoami":
            return svc.whoami(token)
        if verb == "deploy":
            return svc.deploy_contract(token)
        if verb == "register-university":
            return svc.register_university(
                token, str(args["name"]), str(args["user"]), str(args["email"]), str(args["secret"])
            )
        if verb == "add-student":
            return svc.add_student(
                token, str(args["student"]), str(args["name"]), str(args["email"]), str(args["secret"])
            )
        if verb == "add-employer":
            return svc.add_employer(
                token, str(args["user"]), str(args["name"]), str(args["email"]), str(args["secret"])
            )
        if verb == "authenticate":
            document = self._document(step, args)
            if document is None:
                raise ScenarioStepError(step.line_no, verb, "needs 'document' or 'document_file'")
            return svc.authenticate_certificate(
                token, str(args["student"]), str(args["title"]), str(args["category"]), document
            )
        if verb == "revoke":
            return svc.revoke_certificate(token, str(args["digest"]))
        if verb == "verify":
            document = self._document(step, args)
            if document is not None:
                return svc.verify(document=document, token=token)
            return svc.verify(digest=str(args.get("digest", "")), token=token)
        if verb == "record":
            return svc.get_record(token, str(args["student"]))
        if verb == "search":
            return svc.search_students(
                token,
                category=args.get("category"),
                university=args.get("university"),
                keyword=args.get("keyword"),
            )
        if verb == "universities":
            return svc.list_universities()
        if verb == "request-reset":
            return svc.request_reset(str(args["user"]))
        if verb == "apply-reset":
            return svc.apply_reset(str(args["token"]), str(args["secret"]))
        if verb == "outbox":
            return svc.read_outbox(token)
        if verb == "faucet":
            return svc.faucet(token, str(args["address"]), int(args["amount"]))
        if verb == "mine":
            return svc.mine_rounds(int(args.get("rounds", 1)))
        if verb == "status":
            return svc.tx_status(str(args["tx"]))
        if verb == "chain":
            summary = svc.chain_summary()
            summary.pop("blocks", None)  # keep captures readable
            return summary
        raise ScenarioStepError(step.line_no, verb, "unhandled verb")  # unreachable


def run_scenario_file(path, service: RegistryService) -> list[StepOutcome]:
    path = Path(path)
    steps = parse_script(path.read_text(encoding="utf-8"))
    runner = ScenarioRunner(service, base_dir=path.parent)
    return runner.run(steps)
