"""HTTP/JSON surface over the registry service.

All bodies are UTF-8 JSON except the two upload endpoints, which take
multipart forms (a metadata JSON field plus the document bytes). Digests
travel as 32-hex strings. Errors are uniform: {"error": code, "message":
text} with a matching status code. Sessions ride the X-Session-Token
header.

Bodies are parsed by hand rather than through response models so every
failure, framework or domain, comes back in the same error shape.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .service import AuthorizationError, RegistryService, ServiceError, ValidationError

SESSION_HEADER = "x-session-token"

# (method, path, service operation) -- single source for route registration
# and for the UI/CLI coverage contract tests.
ROUTES = [
    ("POST", "/login", "login"),
    ("POST", "/logout", "logout"),
    ("GET", "/whoami", "whoami"),
    ("POST", "/reset/request", "request_reset"),
    ("POST", "/reset/apply", "apply_reset"),
    ("POST", "/admin/universities", "register_university"),
    ("POST", "/admin/employers", "add_employer"),
    ("GET", "/universities", "list_universities"),
    ("POST", "/universities/{university_id}/students", "add_student"),
    ("POST", "/universities/{university_id}/certificates", "authenticate_certificate"),
    ("GET", "/students/search", "search_students"),
    ("GET", "/students/{student_id}/record", "get_record"),
    ("GET", "/admin/outbox", "read_outbox"),
    ("POST", "/verify", "verify"),
    ("GET", "/chain", "chain_summary"),
    ("GET", "/chain/status/{tx_id}", "tx_status"),
    ("POST", "/admin/faucet", "faucet"),
]


async def _json_body(request: Request) -> dict:
    try:
        body = json.loads(await request.body() or b"{}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"request body is not valid JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise ValidationError("request body must be a JSON object")
    return body


def _token(request: Request) -> str | None:
    return request.headers.get(SESSION_HEADER)


def _require_str(body: dict, *keys: str) -> list[str]:
    values = []
    for key in keys:
        value = body.get(key)
        if not isinstance(value, str) or not value:
            raise ValidationError(f"field {key!r} is required")
        values.append(value)
    return values


def create_app(service: RegistryService, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="achievechain registry", docs_url=None, redoc_url=None)

    @app.exception_handler(ServiceError)
    async def service_error(_request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"error": exc.code, "message": exc.message},
        )

    @app.post("/login")
    async def login(request: Request):
        body = await _json_body(request)
        user_id, secret = _require_str(body, "user_id", "secret")
        return service.login(user_id, secret)

    @app.post("/logout")
    async def logout(request: Request):
        return service.logout(_token(request))

    @app.get("/whoami")
    async def whoami(request: Request):
        return service.whoami(_token(request))

    @app.post("/reset/request")
    async def reset_request(request: Request):
        body = await _json_body(request)
        (user_id,) = _require_str(body, "user_id")
        service.request_reset(user_id)
        return {"ok": True}  # never reveals whether the user exists

    @app.post("/reset/apply")
    async def reset_apply(request: Request):
        body = await _json_body(request)
        token, secret = _require_str(body, "token", "secret")
        return service.apply_reset(token, secret)

    @app.post("/admin/universities")
    async def register_university(request: Request):
        body = await _json_body(request)
        name, user_id, email, secret = _require_str(body, "name", "user_id", "email", "secret")
        return service.register_university(_token(request), name, user_id, email, secret)

    @app.post("/admin/employers")
    async def add_employer(request: Request):
        body = await _json_body(request)
        user_id, name, email, secret = _require_str(body, "user_id", "name", "email", "secret")
        return service.add_employer(_token(request), user_id, name, email, secret)

    @app.get("/universities")
    async def list_universities():
        return service.list_universities()

    def _check_university_path(request: Request, university_id: str) -> str | None:
        token = _token(request)
        caller = service.whoami(token)
        if caller["role"] == "university" and caller["user_id"] != university_id:
            raise AuthorizationError(f"session university is not {university_id!r}")
        return token

    @app.post("/universities/{university_id}/students")
    async def add_student(university_id: str, request: Request):
        token = _check_university_path(request, university_id)
        body = await _json_body(request)
        student_id, name, email, secret = _require_str(body, "student_id", "name", "email", "secret")
        return service.add_student(token, student_id, name, email, secret)

    @app.post("/universities/{university_id}/certificates")
    async def authenticate_certificate(university_id: str, request: Request):
        token = _check_university_path(request, university_id)
        form = await request.form()
        metadata_raw = form.get("metadata")
        upload = form.get("document")
        if metadata_raw is None or upload is None:
            raise ValidationError("multipart fields 'metadata' and 'document' are required")
        try:
            metadata = json.loads(metadata_raw)
        except (TypeError, json.JSONDecodeError) as exc:
            raise ValidationError(f"metadata is not valid JSON: {exc}") from exc
        if not isinstance(metadata, dict):
            raise ValidationError("metadata must be a JSON object")
        student_id, title, category = _require_str(metadata, "student_id", "title", "category")
        document = await upload.read()
        return service.authenticate_certificate(token, student_id, title, category, document)

    @app.get("/students/search")
    async def search_students(request: Request):
        params = request.query_params
        return service.search_students(
            _token(request),
            category=params.get("category") or None,
            university=params.get("university") or None,
            keyword=params.get("keyword") or None,
        )

    @app.get("/students/{student_id}/record")
    async def get_record(student_id: str, request: Request):
        return service.get_record(_token(request), student_id)

    @app.get("/admin/outbox")
    async def read_outbox(request: Request):
        return service.read_outbox(_token(request))

    @app.post("/verify")
    async def verify(request: Request):
        token = _token(request)
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/"):
            form = await request.form()
            upload = form.get("document")
            if upload is None:
                raise ValidationError("multipart field 'document' is required")
            return service.verify(document=await upload.read(), token=token)
        body = await _json_body(request)
        digest = body.get("digest")
        if not isinstance(digest, str):
            raise ValidationError("field 'digest' is required")
        return service.verify(digest=digest, token=token)

    @app.get("/chain")
    async def chain_summary():
        return service.chain_summary()

    @app.get("/chain/status/{tx_id}")
    async def tx_status(tx_id: str):
        return service.tx_status(tx_id)

    @app.post("/admin/faucet")
    async def faucet(request: Request):
        body = await _json_body(request)
        (address,) = _require_str(body, "address")
        amount = body.get("amount")
        if not isinstance(amount, int):
            raise ValidationError("field 'amount' must be an integer")
        return service.faucet(_token(request), address, amount)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")

    return app
