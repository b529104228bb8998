import json

import pytest
from fastapi.testclient import TestClient

from achievechain.api import ROUTES, create_app
from achievechain.crypto import md5_digest
from achievechain.service import SERVICE_OPERATIONS
from conftest import make_service


@pytest.fixture
def client():
    svc = make_service()
    svc.bootstrap()
    return TestClient(create_app(svc)), svc


def login(client, user_id, secret) -> dict:
    response = client.post("/login", json={"user_id": user_id, "secret": secret})
    assert response.status_code == 200, response.text
    return {"X-Session-Token": response.json()["token"]}


def setup_university(client, svc, name="Newcastle University", user_id="ncl"):
    admin = login(client, svc.config.admin_user, svc.config.admin_secret)
    reg = client.post(
        "/admin/universities",
        json={"name": name, "user_id": user_id, "email": "r@x", "secret": "uni-secret"},
        headers=admin,
    )
    assert reg.status_code == 200, reg.text
    svc.mine_until_confirmed(reg.json()["tx_id"])
    return admin, login(client, user_id, "uni-secret"), reg.json()


def test_login_logout_whoami(client):
    client, svc = client
    headers = login(client, svc.config.admin_user, svc.config.admin_secret)
    who = client.get("/whoami", headers=headers)
    assert who.status_code == 200 and who.json()["role"] == "admin"
    assert client.post("/logout", headers=headers).status_code == 200
    assert client.get("/whoami", headers=headers).status_code == 401


def test_login_error_shape(client):
    client, _ = client
    response = client.post("/login", json={"user_id": "ghost", "secret": "x"})
    assert response.status_code == 401
    body = response.json()
    assert set(body) == {"error", "message"}
    assert body["error"] == "unauthenticated"


def test_malformed_json_is_400(client):
    client, _ = client
    response = client.post("/login", content=b"{nope", headers={"content-type": "application/json"})
    assert response.status_code == 400
    assert response.json()["error"] == "invalid"


def test_full_flow_over_http(client):
    client, svc = client
    admin, uni, reg = setup_university(client, svc)

    added = client.post(
        "/universities/ncl/students",
        json={"student_id": "s100", "name": "Ada", "email": "ada@x", "secret": "pw"},
        headers=uni,
    )
    assert added.status_code == 200

    doc = b"Certificate of Achievement: Ada"
    upload = client.post(
        "/universities/ncl/certificates",
        data={"metadata": json.dumps({"student_id": "s100", "title": "BSc", "category": "Academic"})},
        files={"document": ("cert.pdf", doc, "application/pdf")},
        headers=uni,
    )
    assert upload.status_code == 200, upload.text
    result = upload.json()
    assert result["cert_digest"] == md5_digest(doc)

    status = client.get(f"/chain/status/{result['tx_id']}")
    assert status.json()["state"] == "pending"
    svc.mine_until_confirmed(result["tx_id"])
    status = client.get(f"/chain/status/{result['tx_id']}")
    assert status.json()["state"] == "confirmed"

    student = login(client, "s100", "pw")
    record = client.get("/students/s100/record", headers=student)
    assert record.status_code == 200
    assert len(record.json()["entries"]) == 1

    verdict = client.post("/verify", json={"digest": result["cert_digest"]})
    assert verdict.status_code == 200
    assert verdict.json()["valid"] is True

    forged = client.post("/verify", json={"digest": md5_digest(b"forged")})
    assert forged.json()["valid"] is False

    outbox = client.get("/admin/outbox", headers=admin)
    assert outbox.status_code == 200
    assert any(result["cert_digest"] in e["body"] for e in outbox.json()["events"])


def test_verify_multipart_document(client):
    client, svc = client
    _, uni, _ = setup_university(client, svc)
    client.post(
        "/universities/ncl/students",
        json={"student_id": "s1", "name": "A", "email": "a@x", "secret": "pw"},
        headers=uni,
    )
    doc = b"multipart verified document"
    upload = client.post(
        "/universities/ncl/certificates",
        data={"metadata": json.dumps({"student_id": "s1", "title": "T", "category": "Prize"})},
        files={"document": ("d.bin", doc)},
        headers=uni,
    )
    svc.mine_until_confirmed(upload.json()["tx_id"])
    verdict = client.post("/verify", files={"document": ("d.bin", doc)})
    assert verdict.json() == {
        "checked_digest": md5_digest(doc),
        "valid": True,
        "issuer_name": "Newcastle University",
        "revoked": False,
    }


def test_verify_malformed_digest_rejected(client):
    client, _ = client
    response = client.post("/verify", json={"digest": "xyz"})
    assert response.status_code == 400


def test_role_errors_over_http(client):
    client, svc = client
    _, uni, _ = setup_university(client, svc)
    client.post(
        "/universities/ncl/students",
        json={"student_id": "s1", "name": "A", "email": "a@x", "secret": "pw"},
        headers=uni,
    )
    student = login(client, "s1", "pw")
    # student may not register universities
    refused = client.post(
        "/admin/universities",
        json={"name": "X", "user_id": "x", "email": "x@x", "secret": "s"},
        headers=student,
    )
    assert refused.status_code == 403
    # anonymous may not read the outbox
    assert client.get("/admin/outbox").status_code == 401
    # a university cannot post under another university's path
    other = client.post(
        "/universities/other-uni/students",
        json={"student_id": "s2", "name": "B", "email": "b@x", "secret": "pw"},
        headers=uni,
    )
    assert other.status_code == 403


def test_search_endpoint(client):
    client, svc = client
    admin, uni, _ = setup_university(client, svc)
    client.post(
        "/universities/ncl/students",
        json={"student_id": "s1", "name": "A", "email": "a@x", "secret": "pw"},
        headers=uni,
    )
    upload = client.post(
        "/universities/ncl/certificates",
        data={"metadata": json.dumps({"student_id": "s1", "title": "Marathon", "category": "ExtraCurricular"})},
        files={"document": ("d.bin", b"race result")},
        headers=uni,
    )
    svc.mine_until_confirmed(upload.json()["tx_id"])
    client.post(
        "/admin/employers",
        json={"user_id": "acme", "name": "ACME", "email": "j@x", "secret": "pw"},
        headers=admin,
    )
    employer = login(client, "acme", "pw")
    hits = client.get("/students/search?category=ExtraCurricular&keyword=marathon", headers=employer)
    assert hits.status_code == 200
    assert [r["student_id"] for r in hits.json()["results"]] == ["s1"]
    empty = client.get("/students/search?keyword=nope", headers=employer)
    assert empty.json()["results"] == []


def test_reset_over_http(client):
    client, svc = client
    _, uni, _ = setup_university(client, svc)
    client.post(
        "/universities/ncl/students",
        json={"student_id": "s1", "name": "A", "email": "a@x", "secret": "old-pw"},
        headers=uni,
    )
    requested = client.post("/reset/request", json={"user_id": "s1"})
    assert requested.json() == {"ok": True}
    # also silent for unknown users
    assert client.post("/reset/request", json={"user_id": "ghost"}).json() == {"ok": True}
    import re

    reset_mail = next(e for e in svc.outbox if e.to == "a@x")
    token = re.search(r"(?<![0-9a-f])[0-9a-f]{32}(?![0-9a-f])", reset_mail.body).group(0)
    applied = client.post("/reset/apply", json={"token": token, "secret": "new-pw"})
    assert applied.status_code == 200
    assert client.post("/login", json={"user_id": "s1", "secret": "old-pw"}).status_code == 401
    assert client.post("/login", json={"user_id": "s1", "secret": "new-pw"}).status_code == 200


def test_chain_and_faucet_endpoints(client):
    client, svc = client
    admin, _, reg = setup_university(client, svc)
    chain = client.get("/chain")
    assert chain.status_code == 200
    body = chain.json()
    assert body["length"] == len(svc.ledger.chain)
    assert body["tip_hash"] == svc.ledger.tip.hash
    assert body["blocks"][0]["index"] == 0

    funded = client.post(
        "/admin/faucet", json={"address": reg["address"], "amount": 7}, headers=admin
    )
    assert funded.status_code == 200
    assert funded.json()["balance"] == svc.config.faucet_amount + 7
    # faucet is admin-gated
    assert client.post("/admin/faucet", json={"address": reg["address"], "amount": 1}).status_code == 401


def test_routes_table_matches_app(client):
    client, svc = client
    app_routes = {
        (method, route.path)
        for route in client.app.routes
        if hasattr(route, "methods")
        for method in route.methods
        if method not in ("HEAD", "OPTIONS")
    }
    for method, path, operation in ROUTES:
        assert (method, path) in app_routes, f"missing route {method} {path}"
        assert operation in SERVICE_OPERATIONS or operation == "whoami"


def test_unknown_tx_status(client):
    client, _ = client
    assert client.get(f"/chain/status/{'ab' * 16}").json() == {"state": "rejected", "reason": "unknown"}
    assert client.get("/chain/status/zzz").status_code == 400
