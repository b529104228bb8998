import pytest

from achievechain.config import ServiceConfig
from achievechain.service import RegistryService


def make_config(**overrides) -> ServiceConfig:
    """Desk-scale defaults for tests: fast mining unless a test says otherwise."""
    values = {"difficulty": 1, "seed": 1234}
    values.update(overrides)
    return ServiceConfig(**values)


def make_service(**overrides) -> RegistryService:
    return RegistryService(make_config(**overrides))


@pytest.fixture
def service() -> RegistryService:
    svc = make_service()
    svc.bootstrap()
    return svc


@pytest.fixture
def admin_session(service) -> str:
    return service.login(service.config.admin_user, service.config.admin_secret)["token"]


@pytest.fixture
def populated(service, admin_session):
    """Service with one confirmed university, one student, one employer."""
    reg = service.register_university(
        admin_session, "Newcastle University", "ncl", "registrar@ncl.example", "uni-secret"
    )
    service.mine_until_confirmed(reg["tx_id"])
    uni_session = service.login("ncl", "uni-secret")["token"]
    service.add_student(uni_session, "s100", "Ada Lovelace", "ada@example.org", "student-secret")
    service.add_employer(admin_session, "acme", "ACME Recruiting", "jobs@acme.example", "employer-secret")
    return {
        "service": service,
        "admin": admin_session,
        "uni": uni_session,
        "student": service.login("s100", "student-secret")["token"],
        "employer": service.login("acme", "employer-secret")["token"],
        "uni_address": reg["address"],
    }


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\n[{outcome}] {name}")
