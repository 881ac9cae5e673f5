"""
End-to-end tests of the HTTP surface: expression in, canonical rendering out.
"""

import os

import pytest
from fastapi.testclient import TestClient

os.environ["HOPFCYCLIC_ENVIRONMENT"] = "testing"

from main import app

client = TestClient(app)


class TestHealth:
    """Every router answers on /health."""

    @pytest.mark.parametrize(
        "path,service",
        [
            ("/health", "hopf-cyclic-engine"),
            ("/v1/algebra/health", "algebra"),
            ("/v1/cyclic/health", "cyclic"),
            ("/v1/classes/health", "classes"),
        ],
    )
    def test_health(self, path, service):
        response = client.get(path)
        assert response.status_code == 200
        assert response.json()["service"] == service

    def test_classes_health_lists_cocycles(self):
        assert "godbillon_vey" in client.get("/v1/classes/health").json()["cocycles"]


class TestAlgebraFlow:
    def test_normal_form(self):
        response = client.post("/v1/algebra/normal-form", json={"expression": "Y*X"})
        assert response.status_code == 200
        assert response.json() == {"result": "X + X*Y", "degree": 1}

    def test_coproduct(self):
        response = client.post("/v1/algebra/coproduct", json={"expression": "X"})
        assert response.json() == {"result": "1 ox X + X ox 1 + d1 ox Y", "degree": 2}

    def test_antipode(self):
        response = client.post("/v1/algebra/antipode", json={"expression": "d2"})
        assert response.json()["result"] == "-d2 + d1^2"

    def test_twisted_antipode_depends_on_character(self):
        modular = client.post("/v1/algebra/twisted-antipode", json={"expression": "Y"})
        untwisted = client.post("/v1/algebra/twisted-antipode", json={"expression": "Y", "character": "counit"})
        assert modular.json()["result"] == "1 - Y"
        assert untwisted.json()["result"] == "-Y"

    def test_syntax_error_is_400(self):
        response = client.post("/v1/algebra/normal-form", json={"expression": "X ox * Y"})
        assert response.status_code == 400
        detail = response.json()["detail"]
        assert detail["error_code"] == "SYNTAX_ERROR"
        assert detail["details"] == {"line": 1, "column": 6}

    def test_out_of_range_index_is_400(self):
        response = client.post("/v1/algebra/normal-form", json={"expression": "X[2]"})
        assert response.status_code == 400
        assert response.json()["detail"]["error_code"] == "INDEX_OUT_OF_RANGE"

    def test_codim_validation_is_422(self):
        response = client.post("/v1/algebra/normal-form", json={"expression": "X", "codim": 0})
        assert response.status_code == 422


class TestCyclicFlow:
    def test_hochschild_b(self):
        response = client.post("/v1/cyclic/hochschild-b", json={"expression": "X"})
        assert response.json() == {"result": "-d1 ox Y", "degree": 2}

    def test_connes_b_of_godbillon_vey(self):
        response = client.post("/v1/cyclic/connes-b", json={"expression": "d1 ox X + 1/2 d1^2 ox Y"})
        assert response.json() == {"result": "d2 - 1/2 d1^2", "degree": 1}

    def test_cyclic_operator(self):
        response = client.post("/v1/cyclic/cyclic-operator", json={"expression": "d1"})
        assert response.json()["result"] == "-d1"

    @pytest.mark.parametrize("expression,expected", [("d1", True), ("Y", False)])
    def test_is_cocycle(self, expression, expected):
        response = client.post("/v1/cyclic/is-cocycle", json={"expression": expression})
        assert response.status_code == 200
        assert response.json()["is_cocycle"] is expected

    def test_verify_lambda(self):
        response = client.post("/v1/cyclic/verify-lambda", json={"n_max": 1, "trials": 3})
        assert response.status_code == 200
        report = response.json()
        assert report["pass"] is True
        assert report["schema"] == 1


class TestClassesFlow:
    @pytest.mark.parametrize(
        "name,degree,rendering",
        [("godbillon_vey", 1, "d1"), ("hochschild_c", 2, "d1 ox X + 1/2 d1^2 ox Y")],
    )
    def test_named_cocycle(self, name, degree, rendering):
        response = client.get(f"/v1/classes/{name}")
        assert response.json() == {"name": name, "degree": degree, "rendering": rendering}

    def test_unknown_cocycle_is_404(self):
        response = client.get("/v1/classes/pontryagin")
        assert response.status_code == 404
        detail = response.json()["detail"]
        assert detail["error_code"] == "UNKNOWN_COCYCLE"
        assert "schwarzian" in detail["details"]["known"]

    def test_verify(self):
        report = client.get("/v1/classes/verify").json()
        assert report["pass"] is True
        assert report["suite"] == "classes"
