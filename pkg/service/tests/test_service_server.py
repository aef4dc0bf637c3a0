"""The wire-protocol routes and their error shapes."""

import json

import pytest
from fastapi.testclient import TestClient

from victim_service.embeddings import EmbeddingTable
from victim_service.linear import LinearJsonModel
from victim_service.server import build_app


@pytest.fixture(scope="module")
def model():
    return LinearJsonModel(
        biases=[0.0, 0.0],
        weights={"good": [0.0, 2.0], "bad": [2.0, 0.0]},
        label_names=["negative", "positive"],
    )


@pytest.fixture(scope="module")
def table(tmp_path_factory):
    path = tmp_path_factory.mktemp("emb") / "embeddings.txt"
    path.write_text("good 1.0 0.0\nbad 0.0 1.0\n")
    return EmbeddingTable.from_file(path)


@pytest.fixture(scope="module")
def client(model, table):
    return TestClient(build_app(classifier=model, encoder=table))


class TestInfo:
    def test_reports_labels(self, client):
        response = client.get("/info")
        assert response.status_code == 200
        assert response.json() == {"num_labels": 2, "label_names": ["negative", "positive"]}

    def test_404_when_no_classifier(self, table):
        client = TestClient(build_app(encoder=table))
        response = client.get("/info")
        assert response.status_code == 404
        assert "error" in response.json()


class TestClassify:
    def test_rows_match_the_backend_in_request_order(self, client, model):
        texts = ["good", "bad", "good good bad"]
        response = client.post("/classify", json={"texts": texts})
        assert response.status_code == 200
        assert response.json() == {"probabilities": model.classify(texts)}

    def test_single_and_empty_batches(self, client):
        assert len(client.post("/classify", json={"texts": ["x"]}).json()["probabilities"]) == 1
        assert client.post("/classify", json={"texts": []}).json() == {"probabilities": []}

    def test_rows_sum_to_one(self, client):
        rows = client.post(
            "/classify", json={"texts": ["good bad", "", "unseen words"]}
        ).json()["probabilities"]
        for row in rows:
            assert abs(sum(row) - 1.0) <= 1e-6

    def test_repeats_are_identical(self, client):
        payload = {"texts": ["good bad good"]}
        assert (
            client.post("/classify", json=payload).json()
            == client.post("/classify", json=payload).json()
        )

    def test_404_when_no_classifier(self, table):
        client = TestClient(build_app(encoder=table))
        response = client.post("/classify", json={"texts": ["x"]})
        assert response.status_code == 404
        assert "error" in response.json()


class TestEncode:
    def test_vectors_match_the_backend(self, client, table):
        texts = ["good bad", "good", "zzz"]
        response = client.post("/encode", json={"texts": texts})
        assert response.status_code == 200
        assert response.json() == {"vectors": table.encode(texts)}

    def test_404_when_no_encoder(self, model):
        client = TestClient(build_app(classifier=model))
        response = client.post("/encode", json={"texts": ["x"]})
        assert response.status_code == 404
        assert "error" in response.json()


class TestMalformedRequests:
    @pytest.mark.parametrize(
        "body",
        [
            "{not json",
            json.dumps([1, 2, 3]),
            json.dumps({"text": ["x"]}),
            json.dumps({"texts": "not a list"}),
            json.dumps({"texts": ["ok", 7]}),
            json.dumps({"texts": [None]}),
        ],
    )
    @pytest.mark.parametrize("path", ["/classify", "/encode"])
    def test_answers_400_with_an_error_body(self, client, path, body):
        response = client.post(path, content=body, headers={"content-type": "application/json"})
        assert response.status_code == 400
        payload = response.json()
        assert set(payload) == {"error"}
        assert payload["error"]

    def test_unknown_route_is_a_json_error(self, client):
        response = client.get("/nope")
        assert response.status_code == 404
        assert "error" in response.json()

    def test_wrong_verb_is_a_json_error(self, client):
        response = client.get("/classify")
        assert response.status_code == 405
        assert "error" in response.json()

    def test_backend_crash_answers_500_with_an_error_body(self):
        class Exploding:
            num_labels = 2
            label_names = ["a", "b"]

            def classify(self, texts):
                raise RuntimeError("kaboom")

        client = TestClient(build_app(classifier=Exploding()), raise_server_exceptions=False)
        response = client.post("/classify", json={"texts": ["x"]})
        assert response.status_code == 500
        assert "kaboom" in response.json()["error"]


class TestStatelessness:
    def test_interleaved_requests_do_not_disturb_each_other(self, client, model, table):
        first = client.post("/classify", json={"texts": ["good"]}).json()
        client.post("/encode", json={"texts": ["bad"]})
        client.post("/classify", json={"texts": ["bad bad bad"]})
        again = client.post("/classify", json={"texts": ["good"]}).json()
        assert first == again
        assert first == {"probabilities": model.classify(["good"])}
