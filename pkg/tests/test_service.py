import json
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient

from parallelqa import datastore
from parallelqa.datastore import AnnotationStore
from parallelqa.service import create_app

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "schemas"


def load_schema(name):
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text(encoding="utf-8"))


@pytest.fixture()
def client(pilot_dataset, tmp_path):
    store = AnnotationStore(tmp_path / "store", pilot_dataset)
    app = create_app(store)
    with TestClient(app) as c:
        c.store = store
        yield c
    store.close()


def valid_annotation(pair, qa_id="svc-1", annotator="ann-1"):
    text = "Malawi" if "Malawi" in pair.passage_a.text else pair.passage_a.text.split()[0]
    start = pair.passage_a.text.find(text)
    return {
        "pair_id": pair.id,
        "qa": {
            "id": qa_id,
            "question": "Which country is discussed here?",
            "answers": [{"text": text, "passage_index": 0, "char_start": start}],
            "inference_type": "referential",
            "annotator_id": annotator,
        },
    }


class TestNextPair:
    def test_fresh_store_returns_a_pair(self, client):
        resp = client.get("/api/pairs/next", params={"annotator": "a1"})
        assert resp.status_code == 200
        body = resp.json()
        jsonschema.validate(body, load_schema("next_pair_response"))
        assert body["pair"]["id"]
        assert body["guidelines"]
        assert len(body["inference_types"]) == 8
        assert {t["name"] for t in body["inference_types"]} == set(datastore.INFERENCE_TYPES)

    def test_exhaustion_yields_204(self, client):
        for _ in range(3):
            assert client.get("/api/pairs/next", params={"annotator": "a1"}).status_code == 200
        assert client.get("/api/pairs/next", params={"annotator": "a1"}).status_code == 204

    def test_two_annotators_each_see_every_pair_once(self, client):
        seen = {"a1": [], "a2": []}
        for _ in range(3):
            for who in ("a1", "a2"):
                resp = client.get("/api/pairs/next", params={"annotator": who})
                assert resp.status_code == 200
                seen[who].append(resp.json()["pair"]["id"])
        for who, ids in seen.items():
            assert sorted(ids) == sorted(set(ids)), who
            assert len(ids) == 3
        assert client.get("/api/pairs/next", params={"annotator": "a1"}).status_code == 204
        assert client.get("/api/pairs/next", params={"annotator": "a2"}).status_code == 204

    def test_least_annotated_first(self, client, pilot_dataset):
        # Make one pair strictly less annotated than the others by adding
        # annotations to the two other pairs.
        ids = [p.id for p in pilot_dataset.pairs]
        for i, pid in enumerate(ids[1:], start=1):
            pair = client.store.get_pair(pid)
            body = valid_annotation(pair, qa_id=f"bal-{i}", annotator="seed")
            body["pair_id"] = pid
            body["qa"]["answers"][0]["text"] = pair.passage_a.text.split()[0]
            body["qa"]["answers"][0]["char_start"] = pair.passage_a.text.find(
                body["qa"]["answers"][0]["text"]
            )
            assert client.post("/api/annotations", json=body).status_code == 201
        resp = client.get("/api/pairs/next", params={"annotator": "fresh"})
        assert resp.json()["pair"]["id"] == ids[0]


class TestPostAnnotation:
    def test_valid_annotation_accepted(self, client, pilot_dataset):
        body = valid_annotation(pilot_dataset.pairs[0])
        resp = client.post("/api/annotations", json=body)
        assert resp.status_code == 201
        receipt = resp.json()
        jsonschema.validate(receipt, load_schema("annotation_receipt"))
        assert receipt["seq"] == 1

    def test_span_mismatch_422(self, client, pilot_dataset):
        body = valid_annotation(pilot_dataset.pairs[0])
        body["qa"]["answers"][0]["char_start"] += 1
        resp = client.post("/api/annotations", json=body)
        assert resp.status_code == 422
        violations = resp.json()["violations"]
        jsonschema.validate(resp.json(), load_schema("violations_response"))
        assert any("span mismatch" in v for v in violations)

    def test_missing_inference_type_422(self, client, pilot_dataset):
        body = valid_annotation(pilot_dataset.pairs[0])
        del body["qa"]["inference_type"]
        resp = client.post("/api/annotations", json=body)
        assert resp.status_code == 422
        assert "missing field inference_type" in resp.json()["violations"]

    def test_unknown_pair_404(self, client, pilot_dataset):
        body = valid_annotation(pilot_dataset.pairs[0])
        body["pair_id"] = "missing-pair"
        assert client.post("/api/annotations", json=body).status_code == 404

    def test_rejected_write_leaves_store_unchanged(self, client, pilot_dataset):
        before = client.store.num_qas()
        body = valid_annotation(pilot_dataset.pairs[0])
        body["qa"]["question"] = "no question mark"
        assert client.post("/api/annotations", json=body).status_code == 422
        assert client.store.num_qas() == before

    def test_annotation_completes_assignment(self, client, pilot_dataset):
        resp = client.get("/api/pairs/next", params={"annotator": "flow"})
        pair_id = resp.json()["pair"]["id"]
        pair = client.store.get_pair(pair_id)
        body = valid_annotation(pair, qa_id="flow-1", annotator="flow")
        body["pair_id"] = pair_id
        body["qa"]["answers"][0]["text"] = pair.passage_a.text.split()[0]
        body["qa"]["answers"][0]["char_start"] = pair.passage_a.text.find(
            body["qa"]["answers"][0]["text"]
        )
        assert client.post("/api/annotations", json=body).status_code == 201
        later = [
            client.get("/api/pairs/next", params={"annotator": "flow"}).json()["pair"]["id"]
            for _ in range(2)
        ]
        assert pair_id not in later


class TestExportAndReports:
    def test_export_round_trips(self, client, pilot_dataset, tmp_path):
        body = valid_annotation(pilot_dataset.pairs[0], qa_id="exp-1")
        assert client.post("/api/annotations", json=body).status_code == 201
        resp = client.get("/api/export")
        assert resp.status_code == 200
        path = tmp_path / "export.json"
        path.write_bytes(resp.content)
        ds = datastore.load_pqa(path)
        assert sum(len(p.qas) for p in ds.pairs) == 10
        assert datastore.validate_dataset(ds) == []

    def test_retrieval_report_schema(self, client):
        resp = client.get("/api/reports/retrieval", params={"metric": "jaccard"})
        assert resp.status_code == 200
        body = resp.json()
        jsonschema.validate(body, load_schema("retrieval_report"))
        assert body["total"] == 9

    def test_unknown_metric_422(self, client):
        assert (
            client.get("/api/reports/retrieval", params={"metric": "pagerank"}).status_code
            == 422
        )

    def test_eval_report(self, client, pilot_examples):
        preds = {it.qa_id: it.answers[0].text for it in pilot_examples.items}
        resp = client.post("/api/reports/eval", json={"predictions": preds})
        assert resp.status_code == 200
        body = resp.json()
        jsonschema.validate(body, load_schema("eval_report"))
        assert body["em"] == pytest.approx(100.0)

    def test_stats_report(self, client):
        resp = client.get("/api/reports/stats")
        assert resp.status_code == 200
        jsonschema.validate(resp.json(), load_schema("dataset_stats"))

    @pytest.mark.parametrize("metric", ["jaccard", "tfidf", "bm25"])
    def test_service_report_equals_cli_report_bytes(self, client, tmp_path, capsys, metric):
        from parallelqa.cli import main

        export = client.get("/api/export")
        dataset_path = tmp_path / "exported.json"
        dataset_path.write_bytes(export.content)

        service_body = client.get(
            "/api/reports/retrieval", params={"metric": metric}
        ).content
        assert main(["diagnose", "--dataset", str(dataset_path), "--metric", metric]) == 0
        cli_out = capsys.readouterr().out
        assert cli_out.encode("utf-8") == service_body + b"\n"

    def test_empty_store_409(self, tmp_path):
        empty = datastore.ParallelQADataset(version="pqa-1", pairs=())
        store = AnnotationStore(tmp_path / "empty", empty)
        with TestClient(create_app(store)) as c:
            assert c.get("/api/export").status_code == 409
            assert c.get("/api/reports/retrieval").status_code == 409
            assert c.post("/api/reports/eval", json={"predictions": {}}).status_code == 409
        store.close()


class TestSchemaFilesCurrent:
    def test_shipped_schemas_match_models(self):
        import sys

        sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "scripts"))
        import generate_schemas

        for name, model in generate_schemas.PUBLISHED.items():
            shipped = load_schema(name)
            assert shipped == model.model_json_schema(), name
