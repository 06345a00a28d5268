import json
import statistics
import time

import pytest
from fastapi.testclient import TestClient

from nbdoc.notebook import CellKind, CellOutput, OutputKind, parse_notebook
from nbdoc.service import (
    BadConfig,
    CandidateKind,
    ServiceConfig,
    SuggestionService,
    build_app,
    load_config,
)

from conftest import FIXTURES

IMPORT_CELL = "import pandas as pd\nimport numpy as np\nfrom sklearn.linear_model import LassoCV"


@pytest.fixture()
def service(kb):
    return SuggestionService(kb)


@pytest.fixture()
def client(service, tmp_path):
    for name in ("house.ipynb", "covid.ipynb"):
        (tmp_path / name).write_bytes((FIXTURES / name).read_bytes())
    return TestClient(build_app(service, tmp_path))


class TestSuggest:
    def test_order_and_kinds_unique(self, service):
        candidates, _ = service.suggest("df = pd.read_csv('x.csv')")
        kinds = [c.kind for c in candidates]
        assert kinds == sorted(kinds, key=[CandidateKind.DEEP, CandidateKind.QUERY,
                                           CandidateKind.PROMPT].index)
        assert len(set(kinds)) == len(kinds)
        assert 1 <= len(candidates) <= 3

    def test_no_model_warns_and_omits_deep(self, service):
        candidates, warnings = service.suggest(IMPORT_CELL)
        assert all(c.kind is not CandidateKind.DEEP for c in candidates)
        assert any("model" in w for w in warnings)

    def test_no_kb_hit_omits_query(self, service):
        candidates, _ = service.suggest("z = my_custom_fn(q)")
        assert [c.kind for c in candidates] == [CandidateKind.PROMPT]

    def test_empty_source_prompt_only(self, service):
        candidates, _ = service.suggest("")
        assert [c.kind for c in candidates] == [CandidateKind.PROMPT]

    def test_prompt_placement_follows_output(self, service):
        below, _ = service.suggest("df.head()", CellOutput(OutputKind.TABLE))
        assert below[-1].placement.value == "below"
        above, _ = service.suggest("df.head()", None)
        assert above[-1].placement.value == "above"

    def test_deterministic_and_cached(self, service):
        first, _ = service.suggest(IMPORT_CELL)
        second, _ = service.suggest(IMPORT_CELL)
        assert first == second


class TestHttpContract:
    def test_health(self, client):
        response = client.get("/api/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok", "model_loaded": False}

    def test_suggest_import_cell_matches_goldens(self, client, candidate_goldens):
        response = client.post("/api/suggest", json={"source": IMPORT_CELL})
        assert response.status_code == 200
        body = response.json()
        golden = candidate_goldens["house"][0]
        by_kind = {c["kind"]: c for c in body["candidates"]}
        assert by_kind["Query"]["text"] == golden["query"]
        assert by_kind["Prompt"]["text"] == golden["prompt"]
        assert by_kind["Prompt"]["placement"] == golden["placement"]
        for candidate in body["candidates"]:
            assert set(candidate) == {"kind", "text", "placement", "category"}

    def test_suggest_output_kind_field(self, client):
        response = client.post(
            "/api/suggest", json={"source": "df.head()", "output_kind": "table"})
        prompt = [c for c in response.json()["candidates"] if c["kind"] == "Prompt"][0]
        assert prompt["text"] == "The table shows _ _ _ _ _"
        assert prompt["placement"] == "below"

    def test_suggest_missing_source_is_400(self, client):
        assert client.post("/api/suggest", json={}).status_code == 400

    def test_get_notebook(self, client):
        response = client.get("/api/notebook", params={"path": "house.ipynb"})
        assert response.status_code == 200
        assert len(json.loads(response.content)["cells"]) == 9

    def test_get_missing_notebook_404(self, client):
        assert client.get("/api/notebook", params={"path": "nope.ipynb"}).status_code == 404

    def test_path_escape_rejected(self, client):
        response = client.get("/api/notebook", params={"path": "../secret.ipynb"})
        assert response.status_code == 400

    def test_put_round_trip(self, client, tmp_path):
        data = (FIXTURES / "house.ipynb").read_bytes()
        response = client.put("/api/notebook?path=copy.ipynb", content=data)
        assert response.status_code == 200 and response.json() == {"ok": True}
        again = client.get("/api/notebook", params={"path": "copy.ipynb"})
        assert parse_notebook(again.content) == parse_notebook(data)

    def test_put_invalid_json_400(self, client):
        response = client.put("/api/notebook?path=bad.ipynb", content=b"{broken")
        assert response.status_code == 400
        assert "MalformedNotebook" in response.json()["error"]

    def test_feedback_t_c_h(self, client):
        def tag(suggested, final):
            response = client.post("/api/feedback", json={
                "cell_id": "c", "suggestion_kind": "Query",
                "suggested_text": suggested, "final_text": final,
            })
            assert response.status_code == 200
            return response.json()

        assert tag("Importing libraries", "Importing libraries")["provenance"] == "T"
        assert tag("Return the first 5 rows",
                   "Return the first 5 rows. (defValue=5)")["provenance"] == "C"
        assert tag("", "My own words entirely")["provenance"] == "H"

    def test_warm_cache_latency(self, client, house_doc):
        sources = [c.source for c in house_doc.cells if c.kind is CellKind.CODE]
        for source in sources:  # warm
            client.post("/api/suggest", json={"source": source})
        timings = []
        for _ in range(5):
            for source in sources:
                start = time.perf_counter()
                client.post("/api/suggest", json={"source": source})
                timings.append(time.perf_counter() - start)
        assert statistics.median(timings) < 0.2


class TestConfig:
    def test_json_config(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"notebook_root": "nb", "kb_path": "kb.jsonl", "port": 9001}))
        config = load_config(path)
        assert config == ServiceConfig("nb", None, "kb.jsonl", 9001)

    def test_toml_config(self, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text('notebook_root = "nb"\nkb_path = "kb.jsonl"\nport = 9001\n')
        assert load_config(path).port == 9001

    def test_env_port_override(self, tmp_path, monkeypatch):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"port": 9001}))
        monkeypatch.setenv("THEMISTO_PORT", "9100")
        assert load_config(path).port == 9100

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"bogus": 1}))
        with pytest.raises(BadConfig):
            load_config(path)
