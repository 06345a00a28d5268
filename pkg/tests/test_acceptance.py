"""Acceptance gate: one test per release criterion. Run with
`pytest -v tests/test_acceptance.py` to get one pass/fail line each.
"""

import json
import math
import time

import numpy as np
import pytest
import torch
from fastapi.testclient import TestClient
from hypothesis import given, settings, strategies as st

from nbdoc.analysis import build_code_graph
from nbdoc.corpus import (
    PairOrigin,
    RESERVED,
    TrainingPair,
    Vocab,
    corpus_stats,
    split_corpus,
)
from nbdoc.kb import query_candidate
from nbdoc.notebook import (
    Cell,
    CellKind,
    NotebookDocument,
    Placement,
    insert_markdown,
    parse_notebook,
    serialize_notebook,
)
from nbdoc.prompts import prompt_candidate
from nbdoc.provenance import THETA_C, THETA_T, classify_provenance
from nbdoc.service import SuggestionService, build_app
from nbdoc.summarizer import (
    SummarizerModel,
    TrainingConfig,
    bleu_a,
    evaluate_bleu,
    greedy_decode,
    train,
)

from conftest import FIXTURES


def _code_cells(doc):
    return [c for c in doc.cells if c.kind is CellKind.CODE]


def test_query_column_golden_fixtures(kb, house_doc, covid_doc, candidate_goldens):
    """All 18 fixture cells reproduce the tabulated retrieval strings."""
    start = time.perf_counter()
    for name, doc in (("house", house_doc), ("covid", covid_doc)):
        cells = _code_cells(doc)
        assert len(cells) == 9
        for cell, golden in zip(cells, candidate_goldens[name]):
            assert query_candidate(kb, cell.source) == golden["query"]
    assert time.perf_counter() - start < 1.0


def test_prompt_column_golden_fixtures(house_doc, covid_doc, candidate_goldens):
    """All 18 fixture cells get the tabulated prompt text and placement."""
    for name, doc in (("house", house_doc), ("covid", covid_doc)):
        for cell, golden in zip(_code_cells(doc), candidate_goldens[name]):
            template = prompt_candidate(cell.outputs[0] if cell.outputs else None)
            assert template.text == golden["prompt"]
            assert template.placement.value == golden["placement"]


def test_provenance_calibration(calibration_rows):
    """Committed thresholds reproduce every tagged example (100%)."""
    assert (THETA_T, THETA_C) == (0.95, 0.26)
    disagreements = [
        row["cell"] for row in calibration_rows
        if classify_provenance(row["suggested"], row["final"]).value != row["label"]
    ]
    assert disagreements == []
    # the two pinned single examples
    assert classify_provenance(
        "Return the first 5 rows", "Return the first 5 rows. (defValue=5)").value == "C"
    assert classify_provenance("Model", "Fit regression model").value == "H"


def _gradient_vocabs():
    in_vocab = Vocab(RESERVED + tuple("abcdefgh") + (
        "module", "assign", "call", "attribute", "read", "csv", "pd", "df", "(", ")", "=", "."))
    out_vocab = Vocab(RESERVED + ("read", "the", "data", "fit"))
    return in_vocab, out_vocab


def test_gradient_check():
    """Analytic gradients match central finite differences on a d=8 model."""
    start = time.perf_counter()
    torch.manual_seed(0)
    in_vocab, out_vocab = _gradient_vocabs()
    model = SummarizerModel(in_vocab, out_vocab, d=8, hops=2).double()
    model.reset_parameters(seed=5)
    graph = build_code_graph("df = pd.read_csv('x.csv')")
    code_ids, ast_ids, edges = model.encode_graph(graph)
    prefix = [1, out_vocab.encode("read"), out_vocab.encode("the")]
    labels = torch.tensor([out_vocab.encode("read"), out_vocab.encode("the"), 2])

    def loss_value():
        logits = model.forward_ids(code_ids, ast_ids, edges, prefix)
        return torch.nn.functional.cross_entropy(logits, labels, reduction="sum")

    model.zero_grad()
    loss_value().backward()
    eps = 1e-4
    rng = np.random.default_rng(7)
    worst = 0.0
    for name, param in model.named_parameters():
        flat = param.detach().reshape(-1)
        grad = param.grad.reshape(-1)
        for index in rng.choice(len(flat), size=min(4, len(flat)), replace=False):
            original = float(flat[index])
            with torch.no_grad():
                flat[index] = original + eps
                plus = float(loss_value())
                flat[index] = original - eps
                minus = float(loss_value())
                flat[index] = original
            numeric = (plus - minus) / (2 * eps)
            analytic = float(grad[index])
            rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)
            worst = max(worst, rel)
            assert rel < 1e-3, f"{name}[{index}]: analytic {analytic} vs numeric {numeric}"
    assert time.perf_counter() - start < 30.0


OVERFIT_ROWS = [
    ("import pandas as pd\nimport numpy as np", "importing libraries"),
    ("df = pd.read_csv('train.csv')", "read the data"),
    ("df.head()", "show the first rows"),
    ("df.describe()", "summary statistics of the data"),
    ("df = df.fillna(0)", "fill missing values with zero"),
    ("df['age'] = df['age'].astype(int)", "convert age to integer"),
    ("X = df.drop('target', axis=1)", "create the feature matrix"),
    ("y = df['target']", "create the target vector"),
    ("X_train, X_test, y_train, y_test = train_test_split(X, y)", "split into train and test"),
    ("model = RandomForestClassifier()", "build the model"),
    ("model.fit(X_train, y_train)", "fit the model"),
    ("preds = model.predict(X_test)", "generate predictions"),
    ("score = accuracy_score(y_test, preds)", "compute the accuracy"),
    ("print(score)", "print the score"),
    ("df.isnull().sum()", "check the missing values"),
    ("df = pd.get_dummies(df)", "convert categorical variables"),
    ("corr = df.corr()", "compute correlations"),
    ("df['log_price'] = np.log1p(df['price'])", "log transform the price"),
    ("sub = pd.DataFrame({'id': ids, 'pred': preds})", "build the submission frame"),
    ("sub.to_csv('submission.csv', index=False)", "write the submission file"),
]


def test_overfit_oracle():
    """A d=32 model memorizes a 20-pair corpus within 500 epochs."""
    start = time.perf_counter()
    pairs = [TrainingPair(s, tuple(t.split()), "nb", i, PairOrigin.ADJACENT_MARKDOWN)
             for i, (s, t) in enumerate(OVERFIT_ROWS)]
    config = TrainingConfig(d=32, max_epochs=500, patience=500, seed=42, batch_size=30)
    model, report = train(pairs, pairs, config)
    assert report.epochs[-1].train_loss < 0.1
    exact = sum(
        tuple(greedy_decode(model, build_code_graph(p.source))) == p.target
        for p in pairs
    )
    assert exact >= 18
    assert evaluate_bleu(model, pairs) >= 90.0
    assert time.perf_counter() - start < 300.0


def test_split_determinism_and_ratio():
    """5,912 pairs split 4730/591/591, identically for a fixed seed."""
    pairs = [TrainingPair(f"x{i} = {i}", ("t", str(i)), "nb", i, PairOrigin.ADJACENT_MARKDOWN)
             for i in range(5912)]
    first = split_corpus(pairs, seed=1)
    second = split_corpus(pairs, seed=1)
    assert (len(first.train), len(first.valid), len(first.test)) == (4730, 591, 591)
    assert first == second


def test_bleu_hand_computed_golden_substitutes_corpus_metric():
    """Published corpus-level scores are unreproducible without the source
    corpus; the metric itself is pinned by a hand-computed golden case."""
    score = bleu_a([["the", "cat"]], [["the", "cat", "sat"]])
    assert abs(score - 100.0 * math.exp(-0.5)) < 1e-6
    corpus = [["read", "the", "data"]]
    assert bleu_a(corpus, corpus) == pytest.approx(100.0)


@pytest.mark.parametrize("name", [
    "house.ipynb", "covid.ipynb",
    "mini_corpus/alpha.ipynb", "mini_corpus/beta.ipynb", "mini_corpus/gamma.ipynb",
])
def test_notebook_round_trip(name):
    data = (FIXTURES / name).read_bytes()
    doc = parse_notebook(data)
    assert parse_notebook(serialize_notebook(doc)) == doc


@st.composite
def _documents(draw):
    n = draw(st.integers(min_value=1, max_value=10))
    kinds = draw(st.lists(st.sampled_from([CellKind.CODE, CellKind.MARKDOWN]),
                          min_size=n, max_size=n))
    return NotebookDocument(cells=tuple(
        Cell(id=f"cell-{i}", kind=k, source=f"s{i}") for i, k in enumerate(kinds)))


@settings(max_examples=1000, deadline=None)
@given(doc=_documents(), data=st.data())
def test_insert_markdown_position_over_randomized_documents(doc, data):
    code_ids = [c.id for c in doc.cells if c.kind is CellKind.CODE]
    if not code_ids:
        return
    anchor = data.draw(st.sampled_from(code_ids))
    placement = data.draw(st.sampled_from(list(Placement)))
    before = doc.cell_index(anchor)
    doc2 = insert_markdown(doc, anchor, "t", placement)
    inserted = before if placement is Placement.ABOVE else before + 1
    assert doc2.cells[inserted].kind is CellKind.MARKDOWN
    assert [c for i, c in enumerate(doc2.cells) if i != inserted] == list(doc.cells)


def test_service_contract_and_latency(kb, house_doc, candidate_goldens):
    """Fixture import cell returns candidates in dropdown order; warm-cache
    p50 latency under 200 ms."""
    client = TestClient(build_app(SuggestionService(kb), FIXTURES))
    import_cell = _code_cells(house_doc)[0]
    response = client.post("/api/suggest", json={"source": import_cell.source})
    assert response.status_code == 200
    body = response.json()
    kinds = [c["kind"] for c in body["candidates"]]
    assert kinds == [k for k in ("Deep", "Query", "Prompt") if k in kinds]
    by_kind = {c["kind"]: c for c in body["candidates"]}
    golden = candidate_goldens["house"][0]
    assert by_kind["Query"]["text"] == golden["query"]
    assert by_kind["Query"]["placement"] == "above"
    assert by_kind["Prompt"]["text"] == golden["prompt"]

    import statistics
    sources = [c.source for c in _code_cells(house_doc)]
    for source in sources:
        client.post("/api/suggest", json={"source": source})
    timings = []
    for _ in range(5):
        for source in sources:
            start = time.perf_counter()
            client.post("/api/suggest", json={"source": source})
            timings.append(time.perf_counter() - start)
    assert statistics.median(timings) < 0.2


def test_corpus_stats_snapshot():
    """Mini-corpus medians match the committed brute-force snapshot."""
    docs, names = [], []
    for name in ("alpha", "beta", "gamma"):
        docs.append(parse_notebook((FIXTURES / "mini_corpus" / f"{name}.ipynb").read_bytes()))
        names.append(f"{name}.ipynb")
    stats = corpus_stats(docs, names)
    snapshot = json.loads((FIXTURES / "stats_snapshot.json").read_text())
    assert stats.to_json() == snapshot
    assert set(stats.medians) == {"total_cells", "code_cells", "markdown_cells", "markdown_words"}
