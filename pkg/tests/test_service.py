import pytest
from fastapi.testclient import TestClient

from superchat.render import load_png
from superchat.service import ServiceRuntime, create_app


@pytest.fixture(scope="module")
def client(toy, toy_checkpoint):
    runtime = ServiceRuntime.build(toy_checkpoint, toy.vocab, toy.layout, toy.glyphs)
    return TestClient(create_app(runtime), raise_server_exceptions=False)


@pytest.fixture()
def empty_client():
    return TestClient(create_app(None), raise_server_exceptions=False)


def test_healthz_ok(client, toy_checkpoint):
    from superchat.checkpoint import checkpoint_fingerprint

    r = client.get("/healthz")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok"
    assert body["model_id"] == checkpoint_fingerprint(toy_checkpoint)


def test_healthz_without_model(empty_client):
    r = empty_client.get("/healthz")
    assert r.status_code == 503
    assert "error" in r.json()


def test_chat_memorized_with_trace(client, toy):
    pair = toy.filtered[0]
    r = client.post("/chat", json={"text": pair.input, "trace": True})
    assert r.status_code == 200
    body = r.json()
    assert body["response"] == pair.response
    steps = body["steps"]
    assert len(steps) == len(pair.response) + 1
    for i, step in enumerate(steps):
        assert step["position"] == i
        assert 0 < step["probability"] <= 1
        assert len(step["top5"]) >= 1
        probs = [alt["probability"] for alt in step["top5"]]
        assert probs == sorted(probs, reverse=True)
    assert steps[-1]["char"] == "<EOS>"


def test_chat_without_trace_has_no_steps(client, toy):
    r = client.post("/chat", json={"text": toy.filtered[0].input})
    assert r.status_code == 200
    assert "steps" not in r.json()


def test_chat_identical_requests_identical_responses(client, toy):
    payload = {"text": toy.filtered[3].input, "trace": True}
    a = client.post("/chat", json=payload)
    b = client.post("/chat", json=payload)
    assert a.json() == b.json()


def test_chat_beam_width(client, toy):
    pair = toy.filtered[0]
    r = client.post("/chat", json={"text": pair.input, "beam_width": 3, "trace": True})
    assert r.status_code == 200
    body = r.json()
    assert body["response"] == pair.response  # memorized model: beam agrees
    assert len(body["steps"]) == len(pair.response) + 1


def test_chat_malformed_json(client):
    r = client.post("/chat", content=b"{not json", headers={"content-type": "application/json"})
    assert r.status_code == 400
    assert "error" in r.json()


def test_chat_missing_text(client):
    r = client.post("/chat", json={"beam_width": 2})
    assert r.status_code == 400
    assert "text" in r.json()["error"]


def test_chat_empty_text(client):
    r = client.post("/chat", json={"text": "  \U0001F600 "})
    assert r.status_code == 400
    assert "empty" in r.json()["error"]


def test_chat_over_capacity(client):
    r = client.post("/chat", json={"text": "x" * 19})
    assert r.status_code == 400
    assert "capacity" in r.json()["error"]


def test_chat_bad_beam_width(client):
    r = client.post("/chat", json={"text": "你好", "beam_width": 0})
    assert r.status_code == 400
    r = client.post("/chat", json={"text": "你好", "beam_width": "two"})
    assert r.status_code == 400


def test_chat_without_model(empty_client):
    r = empty_client.post("/chat", json={"text": "你好"})
    assert r.status_code == 503


def test_render_png_and_determinism(client, toy):
    r1 = client.get("/render", params={"input": "你好", "partial": "你"})
    r2 = client.get("/render", params={"input": "你好", "partial": "你"})
    assert r1.status_code == 200
    assert r1.headers["content-type"] == "image/png"
    assert r1.content == r2.content
    import io

    arr = load_png(io.BytesIO(r1.content))
    assert arr.shape[0] == toy.layout.image_px


def test_render_matches_direct_export(client, toy):
    from superchat.render import png_bytes, render as render_image

    r = client.get("/render", params={"input": "早上好", "partial": ""})
    expected = png_bytes(render_image(toy.layout, toy.glyphs, "早上好", ""))
    assert r.content == expected


def test_render_capacity_violation(client):
    r = client.get("/render", params={"input": "x" * 19, "partial": ""})
    assert r.status_code == 400
    assert "error" in r.json()
    r = client.get("/render", params={"input": "ok", "partial": "y" * 19})
    assert r.status_code == 400


def test_cors_headers_present(client):
    r = client.get("/healthz", headers={"Origin": "http://localhost:5173"})
    assert r.headers.get("access-control-allow-origin") == "*"
