import json
import threading
import urllib.error
import urllib.request

import pytest

from dedupcc.oracle import InteractiveOracle
from dedupcc.server import OracleHttpServer, record_payload

from conftest import make_dataset
from test_oracle import ask_in_thread, wait_for_pending


@pytest.fixture()
def live(tmp_path):
    """A dataset with ground truth, its interactive oracle, and a live server."""
    ds = make_dataset({"a": "g", "b": "g", "c": "h"},
                      text_of={x: f"text-{x}" for x in "abc"})
    oracle = InteractiveOracle(ds, timeout=5.0)
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<html>hello</html>")
    (ui / "app.js").write_text("console.log(1)")
    server = OracleHttpServer(oracle, ds, host="127.0.0.1", port=0, ui_dir=str(ui))
    server.start()
    yield ds, oracle, server
    oracle.close()
    server.stop()


def get(server, path):
    url = f"http://127.0.0.1:{server.port}{path}"
    try:
        with urllib.request.urlopen(url, timeout=5) as resp:
            body = resp.read()
            return resp.status, body
    except urllib.error.HTTPError as err:
        return err.code, err.read()


def post(server, path, payload):
    url = f"http://127.0.0.1:{server.port}{path}"
    data = json.dumps(payload).encode() if not isinstance(payload, bytes) else payload
    req = urllib.request.Request(url, data=data, method="POST",
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=5) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def test_record_payload_never_leaks_truth(live):
    ds, _, _ = live
    payload = record_payload(ds.require_id("a"))
    assert payload == {"id": "a", "text": "text-a", "features": None}
    assert "cluster" not in payload


def test_next_query_idle_and_pending(live):
    ds, oracle, server = live
    status, body = get(server, "/api/next-query")
    assert status == 204 and body == b""

    thread, slot = ask_in_thread(oracle, "b", "a")
    wait_for_pending(oracle)
    status, body = get(server, "/api/next-query")
    assert status == 200
    doc = json.loads(body)
    assert doc["pair"] == ["a", "b"]
    assert doc["left"]["id"] == "a" and doc["right"]["id"] == "b"
    assert "cluster" not in doc["left"] and "cluster" not in doc["right"]

    status, doc = post(server, "/api/answer", {"pair": ["a", "b"], "same": True})
    assert status == 200 and doc == {"ok": True, "answered": 1}
    thread.join(timeout=2)
    assert slot["bit"] == 1


def test_answer_stale_and_malformed(live):
    _, oracle, server = live
    status, doc = post(server, "/api/answer", {"pair": ["a", "b"], "same": True})
    assert status == 409 and doc["code"] == "stale-pair"

    thread, slot = ask_in_thread(oracle, "a", "c")
    wait_for_pending(oracle)
    status, doc = post(server, "/api/answer", {"pair": ["a", "b"], "same": True})
    assert status == 409 and doc["code"] == "stale-pair"
    for bad in [b"not json", b'{"pair": ["a"], "same": true}',
                b'{"pair": ["a", "c"], "same": "yes"}', b'{"same": true}']:
        status, doc = post(server, "/api/answer", bad)
        assert status == 400 and doc["code"] == "schema"
    # the query is still live after all the rejected posts
    status, doc = post(server, "/api/answer", {"pair": ["a", "c"], "same": False})
    assert status == 200
    thread.join(timeout=2)
    assert slot["bit"] == 0


def test_stats_endpoint(live):
    _, oracle, server = live
    status, body = get(server, "/api/stats")
    assert status == 200 and json.loads(body) == {"answered": 0, "pending": 0}
    thread, _ = ask_in_thread(oracle, "a", "b")
    wait_for_pending(oracle)
    assert json.loads(get(server, "/api/stats")[1]) == {"answered": 0, "pending": 1}
    post(server, "/api/answer", {"pair": ["a", "b"], "same": True})
    thread.join(timeout=2)
    assert json.loads(get(server, "/api/stats")[1]) == {"answered": 1, "pending": 0}


def test_unknown_api_routes(live):
    _, _, server = live
    assert get(server, "/api/bogus")[0] == 404
    assert post(server, "/api/bogus", {})[0] == 404


def test_static_serving_and_traversal_guard(live):
    _, _, server = live
    status, body = get(server, "/")
    assert status == 200 and b"hello" in body
    status, body = get(server, "/index.html")
    assert status == 200 and b"hello" in body
    status, _ = get(server, "/app.js")
    assert status == 200
    assert get(server, "/missing.css")[0] == 404
    assert get(server, "/../secret.txt")[0] == 404
    assert get(server, "/%2e%2e/secret.txt")[0] == 404


def test_no_ui_dir_configured():
    ds = make_dataset({"a": "g", "b": "g"})
    oracle = InteractiveOracle(ds, timeout=1.0)
    server = OracleHttpServer(oracle, ds, host="127.0.0.1", port=0)
    server.start()
    try:
        assert get(server, "/")[0] == 404
    finally:
        oracle.close()
        server.stop()
