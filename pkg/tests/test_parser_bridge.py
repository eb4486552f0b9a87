import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from propsplit.parser_bridge import (
    ENV_CMD,
    ENV_URL,
    CountMismatch,
    EndpointUnreachable,
    ExternalParser,
    MalformedTree,
    load_trees,
    loads_trees,
    parse_external,
    resolve_endpoint,
)
from propsplit.ptb import PTBError, yield_text

STUB = r"""
import sys
for line in sys.stdin:
    words = line.split()
    if not words:
        continue
    if words[0] == "BROKEN":
        print("(ROOT (S (NN broken)")
        continue
    leaves = " ".join("(NN %s)" % w for w in words)
    print("(ROOT (S %s))" % leaves)
"""


@pytest.fixture
def stub(tmp_path):
    script = tmp_path / "stub_parser.py"
    script.write_text(STUB, encoding="utf-8")
    return f"{sys.executable} {script}"


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        trees = ["(ROOT (S " + " ".join(f"(NN {w})" for w in s.split()) + "))" for s in body["sentences"]]
        data = json.dumps({"trees": trees}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    httpd = HTTPServer(("127.0.0.1", 0), _Handler)
    t = threading.Thread(target=httpd.serve_forever, daemon=True)
    t.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}/parse"
    httpd.shutdown()
    httpd.server_close()


# ------------------------------------------------------------------ files
def test_loads_trees_multiline():
    text = "(ROOT (S (NN a)))\n\n(ROOT\n  (S (NN b)\n     (NN c)))\n"
    assert [yield_text(t) for t in loads_trees(text)] == ["a", "b c"]


def test_loads_trees_reports_line():
    with pytest.raises(PTBError) as exc:
        loads_trees("(ROOT (S (NN a)))\n(ROOT (S (NN b))\n")
    assert "line 2" in str(exc.value)


def test_load_trees_file(tmp_path):
    p = tmp_path / "t.ptb"
    p.write_text("(ROOT (S (NN a)))\n(ROOT (S (NN b)))\n", encoding="utf-8")
    assert len(load_trees(p)) == 2


# ---------------------------------------------------------------- process
def test_process_endpoint(stub):
    trees = parse_external(["hello world", "one"], stub)
    assert [t.tokens() for t in trees] == [["hello", "world"], ["one"]]


def test_process_malformed(stub):
    with pytest.raises(MalformedTree) as exc:
        parse_external(["fine", "BROKEN tree"], stub)
    assert exc.value.line == 2


def test_process_count_mismatch(stub):
    with pytest.raises(CountMismatch) as exc:
        parse_external(["a", "   "], stub)
    assert (exc.value.expected, exc.value.got) == (2, 1)


def test_unreachable_process(tmp_path):
    with pytest.raises(EndpointUnreachable):
        parse_external(["a"], str(tmp_path / "no-such-parser"))


def test_failing_process():
    with pytest.raises(EndpointUnreachable):
        parse_external(["a"], f"{sys.executable} -c 'import sys; sys.exit(3)'")


def test_no_endpoint():
    with pytest.raises(EndpointUnreachable):
        ExternalParser("")


# ------------------------------------------------------------------- http
def test_http_endpoint(server):
    trees = parse_external(["a b", "c"], server)
    assert [t.tokens() for t in trees] == [["a", "b"], ["c"]]


def test_unreachable_http():
    with pytest.raises(EndpointUnreachable):
        parse_external(["a"], "http://127.0.0.1:9/parse", timeout=2)


# ------------------------------------------------------------------ cache
def test_cache_avoids_second_invocation(stub, tmp_path):
    cache = tmp_path / "cache"
    p = ExternalParser(stub, cache)
    first = p.parse(["a b", "c"])
    assert p.invocations == 1
    second = p.parse(["c", "a b"])
    assert p.invocations == 1
    assert [t.tokens() for t in second] == [t.tokens() for t in reversed(first)]
    p.parse(["c", "new one"])
    assert p.invocations == 2
    assert len(list(cache.rglob("*.ptb"))) == 3


def test_cache_shared_between_instances(stub, tmp_path):
    ExternalParser(stub, tmp_path).parse(["x y"])
    again = ExternalParser(stub, tmp_path)
    again.parse(["x y"])
    assert again.invocations == 0


def test_corrupt_cache_entry_is_reparsed(stub, tmp_path):
    p = ExternalParser(stub, tmp_path)
    p.parse(["x"])
    for f in tmp_path.rglob("*.ptb"):
        f.write_text("(ROOT (", encoding="utf-8")
    q = ExternalParser(stub, tmp_path)
    assert q.parse(["x"])[0].tokens() == ["x"]
    assert q.invocations == 1


# ---------------------------------------------------------------- env vars
def test_resolve_endpoint(monkeypatch):
    monkeypatch.delenv(ENV_CMD, raising=False)
    monkeypatch.delenv(ENV_URL, raising=False)
    assert resolve_endpoint() is None
    monkeypatch.setenv(ENV_CMD, "parse-me")
    assert resolve_endpoint() == "parse-me"
    monkeypatch.setenv(ENV_URL, "http://x")
    assert resolve_endpoint() == "http://x"
    assert resolve_endpoint(cmd="mine") == "mine"
