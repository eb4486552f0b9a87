"""Getting constituency trees: tree files or an external parser.

Two endpoint contracts are supported:

* process: a command that reads one sentence per line on stdin and
  writes one bracketed tree per line on stdout, in order;
* http: ``POST {"sentences": [...]}`` as JSON, answered with
  ``{"trees": [...]}``.

Parses can be cached in a directory keyed by the SHA-256 of the sentence.
"""

from __future__ import annotations

import hashlib
import json
import os
import shlex
import subprocess
import urllib.error
import urllib.request
from pathlib import Path
from typing import Optional, Sequence, Union

from .ptb import ParseTree, PTBError, parse_bracketed, serialize_bracketed, split_bracketed

__all__ = [
    "BridgeError",
    "EndpointUnreachable",
    "MalformedTree",
    "CountMismatch",
    "load_trees",
    "loads_trees",
    "ExternalParser",
    "parse_external",
    "resolve_endpoint",
    "ENV_CMD",
    "ENV_URL",
]

ENV_CMD = "PROPSPLIT_PARSER_CMD"
ENV_URL = "PROPSPLIT_PARSER_URL"
DEFAULT_TIMEOUT = 30.0


class BridgeError(RuntimeError):
    pass


class EndpointUnreachable(BridgeError):
    pass


class MalformedTree(BridgeError):
    def __init__(self, line: int, reason: str = ""):
        super().__init__(f"malformed tree on output line {line}" + (f": {reason}" if reason else ""))
        self.line = line


class CountMismatch(BridgeError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"parser returned {got} trees for {expected} sentences")
        self.expected = expected
        self.got = got


def loads_trees(text: str) -> list[ParseTree]:
    out = []
    for line, chunk in split_bracketed(text):
        try:
            out.append(parse_bracketed(chunk))
        except PTBError as exc:
            raise type(exc)(f"line {line}: {exc}") from None
    return out


def load_trees(path: Union[str, Path]) -> list[ParseTree]:
    """All trees in a bracketed file (one per line or pretty-printed)."""
    return loads_trees(Path(path).read_text(encoding="utf-8"))


def resolve_endpoint(cmd: Optional[str] = None, url: Optional[str] = None) -> Optional[str]:
    """Explicit flags first, then the environment variables."""
    return url or cmd or os.environ.get(ENV_URL) or os.environ.get(ENV_CMD) or None


def _is_url(endpoint: str) -> bool:
    return endpoint.startswith(("http://", "https://"))


class ExternalParser:
    """Callable wrapper around one endpoint with an optional disk cache.

    ``invocations`` counts calls that actually reached the endpoint.
    """

    def __init__(
        self,
        endpoint: str,
        cache_dir: Optional[Union[str, Path]] = None,
        timeout: float = DEFAULT_TIMEOUT,
    ):
        if not endpoint:
            raise EndpointUnreachable("no parser endpoint configured")
        self.endpoint = endpoint
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.timeout = timeout
        self.invocations = 0

    # cache ---------------------------------------------------------------
    def _key(self, sentence: str) -> Optional[Path]:
        if self.cache_dir is None:
            return None
        h = hashlib.sha256(sentence.encode("utf-8")).hexdigest()
        return self.cache_dir / h[:2] / f"{h}.ptb"

    def _cached(self, sentence: str) -> Optional[ParseTree]:
        path = self._key(sentence)
        if path is None or not path.is_file():
            return None
        try:
            return parse_bracketed(path.read_text(encoding="utf-8"))
        except PTBError:
            return None

    def _store(self, sentence: str, tree: ParseTree) -> None:
        path = self._key(sentence)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(serialize_bracketed(tree) + "\n", encoding="utf-8")
        os.replace(tmp, path)

    # endpoints -----------------------------------------------------------
    def _run_process(self, sentences: Sequence[str]) -> list[str]:
        body = "".join(s.replace("\n", " ") + "\n" for s in sentences)
        try:
            proc = subprocess.run(
                shlex.split(self.endpoint),
                input=body,
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise EndpointUnreachable(f"{self.endpoint}: {exc}") from None
        if proc.returncode != 0:
            raise EndpointUnreachable(f"{self.endpoint}: exit status {proc.returncode}: {proc.stderr.strip()}")
        return [ln for ln in proc.stdout.splitlines() if ln.strip()]

    def _run_http(self, sentences: Sequence[str]) -> list[str]:
        data = json.dumps({"sentences": list(sentences)}).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint, data=data, headers={"Content-Type": "application/json"}, method="POST"
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                doc = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError) as exc:
            raise EndpointUnreachable(f"{self.endpoint}: {exc}") from None
        except ValueError as exc:
            raise MalformedTree(0, f"response is not JSON: {exc}") from None
        trees = doc.get("trees") if isinstance(doc, dict) else None
        if not isinstance(trees, list):
            raise MalformedTree(0, "response has no 'trees' list")
        return [str(t) for t in trees]

    def parse(self, sentences: Sequence[str]) -> list[ParseTree]:
        out: list[Optional[ParseTree]] = [self._cached(s) for s in sentences]
        todo = [i for i, t in enumerate(out) if t is None]
        if todo:
            batch = [sentences[i] for i in todo]
            self.invocations += 1
            raw = self._run_http(batch) if _is_url(self.endpoint) else self._run_process(batch)
            if len(raw) != len(batch):
                raise CountMismatch(len(batch), len(raw))
            for line, (i, text) in enumerate(zip(todo, raw), 1):
                try:
                    tree = parse_bracketed(text)
                except PTBError as exc:
                    raise MalformedTree(line, str(exc)) from None
                out[i] = tree
                self._store(sentences[i], tree)
        return out  # type: ignore[return-value]


def parse_external(
    sentences: Sequence[str],
    endpoint: str,
    cache_dir: Optional[Union[str, Path]] = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> list[ParseTree]:
    """Parse ``sentences`` with an external parser; tree i is sentence i's."""
    return ExternalParser(endpoint, cache_dir, timeout).parse(sentences)
