"""Local annotation server: JSON API plus the embedded rating UI.

Annotations append to a JSONL file, flushed per write, so a crash or
restart never loses submitted ratings and multiple annotators' files can
be merged by concatenation. Re-rating a task wins over earlier records
(last-wins), leaving progress counts unchanged.

The UI bundle is served from the package's ``webui/`` directory when it
has been built; the API works without it.
"""

from __future__ import annotations

import json
import threading
import time
from collections import Counter
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources
from pathlib import Path
from typing import BinaryIO
from urllib.parse import parse_qs, urlsplit

from .model import AnnotationRecord, Task, read_task_file

DISPLAY_EXAMPLE_CAP = 10

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
}

_FALLBACK_PAGE = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>annotation server</title></head>
<body><h1>Annotation API is running</h1>
<p>The UI bundle is not installed. The JSON API is available under
<code>/api/tasks</code>, <code>/api/annotations</code> and
<code>/api/progress</code>.</p></body></html>
"""


class AnnotationStore:
    """Task list plus the append-only annotation log, with one writer."""

    def __init__(self, tasks: list[Task], annotations_path: Path, annotator: str):
        self.tasks = tasks
        self.by_id = {t.task_id: t for t in tasks}
        self.annotations_path = annotations_path
        self.annotator = annotator
        self._lock = threading.Lock()
        self._latest: dict[str, int] = {}
        self._fh: BinaryIO | None = None
        self._load_existing()

    def _load_existing(self) -> None:
        if not self.annotations_path.exists():
            return
        with open(self.annotations_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    record = AnnotationRecord.from_dict(json.loads(line))
                except (ValueError, KeyError, TypeError):
                    continue  # tolerate foreign lines; never crash on resume
                self._latest[record.task_id] = record.rating

    def open(self) -> None:
        self._fh = open(self.annotations_path, "ab")

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def submit(self, task_id: str, rating: int, notes: str | None) -> AnnotationRecord:
        if task_id not in self.by_id:
            raise KeyError(task_id)
        record = AnnotationRecord(
            task_id=task_id,
            rating=rating,  # validated by the dataclass: 0, 1 or 2
            annotator=self.annotator,
            timestamp=int(time.time()),
            notes=notes,
        )
        with self._lock:
            if self._fh is None:
                self.open()
            assert self._fh is not None
            payload = json.dumps(record.to_dict(), ensure_ascii=False)
            self._fh.write(payload.encode("utf-8") + b"\n")
            self._fh.flush()
            self._latest[record.task_id] = record.rating
        return record

    def annotated_count(self) -> int:
        with self._lock:
            return sum(1 for tid in self._latest if tid in self.by_id)

    def is_annotated(self, task_id: str) -> bool:
        with self._lock:
            return task_id in self._latest

    def by_rating(self) -> dict[str, int]:
        with self._lock:
            counts = Counter(
                rating for tid, rating in self._latest.items() if tid in self.by_id
            )
        return {"0": counts.get(0, 0), "1": counts.get(1, 0), "2": counts.get(2, 0)}

    def task_page(
        self, offset: int, limit: int, only_unannotated: bool
    ) -> list[dict]:
        pool = (
            [t for t in self.tasks if not self.is_annotated(t.task_id)]
            if only_unannotated
            else self.tasks
        )
        page = pool[offset : offset + limit]
        return [
            {
                "task_id": t.task_id,
                "website": t.website,
                "target_header": t.target_header,
                "examples": [
                    {"input": e.input, "output": e.output}
                    for e in t.examples[:DISPLAY_EXAMPLE_CAP]
                ],
                "example_count": len(t.examples),
                "annotated": self.is_annotated(t.task_id),
            }
            for t in page
        ]


def _webui_bytes(name: str) -> bytes | None:
    try:
        candidate = resources.files("tablefew").joinpath("webui", name)
        if candidate.is_file():
            return candidate.read_bytes()
    except (FileNotFoundError, ModuleNotFoundError, NotADirectoryError):
        pass
    return None


class _Handler(BaseHTTPRequestHandler):
    store: AnnotationStore  # assigned on the server class

    def log_message(self, fmt: str, *args) -> None:  # quiet by default
        pass

    def _send_json(self, payload: dict, status: int = 200) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, body: bytes, content_type: str, status: int = 200) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self) -> None:  # noqa: N802 (stdlib naming)
        url = urlsplit(self.path)
        if url.path == "/api/tasks":
            self._get_tasks(parse_qs(url.query))
        elif url.path == "/api/progress":
            store = self.store
            self._send_json(
                {
                    "total": len(store.tasks),
                    "annotated_count": store.annotated_count(),
                    "by_rating": store.by_rating(),
                }
            )
        elif url.path.startswith("/api/"):
            self._send_json({"error": "not found"}, status=404)
        else:
            self._get_static(url.path)

    def _get_tasks(self, query: dict[str, list[str]]) -> None:
        try:
            offset = int(query.get("offset", ["0"])[0])
            limit = int(query.get("limit", ["20"])[0])
        except ValueError:
            self._send_json({"error": "offset and limit must be integers"}, 422)
            return
        only_unannotated = query.get("only_unannotated", ["true"])[0] != "false"
        if offset < 0 or limit < 1:
            self._send_json({"error": "offset must be >= 0 and limit >= 1"}, 422)
            return
        store = self.store
        self._send_json(
            {
                "tasks": store.task_page(offset, limit, only_unannotated),
                "total": len(store.tasks),
                "annotated_count": store.annotated_count(),
            }
        )

    def _get_static(self, path: str) -> None:
        name = "index.html" if path in ("", "/") else path.lstrip("/")
        if "/" in name or name.startswith("."):
            self._send_bytes(b"not found", "text/plain", 404)
            return
        body = _webui_bytes(name)
        if body is None:
            if name == "index.html":
                self._send_bytes(_FALLBACK_PAGE, "text/html; charset=utf-8")
            else:
                self._send_bytes(b"not found", "text/plain", 404)
            return
        suffix = Path(name).suffix
        self._send_bytes(body, _CONTENT_TYPES.get(suffix, "application/octet-stream"))

    def do_POST(self) -> None:  # noqa: N802
        url = urlsplit(self.path)
        if url.path != "/api/annotations":
            self._send_json({"error": "not found"}, status=404)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            raw = json.loads(self.rfile.read(length) or b"{}")
        except (ValueError, json.JSONDecodeError):
            self._send_json({"error": "invalid JSON body"}, status=422)
            return
        task_id = raw.get("task_id")
        rating = raw.get("rating")
        notes = raw.get("notes")
        if not isinstance(task_id, str) or not task_id:
            self._send_json({"error": "task_id is required"}, status=422)
            return
        if not isinstance(rating, int) or isinstance(rating, bool) or rating not in (0, 1, 2):
            self._send_json({"error": "rating must be 0, 1 or 2"}, status=422)
            return
        try:
            self.store.submit(task_id, rating, notes)
        except KeyError:
            self._send_json({"error": f"unknown task_id {task_id!r}"}, status=404)
            return
        self._send_json({"ok": True})


class AnnotationServer:
    """Owns the HTTP server plus its store; usable from tests and the CLI."""

    def __init__(
        self,
        tasks_path: Path,
        annotations_path: Path,
        port: int,
        annotator: str = "anonymous",
    ):
        with open(tasks_path, "r", encoding="utf-8") as fh:
            tasks = list(read_task_file(fh))
        self.store = AnnotationStore(tasks, annotations_path, annotator)
        handler = type("BoundHandler", (_Handler,), {"store": self.store})
        self.httpd = ThreadingHTTPServer(("127.0.0.1", port), handler)

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def serve_forever(self) -> None:
        self.store.open()
        try:
            self.httpd.serve_forever()
        finally:
            self.store.close()

    def start_background(self) -> threading.Thread:
        self.store.open()
        thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        thread.start()
        return thread

    def shutdown(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        self.store.close()
