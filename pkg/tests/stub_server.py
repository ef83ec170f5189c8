"""Scriptable chat-completion stub for exercising the remote selector."""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class StubBehavior:
    """One scripted response: reply with ``content``, optionally after a
    delay (to trigger client timeouts) or with an error status."""

    def __init__(self, content: str = "", delay: float = 0.0, status: int = 200):
        self.content = content
        self.delay = delay
        self.status = status


class ChatCompletionStub:
    """HTTP server answering chat-completion requests from a queue of
    behaviors; the last behavior repeats once the queue is exhausted."""

    def __init__(self, behaviors: list[StubBehavior]):
        self.behaviors = list(behaviors)
        self.requests: list[dict] = []
        self._lock = threading.Lock()
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length) or b"{}")
                with stub._lock:
                    stub.requests.append(payload)
                    behavior = (
                        stub.behaviors.pop(0) if len(stub.behaviors) > 1 else stub.behaviors[0]
                    )
                if behavior.delay:
                    time.sleep(behavior.delay)
                body = json.dumps(
                    {"choices": [{"message": {"role": "assistant", "content": behavior.content}}]}
                ).encode()
                try:
                    self.send_response(behavior.status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                except (BrokenPipeError, ConnectionResetError):
                    pass  # client gave up (timeout test)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def endpoint(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}/v1/chat/completions"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
