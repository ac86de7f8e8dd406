"""Durable one-file-per-session storage with atomic writes."""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from .errors import FuzzydeckError
from .pipeline import Session


class SessionNotFound(FuzzydeckError):
    pass


class SessionStore:
    """Sessions as JSON documents under a root directory.

    Writes go to a temp file followed by an atomic rename, so a crash mid-write
    never leaves a half-written session. Each session also has a process-local
    lock so concurrent mutations serialize instead of interleaving.
    """

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        if not session_id.isalnum():
            raise SessionNotFound(f"invalid session id {session_id!r}")
        return self.root / f"{session_id}.json"

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def save(self, session: Session) -> None:
        path = self._path(session.id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(session.to_dict()), encoding="utf-8")
        os.replace(tmp, path)

    def load(self, session_id: str) -> Session:
        path = self._path(session_id)
        if not path.exists():
            raise SessionNotFound(f"session {session_id!r} not found")
        return Session.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))
