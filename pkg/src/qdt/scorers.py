"""Scorer implementations beyond the built-in alignment scorer.

External scorers speak a line-delimited JSON protocol over stdin/stdout::

    -> {"query": "what films [DES] featuring swift", "options": ["[DES] What films ...", ...]}
    <- {"scores": [0.1, 0.7, ...]}
"""
from __future__ import annotations

import json
import shlex
import subprocess
import threading
from typing import Sequence

from .core import SeqLike, TokenSeq
from .corruption import extract_branches
from .decipher import AlignScorer, CandidateOption, Query, Scorer, _check_scores
from .errors import ScorerFailure


class OracleScorer(Scorer):
    """Gives 1.0 to the option equal to the gold branch of the query's ordinal."""

    def __init__(self, gold: SeqLike):
        self.branches = extract_branches(TokenSeq.of(gold))

    def score(self, query: Query, options: Sequence[CandidateOption]) -> list[float]:
        target = self.branches[query.ordinal].rendered if query.ordinal < len(self.branches) else None
        return [1.0 if o.rendered == target else 0.0 for o in options]


class SubprocessScorer(Scorer):
    """Exclusive handle on an external scoring process; one request in flight at a time."""

    def __init__(self, command: str | Sequence[str], timeout: float | None = None):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._lock = threading.Lock()
        self._proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True,
            encoding="utf-8", bufsize=1,
        )

    def request(self, query: str, options: list[str]) -> list:
        line = json.dumps({"query": query, "options": options}, ensure_ascii=False)
        with self._lock:
            if self._proc.poll() is not None:
                raise ScorerFailure(f"scorer process exited with code {self._proc.returncode}")
            try:
                self._proc.stdin.write(line + "\n")
                self._proc.stdin.flush()
                reply = self._proc.stdout.readline()
            except (BrokenPipeError, OSError) as e:
                raise ScorerFailure(f"scorer pipe failed: {e}") from e
        if not reply:
            raise ScorerFailure("scorer closed its output")
        try:
            payload = json.loads(reply)
        except json.JSONDecodeError as e:
            raise ScorerFailure(f"malformed scorer response: {reply.strip()!r}") from e
        if not isinstance(payload, dict) or "scores" not in payload:
            raise ScorerFailure(f"response lacks 'scores': {reply.strip()!r}")
        return _check_scores(payload["scores"], len(options))

    def score(self, query, options):
        return self.request(str(query.tokens), [str(o.rendered) for o in options])

    def close(self):
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
                self._proc.wait()


def make_scorer(spec: str) -> Scorer:
    """``"align"`` or ``"exec:COMMAND"``."""
    if spec == "align":
        return AlignScorer()
    if spec.startswith("exec:") and spec[5:].strip():
        return SubprocessScorer(spec[5:])
    raise ValueError(f"unknown scorer {spec!r}; expected 'align' or 'exec:CMD'")
