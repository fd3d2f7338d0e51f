"""Property providers, evaluation cache and budget accounting.

All external chemistry lives behind a provider.  The harness speaks a
line-delimited wire protocol to subprocess providers (one UTF-8 JSON object
per line), caches every result keyed by canonical structure + request
fingerprint in an append-only store, and charges the evaluation budget once
per proposal whether the result came from the cache or not (duplicate
proposals still count; a flag switches to unique-only accounting).

Wire protocol, version 1:

* handshake (child -> parent, first line): ``{"protocol": 1, "props": [...]}``
* request:  ``{"id": str, "smiles": str, "props": [str, ...]}``
* response: ``{"id": str, "status": "ok"|"error",
  "values": {name: {"v": number, "u": unit}}, "error": str?}``
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

from .catalog import PROPERTY_UNITS
from .molgraph import canonical_key, parse_smiles

PROVIDER_CMD_ENV = "TARTARUS_PROVIDER_CMD"
CACHE_DIR_ENV = "TARTARUS_CACHE_DIR"

STATUS_OK = "ok"
STATUS_CONSTRAINT_FAIL = "constraint_fail"
STATUS_PROVIDER_ERROR = "provider_error"
STATUS_TIMEOUT = "timeout"


class HandshakeFailedError(RuntimeError):
    pass


class ProviderCrashedError(RuntimeError):
    pass


@dataclass(frozen=True)
class PropertyRequest:
    request_id: str
    smiles: str
    properties: tuple[str, ...]

    def __post_init__(self):
        for name in self.properties:
            if name not in PROPERTY_UNITS:
                raise KeyError(f"unknown property {name!r}")


@dataclass(frozen=True)
class EvaluationRecord:
    canonical_key: str
    request_fingerprint: str
    values: dict[str, tuple[float, str]]
    status: str
    wall_seconds: float

    def ok(self) -> bool:
        return self.status == STATUS_OK


@dataclass
class Budget:
    """Proposal/time budget; enforcement is atomic under concurrency."""

    max_proposals: int = 5_000
    max_wall_seconds: float = 86_400.0
    consumed_proposals: int = 0
    started_at: float = field(default_factory=time.monotonic)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def try_consume(self, n: int = 1) -> bool:
        with self._lock:
            if self.consumed_proposals + n > self.max_proposals:
                return False
            if time.monotonic() - self.started_at > self.max_wall_seconds:
                return False
            self.consumed_proposals += n
            return True

    def force_consume(self, n: int = 1) -> None:
        with self._lock:
            self.consumed_proposals += n

    @property
    def exhausted(self) -> bool:
        with self._lock:
            return (
                self.consumed_proposals >= self.max_proposals
                or time.monotonic() - self.started_at > self.max_wall_seconds
            )

    @property
    def remaining(self) -> int:
        with self._lock:
            return self.max_proposals - self.consumed_proposals


@dataclass
class BatchResult:
    records: list[EvaluationRecord]
    exhausted: bool = False
    unprocessed: list[PropertyRequest] = field(default_factory=list)


def request_fingerprint(properties: Sequence[str]) -> str:
    return ",".join(sorted(set(properties)))


class Provider:
    """Base interface: fetch returns (status, values, error_message)."""

    property_names: tuple[str, ...] = ()

    def fetch(self, smiles: str, properties: Sequence[str]):
        raise NotImplementedError

    def close(self) -> None:
        pass


class NullProvider(Provider):
    """Deterministic in-process provider for tests and desk benchmarks.

    ``fixtures`` maps a SMILES (any atom order) to {property: value};
    unknown molecules receive ``defaults``.
    """

    def __init__(
        self,
        fixtures: Optional[Mapping[str, Mapping[str, float]]] = None,
        defaults: Optional[Mapping[str, float]] = None,
    ):
        self.defaults = dict(defaults or {})
        self.by_key: dict[str, dict[str, float]] = {}
        for smiles, values in (fixtures or {}).items():
            key = canonical_key(parse_smiles(smiles))
            self.by_key.setdefault(key, {}).update(values)
        names = set(self.defaults)
        for values in self.by_key.values():
            names |= set(values)
        self.property_names = tuple(sorted(names)) or tuple(sorted(PROPERTY_UNITS))

    def fetch(self, smiles: str, properties: Sequence[str]):
        start = time.perf_counter()
        try:
            key = canonical_key(parse_smiles(smiles))
        except ValueError as exc:
            return STATUS_PROVIDER_ERROR, {}, f"unparseable SMILES: {exc}"
        table = self.by_key.get(key, {})
        values = {}
        for name in properties:
            if name in table:
                value = table[name]
            elif name in self.defaults:
                value = self.defaults[name]
            else:
                return STATUS_PROVIDER_ERROR, {}, f"no fixture for {name}"
            values[name] = (float(value), PROPERTY_UNITS[name])
        wall = max(time.perf_counter() - start, 1e-9)
        return STATUS_OK, values, None

    def fetch_with_wall(self, smiles, properties):  # pragma: no cover - helper
        return self.fetch(smiles, properties)


class CallableProvider(Provider):
    """Adapter around ``fn(smiles, properties) -> {name: value}``."""

    def __init__(self, fn: Callable[[str, Sequence[str]], Mapping[str, float]]):
        self.fn = fn
        self.property_names = tuple(sorted(PROPERTY_UNITS))

    def fetch(self, smiles: str, properties: Sequence[str]):
        try:
            raw = self.fn(smiles, properties)
        except Exception as exc:
            return STATUS_PROVIDER_ERROR, {}, str(exc)
        values = {
            name: (float(raw[name]), PROPERTY_UNITS[name]) for name in properties if name in raw
        }
        if len(values) != len(properties):
            missing = [p for p in properties if p not in raw]
            return STATUS_PROVIDER_ERROR, {}, f"missing properties {missing}"
        return STATUS_OK, values, None


class SubprocessProvider(Provider):
    """Child process speaking the line-delimited protocol on stdio."""

    def __init__(
        self,
        command: str,
        timeout_s: float = 600.0,
        per_property_timeouts: Optional[Mapping[str, float]] = None,
        max_restarts: int = 2,
    ):
        self.command = command
        self.timeout_s = timeout_s
        self.per_property_timeouts = dict(per_property_timeouts or {})
        self.max_restarts = max_restarts
        self._restarts = 0
        self._lock = threading.Lock()
        self._proc: Optional[subprocess.Popen] = None
        self._counter = 0
        self._start()

    def _start(self) -> None:
        import queue

        self._proc = subprocess.Popen(
            shlex.split(self.command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        # One long-lived reader per child: timed-out requests must not lose
        # later responses, so every stdout line lands in the queue.
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        proc = self._proc
        lines = self._lines

        def pump():
            for line in proc.stdout:
                lines.put(line)
            lines.put(None)  # EOF marker

        threading.Thread(target=pump, daemon=True).start()

        line = self._read_line(self.timeout_s)
        if line is None:
            raise HandshakeFailedError("no handshake line from provider")
        try:
            handshake = json.loads(line)
        except json.JSONDecodeError as exc:
            raise HandshakeFailedError(f"bad handshake: {exc}") from None
        if not isinstance(handshake, dict) or handshake.get("protocol") != 1 or "props" not in handshake:
            raise HandshakeFailedError(f"unsupported handshake {handshake!r}")
        self.property_names = tuple(handshake["props"])

    def _read_line(self, timeout: float) -> Optional[str]:
        import queue

        try:
            line = self._lines.get(timeout=max(timeout, 0.0))
        except queue.Empty:
            return None
        return line if line else None

    def _timeout_for(self, properties: Sequence[str]) -> float:
        timeouts = [self.per_property_timeouts.get(p, self.timeout_s) for p in properties]
        return max(timeouts) if timeouts else self.timeout_s

    def fetch(self, smiles: str, properties: Sequence[str]):
        with self._lock:
            return self._fetch_locked(smiles, properties)

    def _fetch_locked(self, smiles, properties):
        self._counter += 1
        request_id = f"q{self._counter}"
        payload = json.dumps(
            {"id": request_id, "smiles": smiles, "props": list(properties)}
        )
        timeout = self._timeout_for(properties)
        deadline = time.monotonic() + timeout
        try:
            self._proc.stdin.write(payload + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            if not self._restart():
                return STATUS_PROVIDER_ERROR, {}, "provider crashed (restart limit hit)"
            return self._fetch_locked(smiles, properties)

        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return STATUS_TIMEOUT, {}, f"no response within {timeout}s"
            line = self._read_line(remaining)
            if line is None:
                if self._proc.poll() is not None:
                    if not self._restart():
                        return STATUS_PROVIDER_ERROR, {}, "provider crashed"
                    return STATUS_PROVIDER_ERROR, {}, "provider crashed mid-request"
                return STATUS_TIMEOUT, {}, f"no response within {timeout}s"
            try:
                response = json.loads(line)
            except json.JSONDecodeError:
                return STATUS_PROVIDER_ERROR, {}, f"undecodable response line {line!r}"
            if response.get("id") != request_id:
                continue  # stale response from a previous timeout
            return self._parse_response(response, properties)

    def _parse_response(self, response, properties):
        if response.get("status") != "ok":
            return STATUS_PROVIDER_ERROR, {}, response.get("error", "provider error")
        raw = response.get("values", {})
        values = {}
        for name in properties:
            if name not in raw:
                return STATUS_PROVIDER_ERROR, {}, f"response missing {name}"
            entry = raw[name]
            unit = entry.get("u")
            if unit != PROPERTY_UNITS[name]:
                return (
                    STATUS_PROVIDER_ERROR,
                    {},
                    f"unit mismatch for {name}: got {unit!r}, want {PROPERTY_UNITS[name]!r}",
                )
            values[name] = (float(entry["v"]), unit)
        return STATUS_OK, values, None

    def _restart(self) -> bool:
        if self._restarts >= self.max_restarts:
            return False
        self._restarts += 1
        try:
            self._proc.kill()
        except Exception:
            pass
        self._start()
        return True

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()


def provider_from_env(default: Optional[Provider] = None) -> Optional[Provider]:
    """Provider named by TARTARUS_PROVIDER_CMD, else ``default``."""
    command = os.environ.get(PROVIDER_CMD_ENV)
    if command:
        return SubprocessProvider(command)
    return default


class Evaluator:
    """Cache-first, budget-charging dispatcher in front of one provider.

    The persistent store is an append-only line-delimited file with a
    monotone sequence number; a corrupt tail is truncated on load.  Replaying
    the store restores both the cache and the consumed-budget count.
    """

    def __init__(
        self,
        provider: Provider,
        budget: Budget,
        store_path: Optional[str | Path] = None,
        workers: int = 1,
        count_duplicates: bool = True,
        resume_budget: bool = False,
    ):
        self.provider = provider
        self.budget = budget
        self.workers = max(1, workers)
        self.count_duplicates = count_duplicates
        self._lock = threading.Lock()
        self._cache: dict[tuple[str, str], EvaluationRecord] = {}
        self._seq = 0
        self._store_fh = None
        if store_path is not None:
            path = Path(store_path)
            replayed = self._replay(path)
            if resume_budget and replayed:
                self.budget.force_consume(replayed)
            self._store_fh = open(path, "a")

    # -- persistence ---------------------------------------------------

    def _replay(self, path: Path) -> int:
        if not path.exists():
            return 0
        valid: list[str] = []
        replayed = 0
        with open(path) as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    payload = json.loads(line)
                    record = EvaluationRecord(
                        canonical_key=payload["key"],
                        request_fingerprint=payload["fp"],
                        values={
                            k: (v[0], v[1]) for k, v in payload["values"].items()
                        },
                        status=payload["status"],
                        wall_seconds=payload["wall"],
                    )
                    seq = payload["seq"]
                except (json.JSONDecodeError, KeyError, IndexError, TypeError):
                    break  # truncate at first corrupt line
                valid.append(line)
                self._seq = seq
                replayed += 1
                self._cache.setdefault(
                    (record.canonical_key, record.request_fingerprint), record
                )
        with open(path) as fh:
            existing = [l for l in fh.read().splitlines() if l]
        if len(existing) != len(valid):
            path.write_text("".join(line + "\n" for line in valid))
        return replayed

    def _append(self, record: EvaluationRecord) -> None:
        if self._store_fh is None:
            return
        self._seq += 1
        payload = {
            "seq": self._seq,
            "key": record.canonical_key,
            "fp": record.request_fingerprint,
            "values": {k: [v[0], v[1]] for k, v in record.values.items()},
            "status": record.status,
            "wall": record.wall_seconds,
        }
        self._store_fh.write(json.dumps(payload, sort_keys=True) + "\n")
        self._store_fh.flush()

    # -- evaluation ----------------------------------------------------

    def evaluate(self, batch: Sequence[PropertyRequest]) -> BatchResult:
        """Evaluate proposals in order until the budget runs out."""
        admitted: list[PropertyRequest] = []
        keys: list[tuple[str, str]] = []
        exhausted = False
        unprocessed: list[PropertyRequest] = []
        seen_in_batch: set[tuple[str, str]] = set()
        for idx, request in enumerate(batch):
            try:
                key = canonical_key(parse_smiles(request.smiles))
            except ValueError:
                key = f"!invalid:{request.smiles}"
            fingerprint = request_fingerprint(request.properties)
            cache_key = (key, fingerprint)
            with self._lock:
                is_hit = cache_key in self._cache or cache_key in seen_in_batch
            charge = self.count_duplicates or not is_hit
            if charge and not self.budget.try_consume():
                exhausted = True
                unprocessed = list(batch[idx:])
                break
            seen_in_batch.add(cache_key)
            admitted.append(request)
            keys.append(cache_key)

        def run(i: int) -> EvaluationRecord:
            request = admitted[i]
            key, fingerprint = keys[i]
            if key.startswith("!invalid:"):
                return EvaluationRecord(key, fingerprint, {}, STATUS_PROVIDER_ERROR, 0.0)
            start = time.perf_counter()
            try:
                status, values, _error = self.provider.fetch(
                    request.smiles, request.properties
                )
            except Exception:
                status, values = STATUS_PROVIDER_ERROR, {}
            wall = max(time.perf_counter() - start, 1e-9)
            return EvaluationRecord(key, fingerprint, dict(values), status, wall)

        # One provider call per distinct cache key; results shared by every
        # proposal so one store never holds two disagreeing records.
        miss_owner: dict[tuple[str, str], int] = {}
        for i, cache_key in enumerate(keys):
            with self._lock:
                cached = cache_key in self._cache
            if not cached and cache_key not in miss_owner:
                miss_owner[cache_key] = i
        owners = sorted(miss_owner.values())
        if owners:
            if self.workers > 1 and len(owners) > 1:
                import concurrent.futures

                with concurrent.futures.ThreadPoolExecutor(self.workers) as pool:
                    fetched = list(pool.map(run, owners))
            else:
                fetched = [run(i) for i in owners]
            with self._lock:
                for record in fetched:
                    self._cache.setdefault(
                        (record.canonical_key, record.request_fingerprint), record
                    )

        records: list[EvaluationRecord] = []
        with self._lock:
            for i, cache_key in enumerate(keys):
                base = self._cache[cache_key]
                wall = base.wall_seconds if miss_owner.get(cache_key) == i else 0.0
                records.append(
                    EvaluationRecord(
                        canonical_key=base.canonical_key,
                        request_fingerprint=base.request_fingerprint,
                        values=base.values,
                        status=base.status,
                        wall_seconds=wall,
                    )
                )
            for record in records:
                self._append(record)
        return BatchResult(records=records, exhausted=exhausted, unprocessed=unprocessed)

    def evaluate_one(self, smiles: str, properties: Sequence[str]) -> BatchResult:
        return self.evaluate(
            [PropertyRequest(request_id="r0", smiles=smiles, properties=tuple(properties))]
        )

    def close(self) -> None:
        if self._store_fh is not None:
            self._store_fh.close()
            self._store_fh = None
