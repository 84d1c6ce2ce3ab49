"""Append-only event log with pluggable storage backends.

Every state change in the campaign engine is one event; replaying the log
rebuilds the engine deterministically. Backends share a narrow interface:
single-writer append, gapless sequence numbers, forward iteration.

The file backend frames each record as

    [4-byte big-endian length][UTF-8 JSON payload][4-byte CRC32 of payload]

so truncation or bit rot is caught at the exact record during replay. The
SQL backend keeps the same records in one table and works against any
SQLAlchemy DSN (sqlite for desk runs, PostgreSQL in deployment).
"""

from __future__ import annotations

import json
import struct
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import CorruptEvent, StorageFull

EVENT_KINDS = frozenset(
    {
        "campaign_created",
        "campaign_updated",
        "opened",
        "tag_assigned",
        "subscribed",
        "ballot_submitted",
        "ballot_revised",
        "closed",
        "tallied",
        "released",
        "feedback",
    }
)


@dataclass(frozen=True)
class EventRecord:
    seq: int
    kind: str
    payload: dict
    recorded_at: str  # ISO-8601 UTC

    def to_doc(self) -> dict:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "payload": self.payload,
            "recorded_at": self.recorded_at,
        }


class EventStore:
    """Interface: append-only, gapless, forward-iterable event storage."""

    def append(self, kind: str, payload: dict, recorded_at: str) -> EventRecord:
        raise NotImplementedError

    def events(self, from_seq: int = 1) -> Iterator[EventRecord]:
        raise NotImplementedError

    @property
    def last_seq(self) -> int:
        raise NotImplementedError

    def close(self) -> None:
        pass

    def _check_kind(self, kind: str) -> None:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")


class MemoryEventStore(EventStore):
    """In-process store for tests and throwaway runs."""

    def __init__(self):
        self._events: list[EventRecord] = []
        self._lock = threading.Lock()

    def append(self, kind: str, payload: dict, recorded_at: str) -> EventRecord:
        self._check_kind(kind)
        with self._lock:
            rec = EventRecord(len(self._events) + 1, kind, payload, recorded_at)
            self._events.append(rec)
            return rec

    def events(self, from_seq: int = 1) -> Iterator[EventRecord]:
        with self._lock:
            snapshot = list(self._events)
        yield from snapshot[from_seq - 1 :]

    @property
    def last_seq(self) -> int:
        return len(self._events)


class FileEventStore(EventStore):
    """Length-prefixed, CRC32-checked log in a single file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._last_seq = 0
        if self.path.exists():
            for _ in self.events():
                pass  # validates the log and advances _last_seq
        else:
            self.path.touch()
        self._fh = open(self.path, "ab")

    def append(self, kind: str, payload: dict, recorded_at: str) -> EventRecord:
        self._check_kind(kind)
        with self._lock:
            rec = EventRecord(self._last_seq + 1, kind, payload, recorded_at)
            data = json.dumps(rec.to_doc(), sort_keys=True, separators=(",", ":")).encode()
            frame = struct.pack(">I", len(data)) + data + struct.pack(">I", zlib.crc32(data))
            try:
                self._fh.write(frame)
                self._fh.flush()
            except OSError as exc:
                raise StorageFull(f"cannot append to {self.path}: {exc}") from exc
            self._last_seq = rec.seq
            return rec

    def events(self, from_seq: int = 1) -> Iterator[EventRecord]:
        expect = 1
        with open(self.path, "rb") as fh:
            while True:
                header = fh.read(4)
                if not header:
                    break
                if len(header) < 4:
                    raise CorruptEvent(f"truncated frame header at event {expect}")
                (length,) = struct.unpack(">I", header)
                data = fh.read(length)
                tail = fh.read(4)
                if len(data) < length or len(tail) < 4:
                    raise CorruptEvent(f"truncated record at event {expect}")
                (crc,) = struct.unpack(">I", tail)
                if zlib.crc32(data) != crc:
                    raise CorruptEvent(f"checksum mismatch at event {expect}")
                doc = json.loads(data)
                if doc["seq"] != expect:
                    raise CorruptEvent(f"sequence gap: expected {expect}, found {doc['seq']}")
                rec = EventRecord(doc["seq"], doc["kind"], doc["payload"], doc["recorded_at"])
                self._last_seq = max(self._last_seq, rec.seq)
                if rec.seq >= from_seq:
                    yield rec
                expect += 1

    @property
    def last_seq(self) -> int:
        return self._last_seq

    def close(self) -> None:
        self._fh.close()


class SQLEventStore(EventStore):
    """Event log in a relational database, addressed by SQLAlchemy DSN."""

    def __init__(self, dsn: str):
        import sqlalchemy as sa

        self._sa = sa
        self._engine = sa.create_engine(dsn)
        meta = sa.MetaData()
        self._table = sa.Table(
            "events",
            meta,
            sa.Column("seq", sa.Integer, primary_key=True),
            sa.Column("kind", sa.String(32), nullable=False),
            sa.Column("payload", sa.Text, nullable=False),
            sa.Column("recorded_at", sa.String(40), nullable=False),
        )
        meta.create_all(self._engine)
        self._lock = threading.Lock()

    def append(self, kind: str, payload: dict, recorded_at: str) -> EventRecord:
        self._check_kind(kind)
        sa = self._sa
        with self._lock, self._engine.begin() as conn:
            seq = conn.execute(sa.select(sa.func.max(self._table.c.seq))).scalar() or 0
            rec = EventRecord(seq + 1, kind, payload, recorded_at)
            conn.execute(
                self._table.insert().values(
                    seq=rec.seq,
                    kind=kind,
                    payload=json.dumps(payload, sort_keys=True),
                    recorded_at=recorded_at,
                )
            )
            return rec

    def events(self, from_seq: int = 1) -> Iterator[EventRecord]:
        sa = self._sa
        with self._engine.connect() as conn:
            rows = conn.execute(
                sa.select(self._table)
                .where(self._table.c.seq >= from_seq)
                .order_by(self._table.c.seq)
            )
            expect = from_seq
            for row in rows:
                if row.seq != expect:
                    raise CorruptEvent(f"sequence gap: expected {expect}, found {row.seq}")
                yield EventRecord(row.seq, row.kind, json.loads(row.payload), row.recorded_at)
                expect += 1

    @property
    def last_seq(self) -> int:
        sa = self._sa
        with self._engine.connect() as conn:
            return conn.execute(sa.select(sa.func.max(self._table.c.seq))).scalar() or 0

    def close(self) -> None:
        self._engine.dispose()


def open_store(location: str | None) -> EventStore:
    """Open an event store from a location string.

    None or ":memory:" gives an in-process store, a DSN with "://" goes to
    the SQL backend, anything else is a log file path.
    """
    if location is None or location == ":memory:":
        return MemoryEventStore()
    if "://" in location:
        return SQLEventStore(location)
    return FileEventStore(location)
