import struct

import pytest

from votebench.errors import CorruptEvent
from votebench.eventlog import (
    FileEventStore,
    MemoryEventStore,
    SQLEventStore,
    open_store,
)


def fill(store, n=5):
    for i in range(n):
        store.append("subscribed", {"voter": f"v{i}", "tags": ["t"]}, "2024-01-01T00:00:00Z")
    return store


@pytest.fixture(params=["memory", "file", "sql"])
def store(request, tmp_path):
    if request.param == "memory":
        yield MemoryEventStore()
    elif request.param == "file":
        s = FileEventStore(tmp_path / "events.log")
        yield s
        s.close()
    else:
        s = SQLEventStore(f"sqlite:///{tmp_path}/events.db")
        yield s
        s.close()


def test_append_and_iterate(store):
    fill(store)
    events = list(store.events())
    assert [e.seq for e in events] == [1, 2, 3, 4, 5]
    assert events[2].payload["voter"] == "v2"
    assert store.last_seq == 5
    assert [e.seq for e in store.events(from_seq=4)] == [4, 5]


def test_unknown_kind_rejected(store):
    with pytest.raises(ValueError):
        store.append("made_up", {}, "2024-01-01T00:00:00Z")


def test_file_store_survives_reopen(tmp_path):
    path = tmp_path / "events.log"
    fill(FileEventStore(path)).close()
    reopened = FileEventStore(path)
    assert reopened.last_seq == 5
    reopened.append("subscribed", {"voter": "v5", "tags": ["t"]}, "2024-01-01T00:00:01Z")
    assert reopened.last_seq == 6
    reopened.close()


def test_file_store_checksum_and_truncation(tmp_path):
    path = tmp_path / "events.log"
    fill(FileEventStore(path)).close()
    original = path.read_bytes()

    # flip a payload byte: checksum mismatch
    corrupted = bytearray(original)
    corrupted[10] ^= 0xFF
    path.write_bytes(bytes(corrupted))
    store = object.__new__(FileEventStore)
    store.path = path
    store._last_seq = 0
    with pytest.raises(CorruptEvent, match="checksum|sequence"):
        list(store.events())

    # cut the file mid-record: truncation
    path.write_bytes(original[:-3])
    store._last_seq = 0
    with pytest.raises(CorruptEvent, match="truncated"):
        list(store.events())


def test_open_store_dispatch(tmp_path):
    assert isinstance(open_store(None), MemoryEventStore)
    assert isinstance(open_store(":memory:"), MemoryEventStore)
    s = open_store(f"sqlite:///{tmp_path}/d.db")
    assert isinstance(s, SQLEventStore)
    s.close()
    f = open_store(str(tmp_path / "e.log"))
    assert isinstance(f, FileEventStore)
    f.close()
