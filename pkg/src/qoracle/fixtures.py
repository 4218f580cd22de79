"""Small hand-labelled databases used in examples and tests."""

from __future__ import annotations

from .oracle import Database

NAMES = [
    ("Alice", "1100"),
    ("Bob", "0101"),
    ("Craig", "0011"),
    ("Dan", "1101"),
    ("Eve", "0001"),
    ("Faythe", "0010"),
    ("Grace", "0101"),
    ("Heidi", "1001"),
]

# 16 entries, 6-bit labels. Index 6 holds the query label; indices 10 and 12
# sit at Hamming distance 1 from it, every other label at distance 2 to 4.
SIMILARITY_QUERY = "110011"
SIMILARITY_LABELS = [
    "000011",  # 0  d=2
    "101011",  # 1  d=2
    "110100",  # 2  d=3
    "011010",  # 3  d=3
    "100001",  # 4  d=2
    "001111",  # 5  d=4
    "110011",  # 6  d=0
    "111100",  # 7  d=4
    "010110",  # 8  d=3
    "100111",  # 9  d=2
    "010011",  # 10 d=1
    "000110",  # 11 d=4
    "111011",  # 12 d=1
    "011001",  # 13 d=3
    "101110",  # 14 d=4
    "110000",  # 15 d=2
]


def names_database() -> Database:
    """Eight names with fixed 4-bit labels; Bob and Grace collide."""
    return Database.from_fixture({"entry": e, "label": lb} for e, lb in NAMES)


def similarity_database() -> Database:
    return Database.from_fixture(
        {"entry": f"item{i}", "label": lb} for i, lb in enumerate(SIMILARITY_LABELS)
    )


def fixture_rows(db: Database) -> list[dict]:
    return [{"entry": e, "label": lb.bits} for e, lb in zip(db.entries, db.labels)]
