"""k-way node partitions and the ``node,part`` labels file."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Dict, Hashable, List, Sequence

import numpy as np

from common.errors import DomainError, ParseError

UNASSIGNED = -1


class Partition:
    """Assignment of every node to a part ``0..k-1``, or ``UNASSIGNED``."""

    __slots__ = ("_k", "_assignment")

    def __init__(self, assignment: Sequence[int] | np.ndarray, k: int | None = None) -> None:
        arr = np.array(assignment, dtype=np.int64).ravel()
        assigned = arr[arr != UNASSIGNED]
        if k is None:
            k = int(assigned.max()) + 1 if assigned.size else 1
        if k < 1:
            raise DomainError(f"partition needs k >= 1, got {k}")
        if assigned.size and (assigned.min() < 0 or assigned.max() >= k):
            raise DomainError(f"part index out of range [0, {k})")
        arr.setflags(write=False)
        self._k = int(k)
        self._assignment = arr

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable], unassigned: Hashable = None) -> "Partition":
        """Densify arbitrary labels into ``0..k-1`` in order of first appearance."""
        mapping: Dict[Hashable, int] = {}
        dense: List[int] = []
        for label in labels:
            if label == unassigned:
                dense.append(UNASSIGNED)
                continue
            dense.append(mapping.setdefault(label, len(mapping)))
        return cls(dense, k=max(len(mapping), 1))

    @classmethod
    def from_parts(cls, n: int, parts: Sequence[Sequence[int]]) -> "Partition":
        assignment = np.full(n, UNASSIGNED, dtype=np.int64)
        for index, part in enumerate(parts):
            members = np.asarray(list(part), dtype=np.int64)
            if np.any(assignment[members] != UNASSIGNED):
                raise DomainError("parts must be disjoint")
            assignment[members] = index
        return cls(assignment, k=len(parts))

    @property
    def k(self) -> int:
        return self._k

    @property
    def n(self) -> int:
        return int(self._assignment.size)

    @property
    def assignment(self) -> np.ndarray:
        return self._assignment

    def is_complete(self) -> bool:
        return bool(np.all(self._assignment != UNASSIGNED))

    def parts(self) -> List[np.ndarray]:
        return [np.flatnonzero(self._assignment == part) for part in range(self._k)]

    def sizes(self) -> np.ndarray:
        assigned = self._assignment[self._assignment != UNASSIGNED]
        return np.bincount(assigned, minlength=self._k)

    def relabeled(self, mapping: Sequence[int]) -> "Partition":
        """Rename part ``i`` to ``mapping[i]``."""
        table = np.asarray(mapping, dtype=np.int64)
        out = np.where(self._assignment == UNASSIGNED, UNASSIGNED, table[np.maximum(self._assignment, 0)])
        return Partition(out, k=max(self._k, int(table.max()) + 1))

    def permuted_nodes(self, perm: Sequence[int]) -> "Partition":
        """Partition of the graph whose node ``i`` was renamed ``perm[i]``."""
        out = np.empty_like(self._assignment)
        out[np.asarray(perm, dtype=np.int64)] = self._assignment
        return Partition(out, k=self._k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._k == other._k and np.array_equal(self._assignment, other._assignment)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, k={self._k}, sizes={self.sizes().tolist()})"


def format_labels(p: Partition, header: str = "node,part") -> str:
    buffer = io.StringIO()
    buffer.write(header + "\n")
    for node, part in enumerate(p.assignment.tolist()):
        buffer.write(f"{node},{part}\n")
    return buffer.getvalue()


def parse_labels(text: str) -> Partition:
    """Parse a ``node,part`` file (header optional, every node listed once, -1 = unassigned)."""
    rows: Dict[int, int] = {}
    reader = csv.reader(io.StringIO(text))
    for line_no, row in enumerate(reader, start=1):
        if not row or not "".join(row).strip():
            continue
        if line_no == 1 and not row[0].strip().lstrip("-").isdigit():
            continue
        if len(row) != 2:
            raise ParseError(f"expected 'node,part', got {row!r}", line=line_no)
        try:
            node, part = int(row[0]), int(row[1])
        except ValueError as exc:
            raise ParseError(f"non-integer field in {row!r}", line=line_no) from exc
        if node in rows:
            raise ParseError(f"node {node} listed twice", line=line_no)
        rows[node] = part
    n = len(rows)
    if sorted(rows) != list(range(n)):
        raise ParseError("node ids must be dense in [0, n)")
    return Partition([rows[node] for node in range(n)])


def write_labels(p: Partition, path: str | Path, header: str = "node,part") -> None:
    Path(path).write_text(format_labels(p, header=header), encoding="utf-8")


def read_labels(path: str | Path) -> Partition:
    return parse_labels(Path(path).read_text(encoding="utf-8"))
