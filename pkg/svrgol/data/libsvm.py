from __future__ import annotations

import hashlib
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

from svrgol.data.dataset import Dataset, Example
from svrgol.exceptions import DataIOError, InvalidArgumentError, ParseError
from svrgol.linalg import SparseVector

logger = logging.getLogger(__name__)

MIN_HASH_BITS = 1
MAX_HASH_BITS = 31

_POSITIVE_LABELS = {"1", "+1"}
_NEGATIVE_LABELS = {"0", "-1"}


def _check_hash_bits(hash_bits: int) -> None:
    if not MIN_HASH_BITS <= hash_bits <= MAX_HASH_BITS:
        raise InvalidArgumentError(
            f"hash_bits must be in [{MIN_HASH_BITS}, {MAX_HASH_BITS}], got {hash_bits}"
        )


@lru_cache(maxsize=1 << 20)
def _digest(raw_index: int) -> int:
    digest = hashlib.blake2b(str(raw_index).encode("ascii"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def hash_feature(raw_index: int, hash_bits: int) -> int:
    """Map a raw feature index into ``[0, 2**hash_bits)``.

    BLAKE2b with an 8-byte digest over the decimal representation, truncated to
    the low ``hash_bits`` bits. Seedless, so identical on every run and platform.
    """
    _check_hash_bits(hash_bits)
    return _digest(int(raw_index)) & ((1 << hash_bits) - 1)


def _parse_label(token: str, line: str, line_number: Optional[int]) -> int:
    if token in _POSITIVE_LABELS:
        return 1
    if token in _NEGATIVE_LABELS:
        return -1
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"Invalid label {token!r}", line, line_number) from None
    if not math.isfinite(value):
        raise ParseError(f"Invalid label {token!r}", line, line_number)
    return 1 if value > 0 else -1


def parse_libsvm_line(
    line: str,
    hash_bits: int,
    prehashed: bool = False,
    line_number: Optional[int] = None,
) -> Example:
    """Parse ``<label> <idx>:<val> ...`` into a hashed ``Example``.

    ``prehashed`` reads indices that are already in ``[0, 2**hash_bits)``
    (the canonical serializer's output) without hashing them again.
    """
    _check_hash_bits(hash_bits)
    dim = 1 << hash_bits
    content = line.split("#", 1)[0]
    tokens = content.split()
    if not tokens:
        raise ParseError("Missing label", line, line_number)

    label = _parse_label(tokens[0], line, line_number)
    pairs: List[Tuple[int, float]] = []
    for token in tokens[1:]:
        raw_index, sep, raw_value = token.partition(":")
        if not sep or not raw_index or not raw_value:
            raise ParseError(f"Malformed feature token {token!r}", line, line_number)
        try:
            index = int(raw_index)
        except ValueError:
            raise ParseError(f"Non-integer feature index {raw_index!r}", line, line_number) from None
        if index < 0:
            raise ParseError(f"Negative feature index {index}", line, line_number)
        try:
            value = float(raw_value)
        except ValueError:
            raise ParseError(f"Non-numeric feature value {raw_value!r}", line, line_number) from None
        if not math.isfinite(value):
            raise ParseError(f"Non-finite feature value {raw_value!r}", line, line_number)
        if prehashed:
            if index >= dim:
                raise ParseError(f"Index {index} outside 2^{hash_bits}", line, line_number)
            pairs.append((index, value))
        else:
            pairs.append((hash_feature(index, hash_bits), value))

    return Example(SparseVector.from_pairs(pairs, dim), label)


def serialize_example(example: Example) -> str:
    """Canonical LibSVM line over hashed indices; ``parse_libsvm_line(..., prehashed=True)`` reads it back."""
    parts = ["+1" if example.label > 0 else "-1"]
    for index, value in zip(example.features.indices.tolist(), example.features.values.tolist()):
        parts.append(f"{index}:{value!r}")
    return " ".join(parts)


def iter_libsvm(path: Union[str, Path], hash_bits: int, prehashed: bool = False) -> Iterator[Example]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                if not line.split("#", 1)[0].strip():
                    continue
                yield parse_libsvm_line(line, hash_bits, prehashed=prehashed, line_number=line_number)
    except OSError as exc:
        raise DataIOError(f"Unable to read LibSVM data ({exc.strerror})", str(path)) from exc


def load_libsvm(path: Union[str, Path], hash_bits: int, prehashed: bool = False) -> Dataset:
    examples = list(iter_libsvm(path, hash_bits, prehashed=prehashed))
    dataset = Dataset.from_examples(examples, 1 << hash_bits)
    logger.info("Loaded %s examples (%s non-zeros) from %s", len(dataset), dataset.nnz, path)
    return dataset


def write_libsvm(path: Union[str, Path], dataset: Dataset) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for example in dataset:
                handle.write(serialize_example(example) + "\n")
    except OSError as exc:
        raise DataIOError(f"Unable to write LibSVM data ({exc.strerror})", str(path)) from exc
