"""
MIT License

Copyright (c) 2024-present Isabelle Phoebe <izzy@uwu.gal>

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from datetime import datetime, timezone
from typing import Final

import nacl.encoding
import nacl.hash
import numpy as np
from dateutil.parser import isoparse


__all__: Final[tuple[str, ...]] = (
    "from_timestamp",
    "utc_now",
    "digest",
    "derive_seed",
    "U64_LIMIT",
)


U64_LIMIT: Final[int] = 2**64


def from_timestamp(timestamp: int | float | str) -> datetime:
    if isinstance(timestamp, str):
        return isoparse(timestamp)
    return datetime.fromtimestamp(float(timestamp), tz=timezone.utc)


def utc_now() -> str:
    return datetime.now(tz=timezone.utc).isoformat()


def digest(data: bytes | str, *, size: int = 16) -> str:
    """Hex BLAKE2b digest. Used for config hashes and checkpoint checksums."""
    if isinstance(data, str):
        data = data.encode()
    return nacl.hash.blake2b(data, digest_size=size, encoder=nacl.encoding.HexEncoder).decode()


def derive_seed(seed: int, *path: int) -> int:
    """
    Deterministic child seed for (seed, *path).

    Episode ``k`` of a run always gets ``derive_seed(seed, k)`` no matter how the run is split
    across checkpoints, which is what makes resumed training identical to an uninterrupted one.
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
