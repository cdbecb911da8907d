"""Counter-based random words.

Every random word is a pure function of ``(key, stream, coordinates,
component)``, built from the SplitMix64 finalizer.  This gives random
access to the innovation at any lattice site, which is what coupled
resampling and overlapping regions need.
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_M52 = 2.0 ** -52

MASK64 = (1 << 64) - 1


def mix(x):
    """SplitMix64 finalizer applied elementwise to a uint64 array."""
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def as_key(seed):
    """Coerce a Python int (any sign) or array of ints to uint64 keys."""
    if isinstance(seed, (int, np.integer)):
        return np.asarray([int(seed) & MASK64], dtype=np.uint64)
    arr = np.asarray(seed)
    if arr.dtype == np.uint64:
        return arr.reshape(-1)
    return arr.astype(np.int64).view(np.uint64).reshape(-1)


def derive(key, *labels):
    """Derive child keys from ``key`` and integer labels.

    ``key`` may be an int or a uint64 array; labels may be ints or integer
    arrays broadcastable against it.  Used for per-path, per-replicate and
    per-environment seeds.
    """
    h = mix(as_key(key) if isinstance(key, (int, np.integer)) else
            np.asarray(key, dtype=np.uint64))
    for lab in labels:
        lab = np.asarray(lab)
        if lab.dtype != np.uint64:
            lab = lab.astype(np.int64).view(np.uint64)
        h = mix(h ^ mix(lab))
    return h


def site_hash(keys, stream, coords):
    """Hash of (key, stream, site) for every key and every site.

    Parameters
    ----------
    keys : (B,) uint64
    stream : int
    coords : (n, k) int64 lattice coordinates

    Returns
    -------
    (B, n) uint64
    """
    keys = np.asarray(keys, dtype=np.uint64)
    coords = np.asarray(coords, dtype=np.int64)
    h = mix(keys ^ mix(np.uint64(stream & MASK64)))[:, None]
    cu = coords.view(np.uint64)
    for c in range(coords.shape[1]):
        h = mix(h ^ cu[None, :, c])
    return h


def component_words(h, component):
    """Independent word number ``component`` attached to hashed sites."""
    return mix(h ^ mix(np.uint64(component + 1)))


def to_unit(words):
    """Map uint64 words to doubles in the open interval (0, 1).

    Uses the top 52 bits, so the midpoint grid stays exactly representable
    and never rounds to 1.
    """
    return ((words >> np.uint64(12)).astype(np.float64) + 0.5) * _TWO_M52
