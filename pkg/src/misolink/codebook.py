"""Beamforming codebooks: construction, quantization, and quality metrics.

A codebook is an ordered list of unit-norm beamforming vectors shared by
transmitter and receiver; the receiver feeds back only the index of its
pick (ceil(log2 N) bits).  Two families are built here: unconstrained
("generic") codebooks from Lloyd iterations on Rayleigh samples, and
equal-gain codebooks whose entries come from the QPSK alphabet
{+1, -1, +j, -j}/sqrt(nt), which store in 2 bits per entry and need no
multipliers.  Externally supplied codebooks (e.g. standard tables) load
from the text format documented at save_codebook.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import (
    CodebookFormatError,
    DegenerateInputError,
    DimensionError,
    InfeasibleSizeError,
    ParameterError,
)
from .numerics import chordal_distance, normalize
from .rng import RngStream

ALPHABET_GENERIC = "generic"
ALPHABET_QPSK_EG = "qpsk-eg"

# QPSK alphabet phases in tie-break preference order: +1, +j, -1, -j.
_QPSK_PHASES = np.array([0.0, 0.5 * math.pi, math.pi, -0.5 * math.pi])
_QPSK_SYMBOLS = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


@dataclass(eq=False)
class Codebook:
    nt: int
    vectors: np.ndarray  # (N, nt) complex128, rows unit-norm
    alphabet: str = ALPHABET_GENERIC
    label: str = "codebook"
    distortion_history: list[float] | None = field(default=None, repr=False)
    replaced: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.complex128)
        if self.vectors.ndim != 2 or self.vectors.shape[0] < 1:
            raise DimensionError(f"codebook needs a (N, nt) vector array, got shape {self.vectors.shape}")
        if self.vectors.shape[1] != self.nt:
            raise DimensionError(f"vector length {self.vectors.shape[1]} does not match nt={self.nt}")
        norms = np.linalg.norm(self.vectors, axis=1)
        bad = np.abs(norms - 1.0) > 1e-10
        if bad.any():
            raise ParameterError(f"codebook entry {int(np.argmax(bad))} is not unit-norm (||v||={norms[bad][0]!r})")
        self.vectors.flags.writeable = False

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def feedback_bits(self) -> int:
        return max(1, math.ceil(math.log2(self.size))) if self.size > 1 else 1


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate so the first non-negligible entry is real-positive."""
    for x in v:
        if abs(x) > 1e-12:
            return v * (abs(x) / x)
    return v


def dft_codebook(nt: int, n: int) -> Codebook:
    """DFT-style baseline: vector i has entry k = exp(2j pi i k / n)/sqrt(nt)."""
    if nt < 1 or n < 1:
        raise DimensionError(f"nt and n must be >= 1, got ({nt}, {n})")
    i = np.arange(n)[:, None]
    k = np.arange(nt)[None, :]
    vectors = np.exp(2j * np.pi * i * k / n) / math.sqrt(nt)
    alphabet = ALPHABET_QPSK_EG if _is_qpsk_eg(vectors, nt) else ALPHABET_GENERIC
    return Codebook(nt=nt, vectors=vectors, alphabet=alphabet, label=f"dft{n}")


def _is_qpsk_eg(vectors: np.ndarray, nt: int) -> bool:
    scaled = vectors * math.sqrt(nt)
    return bool(np.all(np.min(np.abs(scaled[..., None] - _QPSK_SYMBOLS), axis=-1) < 1e-12))


def _egb_candidate(nt: int, index: int) -> np.ndarray:
    """Candidate `index` of the equal-gain pool: first entry fixed to +1,
    remaining entries base-4 digits into the QPSK alphabet."""
    v = np.empty(nt, dtype=np.complex128)
    v[0] = 1.0
    for k in range(1, nt):
        v[k] = _QPSK_SYMBOLS[index % 4]
        index //= 4
    return v / math.sqrt(nt)


def _min_pairwise_distance(vectors: np.ndarray) -> float:
    if vectors.shape[0] < 2:
        return 1.0
    g = np.abs(vectors @ vectors.conj().T) ** 2
    iu = np.triu_indices(vectors.shape[0], k=1)
    return float(np.sqrt(np.maximum(0.0, 1.0 - np.max(g[iu]))) if False else np.min(np.sqrt(np.maximum(0.0, 1.0 - g[iu]))))


def egb_search(nt: int, n: int, iters: int = 2000, rng: RngStream | None = None) -> Codebook:
    """Equal-gain QPSK-alphabet codebook maximizing the min pairwise
    chordal distance.

    The candidate pool quotients global phase by fixing the first entry to
    +1/sqrt(nt), so it has 4**(nt-1) distinct directions.  Small problems
    (nt <= 3, n <= 16) are solved exhaustively; larger ones by seeded
    random restarts, so results are reproducible for a fixed seed.
    """
    if nt < 1 or n < 1:
        raise DimensionError(f"nt and n must be >= 1, got ({nt}, {n})")
    pool_size = 4 ** (nt - 1)
    if n > pool_size:
        raise InfeasibleSizeError(
            f"equal-gain pool for nt={nt} has {pool_size} distinct directions, cannot pick {n}"
        )
    if n == 1:
        return Codebook(nt=nt, vectors=_egb_candidate(nt, 0)[None, :], alphabet=ALPHABET_QPSK_EG, label="egb1")

    if nt <= 3 and n <= 16:
        pool = np.stack([_egb_candidate(nt, i) for i in range(pool_size)])
        best = None
        best_d = -1.0
        for subset in combinations(range(pool_size), n):
            d = _min_pairwise_distance(pool[list(subset)])
            if d > best_d + 1e-15:
                best_d = d
                best = subset
        vectors = pool[list(best)]
    else:
        if rng is None:
            rng = RngStream(0)
        best = None
        best_d = -1.0
        for _ in range(max(1, iters)):
            idx = _sample_without_replacement(pool_size, n, rng)
            cand = np.stack([_egb_candidate(nt, i) for i in idx])
            d = _min_pairwise_distance(cand)
            if d > best_d + 1e-15:
                best_d = d
                best = cand
        vectors = best
    return Codebook(nt=nt, vectors=vectors, alphabet=ALPHABET_QPSK_EG, label=f"egb{n}")


def _sample_without_replacement(pool: int, n: int, rng: RngStream) -> list[int]:
    """Partial Fisher-Yates draw of n distinct indices from range(pool)."""
    u = rng.uniforms(n)
    picked: dict[int, int] = {}
    out = []
    for j in range(n):
        r = j + int(u[j] * (pool - j))
        r = min(r, pool - 1)
        out.append(picked.get(r, r))
        picked[r] = picked.get(j, j)
    return out


def lloyd_grassmannian(nt: int, n: int, samples: int = 0, iters: int = 50, rng: RngStream | None = None) -> Codebook:
    """Generic codebook from Lloyd iterations on Rayleigh channel samples.

    Cells are assigned by chordal distance and recentered at the principal
    eigenvector of the cell's outer-product sum; the training distortion
    mean(1 - |<u, w>|^2) is non-increasing across iterations and recorded
    on the returned codebook.  Empty cells are reseeded from the samples
    currently worst-served, farthest first.
    """
    if nt < 1 or n < 1:
        raise DimensionError(f"nt and n must be >= 1, got ({nt}, {n})")
    if samples <= 0:
        samples = 100 * n
    if samples < 10 * n:
        raise ParameterError(f"need at least 10*n training samples, got {samples} for n={n}")
    if iters < 1:
        raise ParameterError(f"iters must be >= 1, got {iters}")
    if rng is None:
        rng = RngStream(0)

    raw = rng.uniforms(2 * samples * nt)
    from .rng import gauss_pairs_from_uniforms

    u = gauss_pairs_from_uniforms(raw).reshape(samples, nt)
    u /= np.linalg.norm(u, axis=1, keepdims=True)

    w = np.stack([_canonical_phase(u[i]) for i in range(n)])
    history: list[float] = []
    for _ in range(iters):
        scores = np.abs(u @ w.conj().T) ** 2  # (samples, n)
        assign = np.argmax(scores, axis=1)
        own = scores[np.arange(samples), assign]
        history.append(float(np.mean(1.0 - own)))

        counts = np.bincount(assign, minlength=n)
        if (counts == 0).any():
            order = np.argsort(own, kind="stable")  # farthest (lowest score) first
            take = 0
            for c in np.flatnonzero(counts == 0):
                assign[order[take]] = c
                take += 1
        for c in range(n):
            cell = u[assign == c]
            if len(cell) == 0:
                continue
            r = cell.conj().T @ cell
            vals, vecs = np.linalg.eigh(r)
            w[c] = _canonical_phase(vecs[:, -1])
    cb = Codebook(nt=nt, vectors=w, alphabet=ALPHABET_GENERIC, label=f"lloyd{n}")
    cb.distortion_history = history
    return cb


def nearest_fa_vector(v: np.ndarray, alphabet: str = ALPHABET_QPSK_EG) -> np.ndarray:
    """Per-entry QPSK phase quantization of a beamforming direction.

    The input is first rotated so its first nonzero entry is real-positive
    (quotienting global phase), then each entry is snapped to the alphabet
    phase nearest its argument, ties resolved toward +1, +j, -1, -j in
    that order.  The result is returned in that canonical rotation.
    """
    if alphabet != ALPHABET_QPSK_EG:
        raise ParameterError(f"unsupported alphabet {alphabet!r}")
    v = np.asarray(v, dtype=np.complex128)
    nt = len(v)
    nv = float(np.linalg.norm(v))
    if not nv > 0:
        raise DegenerateInputError("cannot quantize the zero vector")
    vr = _canonical_phase(v)
    out = np.empty(nt, dtype=np.complex128)
    for k in range(nt):
        ph = math.atan2(vr[k].imag, vr[k].real)
        best = 0
        best_d = math.inf
        for j, a in enumerate(_QPSK_PHASES):
            d = abs((ph - a + math.pi) % (2.0 * math.pi) - math.pi)
            if d < best_d - 1e-12:
                best_d = d
                best = j
        out[k] = _QPSK_SYMBOLS[best]
    return out / math.sqrt(nt)


def mixed_codebook(base: Codebook, eps: float) -> Codebook:
    """Replace entries by their equal-gain approximations where the
    approximation is within chordal distance eps (entries already in the
    alphabet, up to global phase, are always replaced).

    The output keeps the base size and order; its alphabet tag flips to
    qpsk-eg only when every entry got replaced, which is what determines
    the storage cost.
    """
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    vectors = np.array(base.vectors)
    replaced = np.zeros(base.size, dtype=bool)
    for i in range(base.size):
        approx = nearest_fa_vector(vectors[i])
        exact = bool(np.max(np.abs(_canonical_phase(vectors[i]) - approx)) <= 1e-10)
        if exact or chordal_distance(vectors[i], approx) <= eps:
            vectors[i] = approx
            replaced[i] = True
    alphabet = ALPHABET_QPSK_EG if replaced.all() else ALPHABET_GENERIC
    cb = Codebook(nt=base.nt, vectors=vectors, alphabet=alphabet, label=f"{base.label}-mixed{eps:g}")
    cb.replaced = replaced
    return cb


def select_beamformer(h_hat: np.ndarray, cb: Codebook) -> tuple[int, np.ndarray]:
    """Pick argmax_i |<h_hat, w_i>|^2; ties go to the lowest index."""
    h_hat = np.asarray(h_hat, dtype=np.complex128)
    if h_hat.shape != (cb.nt,):
        raise DimensionError(f"estimate has shape {h_hat.shape}, codebook nt={cb.nt}")
    scores = np.abs(cb.vectors @ h_hat.conj()) ** 2
    idx = int(np.argmax(scores))
    return idx, cb.vectors[idx]


def min_chordal_distance(cb: Codebook) -> float:
    """Minimum pairwise chordal distance; 1 by convention for N < 2."""
    return _min_pairwise_distance(cb.vectors)


def storage_cost(cb: Codebook) -> int:
    """Bits to store the codebook: 2 per entry per antenna for the QPSK
    alphabet, two 64-bit reals per entry otherwise."""
    per_entry = 2 if cb.alphabet == ALPHABET_QPSK_EG else 2 * 64
    return per_entry * cb.nt * cb.size


def save_codebook(cb: Codebook, path) -> None:
    """Write the ASCII codebook format:

    line 1: ``miso-codebook v1 nt=<int> size=<int> alphabet=<tag> label=<token>``
    then one vector per line, entries ``<re>:<im>`` separated by single
    spaces, 17 significant digits, LF endings, '#' starting comment lines.
    """
    with open(path, "w", newline="\n") as f:
        f.write(f"miso-codebook v1 nt={cb.nt} size={cb.size} alphabet={cb.alphabet} label={cb.label}\n")
        for v in cb.vectors:
            f.write(" ".join(f"{x.real:.17g}:{x.imag:.17g}" for x in v) + "\n")


def load_codebook(path) -> Codebook:
    """Read the format written by save_codebook, with validation.

    Entries whose norm deviates from 1 by more than 1e-6 are rejected;
    smaller deviations are silently re-normalized (exact inputs are kept
    bit-for-bit so a save/load round trip is lossless).
    """
    with open(path) as f:
        lines = f.read().splitlines()
    header = None
    header_no = 0
    rows: list[tuple[int, str]] = []
    for no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if header is None:
            header = stripped
            header_no = no
        else:
            rows.append((no, stripped))
    if header is None:
        raise CodebookFormatError(f"{path}: no header line found")
    fields = header.split()
    if len(fields) != 6 or fields[0] != "miso-codebook" or fields[1] != "v1":
        raise CodebookFormatError(f"{path}:{header_no}: bad header {header!r}")
    kv = {}
    for tok in fields[2:]:
        if "=" not in tok:
            raise CodebookFormatError(f"{path}:{header_no}: bad header token {tok!r}")
        k, _, val = tok.partition("=")
        kv[k] = val
    try:
        nt = int(kv["nt"])
        size = int(kv["size"])
        alphabet = kv["alphabet"]
        label = kv["label"]
    except (KeyError, ValueError) as e:
        raise CodebookFormatError(f"{path}:{header_no}: bad header fields ({e})") from e
    if alphabet not in (ALPHABET_GENERIC, ALPHABET_QPSK_EG):
        raise CodebookFormatError(f"{path}:{header_no}: unknown alphabet {alphabet!r}")
    if len(rows) != size:
        raise CodebookFormatError(f"{path}: header says size={size} but found {len(rows)} vector lines")

    vectors = np.empty((size, nt), dtype=np.complex128)
    for i, (no, line) in enumerate(rows):
        parts = line.split()
        if len(parts) != nt:
            raise CodebookFormatError(f"{path}:{no}: expected {nt} entries, found {len(parts)}")
        for k, tok in enumerate(parts):
            re_s, sep, im_s = tok.partition(":")
            if not sep:
                raise CodebookFormatError(f"{path}:{no}: entry {tok!r} is not <re>:<im>")
            try:
                vectors[i, k] = complex(float(re_s), float(im_s))
            except ValueError as e:
                raise CodebookFormatError(f"{path}:{no}: bad number in {tok!r}") from e
        nv = float(np.linalg.norm(vectors[i]))
        if abs(nv - 1.0) > 1e-6:
            raise CodebookFormatError(f"{path}:{no}: vector norm {nv!r} deviates from 1 by more than 1e-6")
        if abs(nv - 1.0) > 1e-12:
            vectors[i] /= nv
    return Codebook(nt=nt, vectors=vectors, alphabet=alphabet, label=label)
