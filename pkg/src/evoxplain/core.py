"""Shared value types: raster images, superpixel label maps, chromosomes,
probability distributions and explanation records.

All types are immutable after construction (numpy buffers are marked
read-only), so they can be shared freely between worker threads.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import InputError, ParameterError

PROB_SUM_TOL = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RasterImage:
    """Width x height RGB image, 8 bits per channel, row-major."""

    data: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.dtype != np.uint8:
            raise InputError(f"expected (h, w, 3) uint8 array, got {arr.shape} {arr.dtype}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError("zero-area image")
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def num_pixels(self) -> int:
        return self.height * self.width

    @classmethod
    def load_png(cls, path) -> "RasterImage":
        try:
            with Image.open(path) as im:
                im.load()
                if im.mode == "RGBA":
                    # composite over opaque black; alpha is dropped
                    bg = Image.new("RGBA", im.size, (0, 0, 0, 255))
                    im = Image.alpha_composite(bg, im)
                im = im.convert("RGB")
                return cls(np.asarray(im, dtype=np.uint8))
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read image {path!r}: {exc}") from exc

    def save_png(self, path) -> None:
        Image.fromarray(np.asarray(self.data)).save(path, format="PNG")

    def png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(np.asarray(self.data)).save(buf, format="PNG")
        return buf.getvalue()

    def same_pixels(self, other: "RasterImage") -> bool:
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True)
class LabImage:
    """CIELAB image, float64 per channel, same layout as RasterImage."""

    data: np.ndarray  # (height, width, 3) float64: L in [0, 100]

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise InputError(f"expected (h, w, 3) array, got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError("zero-area image")
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class SuperpixelMap:
    """Per-pixel superpixel labels; labels are dense in [0, ns-1]."""

    labels: np.ndarray  # (height, width) int32
    ns: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int32)
        if labels.ndim != 2:
            raise InputError(f"expected (h, w) label array, got shape {labels.shape}")
        if self.ns < 1:
            raise ParameterError(f"ns must be >= 1, got {self.ns}")
        if labels.min() < 0 or labels.max() >= self.ns:
            raise InputError("label out of range [0, ns-1]")
        sizes = np.bincount(labels.ravel(), minlength=self.ns)
        if (sizes == 0).any():
            empty = int(np.flatnonzero(sizes == 0)[0])
            raise InputError(f"superpixel {empty} owns no pixels")
        object.__setattr__(self, "labels", _frozen(labels))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels.ravel(), minlength=self.ns)

    def is_connected(self) -> bool:
        """True iff every label's pixel set is 4-connected (flood fill check)."""
        h, w = self.labels.shape
        seen = np.zeros((h, w), dtype=bool)
        components = 0
        for y in range(h):
            for x in range(w):
                if seen[y, x]:
                    continue
                components += 1
                lab = self.labels[y, x]
                stack = [(y, x)]
                seen[y, x] = True
                while stack:
                    cy, cx = stack.pop()
                    for ny, nx in ((cy - 1, cx), (cy + 1, cx), (cy, cx - 1), (cy, cx + 1)):
                        if 0 <= ny < h and 0 <= nx < w and not seen[ny, nx] \
                                and self.labels[ny, nx] == lab:
                            seen[ny, nx] = True
                            stack.append((ny, nx))
        return components == self.ns

    def to_json_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "ns": self.ns,
            "labels": self.labels.ravel().tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SuperpixelMap":
        labels = np.asarray(d["labels"], dtype=np.int32).reshape(d["height"], d["width"])
        return cls(labels, int(d["ns"]))


@dataclass(frozen=True, eq=False)
class Chromosome:
    """Binary selection vector over superpixels; bit j == 1 keeps superpixel j."""

    bits: np.ndarray  # (ns,) uint8, each 0 or 1

    def __eq__(self, other):
        return isinstance(other, Chromosome) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size < 1:
            raise InputError("bits must be a non-empty 1-D sequence")
        if ((bits != 0) & (bits != 1)).any():
            raise InputError("bits must be 0/1")
        object.__setattr__(self, "bits", _frozen(bits))

    def __len__(self) -> int:
        return self.bits.size

    def ones(self) -> int:
        return int(self.bits.sum())

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def from_string(cls, s: str) -> "Chromosome":
        return cls(np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def all_ones(cls, ns: int) -> "Chromosome":
        return cls(np.ones(ns, dtype=np.uint8))

    @classmethod
    def all_zeros(cls, ns: int) -> "Chromosome":
        return cls(np.zeros(ns, dtype=np.uint8))


def validate_chromosome(c: Chromosome, m: SuperpixelMap) -> bool:
    """True iff the chromosome length matches the map's superpixel count."""
    return len(c) == m.ns


@dataclass(frozen=True)
class ProbDist:
    """Probability vector over K class labels.

    `sum_tol` is how far the sum may drift from 1 (never renormalized);
    locally computed distributions use the tight default, the remote client
    passes the wire protocol's looser tolerance to accept float32 servers.
    """

    probs: np.ndarray  # (K,) float64
    sum_tol: float = field(default=PROB_SUM_TOL, compare=False, repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 1:
            raise InputError("probs must be a non-empty 1-D sequence")
        if not np.isfinite(probs).all() or (probs < 0).any():
            raise InputError("probabilities must be finite and non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > self.sum_tol:
            raise InputError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "probs", _frozen(probs))

    def __len__(self) -> int:
        return self.probs.size

    def argmax(self) -> int:
        return int(np.argmax(self.probs))


@dataclass(frozen=True)
class Explanation:
    """Result of one explanation run: best mask, fitness trace and metadata."""

    best: Chromosome
    best_fitness: float
    target_label: int
    original_probability: float
    history: tuple  # per-generation best-so-far fitness, non-decreasing
    wall_time: float
    seed: int
    method: str = "elime"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        hist = tuple(float(v) for v in self.history)
        if not hist:
            raise InputError("history must be non-empty")
        if any(b < a for a, b in zip(hist, hist[1:])):
            raise InputError("history must be non-decreasing")
        if hist[-1] != self.best_fitness:
            raise InputError("best_fitness must equal the last history entry")
        object.__setattr__(self, "history", hist)

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "target_label": self.target_label,
            "original_probability": self.original_probability,
            "best_fitness": self.best_fitness,
            "bits": self.best.to_string(),
            "history": list(self.history),
            "wall_time_s": self.wall_time,
            "seed": self.seed,
            "params": dict(self.params),
        }

    def to_json(self, **dumps_kwargs) -> str:
        return json.dumps(self.to_json_dict(), **dumps_kwargs)

    @classmethod
    def from_json_dict(cls, d: dict) -> "Explanation":
        return cls(
            best=Chromosome.from_string(d["bits"]),
            best_fitness=float(d["best_fitness"]),
            target_label=int(d["target_label"]),
            original_probability=float(d["original_probability"]),
            history=tuple(d["history"]),
            wall_time=float(d["wall_time_s"]),
            seed=int(d["seed"]),
            method=d.get("method", "elime"),
            params=d.get("params", {}),
        )
