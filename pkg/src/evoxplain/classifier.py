"""Classifier port: the only thing the explainer knows about a model is
predict(image) -> ProbDist.

Ships a numerically stable softmax, a synthetic linear classifier whose
output is exactly computable from the selection mask (the test oracle), and
a client for remote classifiers speaking the JSON-over-HTTP wire protocol.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

import numpy as np
import requests

from .core import ProbDist, RasterImage, SuperpixelMap
from .errors import InputError, ProtocolError, RemoteError, TransportError

REMOTE_SUM_TOL = 1e-6


def softmax(z: Sequence[float] | np.ndarray) -> ProbDist:
    """Max-shifted softmax; requires K >= 2 finite logits."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.size < 2:
        raise InputError(f"logits must be 1-D with K >= 2, got shape {z.shape}")
    if not np.isfinite(z).all():
        raise InputError("logits must be finite")
    e = np.exp(z - z.max())
    return ProbDist(e / e.sum())


@runtime_checkable
class ClassifierPort(Protocol):
    """Capability every model must offer: pure prediction plus class count."""

    num_classes: int

    def predict(self, img: RasterImage) -> ProbDist: ...


def presence_vector(input_img: RasterImage, ref: RasterImage,
                    spmap: SuperpixelMap) -> np.ndarray:
    """Bit j == 1 iff superpixel j of input matches the reference byte-for-byte."""
    if input_img.data.shape != ref.data.shape:
        raise InputError("input and reference dimensions differ")
    if ref.data.shape[:2] != spmap.labels.shape:
        raise InputError("map dimensions do not match the images")
    eq = (input_img.data == ref.data).all(axis=-1)
    matching = np.bincount(spmap.labels.ravel(), weights=eq.ravel(), minlength=spmap.ns)
    return (matching == spmap.sizes()).astype(np.uint8)


@dataclass
class LinearSuperpixelClassifier:
    """Synthetic classifier: logits = b + W @ presence(img vs reference).

    Exactly computable from a chromosome alone, which is what makes
    exhaustive oracles over small maps exact.
    """

    reference: RasterImage
    spmap: SuperpixelMap
    weights: np.ndarray  # (K, ns)
    bias: np.ndarray  # (K,)
    label_names: tuple[str, ...] | None = None

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.reference.data.shape[:2] != self.spmap.labels.shape:
            raise InputError("map dimensions do not match the reference image")
        if self.weights.shape != (self.bias.size, self.spmap.ns):
            raise InputError(
                f"weights shape {self.weights.shape} does not match "
                f"K={self.bias.size}, ns={self.spmap.ns}")
        if self.bias.size < 2:
            raise InputError("need K >= 2 classes")
        black = (self.reference.data == 0).all(axis=-1)
        all_black = np.bincount(self.spmap.labels.ravel(), weights=black.ravel(),
                                minlength=self.spmap.ns) == self.spmap.sizes()
        if all_black.any():
            raise InputError("reference has an entirely black superpixel; "
                             "presence detection would be ambiguous")
        # precomputed per-label pixel counts for the fast presence check
        self._sizes = self.spmap.sizes()

    @property
    def num_classes(self) -> int:
        return self.bias.size

    def predict(self, img: RasterImage) -> ProbDist:
        if img.data.shape != self.reference.data.shape:
            raise InputError("image dimensions do not match the reference")
        p = presence_vector(img, self.reference, self.spmap)
        return self.predict_presence(p)

    def predict_presence(self, presence: np.ndarray) -> ProbDist:
        """Closed form on the presence bits; bridge used by exact oracles."""
        return softmax(self.bias + self.weights @ np.asarray(presence, dtype=np.float64))


@dataclass
class RemoteClassifier:
    """Client for the JSON-over-HTTP classifier wire protocol."""

    endpoint_url: str
    timeout: float = 30.0
    max_in_flight: int = 8
    num_classes: int = field(init=False, default=0)
    label_names: tuple[str, ...] | None = field(init=False, default=None)

    def __post_init__(self):
        self.endpoint_url = self.endpoint_url.rstrip("/")
        self._gate = threading.BoundedSemaphore(self.max_in_flight)
        self._session = requests.Session()

    def health(self) -> int:
        """GET /healthz; returns the class count K."""
        try:
            resp = self._session.get(f"{self.endpoint_url}/healthz", timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"health check failed: {exc}") from exc
        if resp.status_code != 200:
            raise RemoteError(f"health check returned {resp.status_code}: {resp.text}")
        try:
            classes = int(resp.json()["classes"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError(f"malformed health body: {resp.text!r}") from exc
        self.num_classes = classes
        return classes

    def predict(self, img: RasterImage) -> ProbDist:
        with self._gate:
            try:
                resp = self._session.post(
                    f"{self.endpoint_url}/predict",
                    data=img.png_bytes(),
                    headers={"Content-Type": "image/png"},
                    timeout=self.timeout,
                )
            except requests.RequestException as exc:
                raise TransportError(f"predict request failed: {exc}") from exc
        if resp.status_code != 200:
            raise RemoteError(f"predict returned {resp.status_code}: {resp.text}")
        try:
            body = resp.json()
            probs = np.asarray(body["probabilities"], dtype=np.float64)
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError(f"malformed predict body: {resp.text[:200]!r}") from exc
        if probs.ndim != 1 or probs.size < 2:
            raise ProtocolError(f"bad probability vector shape {probs.shape}")
        if self.num_classes and probs.size != self.num_classes:
            raise ProtocolError(
                f"expected K={self.num_classes}, got {probs.size}")
        if not np.isfinite(probs).all() or (probs < 0).any():
            raise ProtocolError("probabilities must be finite and non-negative")
        if abs(float(probs.sum()) - 1.0) > REMOTE_SUM_TOL:
            # renormalizing is not allowed: a bad sum is a hard error
            raise ProtocolError(f"probabilities sum to {float(probs.sum())}")
        if "labels" in body and body["labels"] is not None:
            names = tuple(str(s) for s in body["labels"])
            if len(names) == probs.size:
                self.label_names = names
        try:
            # wire tolerance: real float32 servers sum to 1 within ~1e-7,
            # which is valid remotely though looser than the local default
            return ProbDist(probs, sum_tol=REMOTE_SUM_TOL)
        except InputError as exc:
            raise ProtocolError(str(exc)) from exc
