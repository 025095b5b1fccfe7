"""HTTP classifier endpoint over a torchvision model.

Implements the consumer's wire protocol verbatim:

  GET  /healthz  -> {"classes": K}
  POST /predict  (image bytes) -> {"probabilities": [K floats], "labels": [...]}

Softmax is applied server-side, so the endpoint always returns a probability
distribution. Preprocessing (resize shorter edge, center crop, normalize) is
applied identically to every request — masked images with blacked-out regions
go through the exact same pipeline as originals, the black pixels simply
normalize to the per-channel -mean/std value.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import torch
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from PIL import Image, UnidentifiedImageError
from torchvision import models, transforms

# ImageNet normalization constants used by all torchvision classifiers
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class AdapterConfig:
    model_name: str = "mobilenet_v2"
    device: str = "cpu"  # "cpu" or "gpu"
    port: int = 8000
    host: str = "127.0.0.1"
    pretrained: bool = True
    resize_edge: int = 256
    crop_size: int = 224
    mean: tuple = IMAGENET_MEAN
    std: tuple = IMAGENET_STD
    threads: int = 0  # 0 = torch default

    def torch_device(self) -> torch.device:
        if self.device == "gpu":
            return torch.device("cuda")
        if self.device == "cpu":
            return torch.device("cpu")
        raise ValueError(f"device must be 'cpu' or 'gpu', got {self.device!r}")


def load_model(config: AdapterConfig):
    """Load the named torchvision classifier in deterministic eval mode.

    Returns (model, class_labels_or_None). Raises on unknown names or
    unobtainable weights; the CLI converts that into a nonzero exit.
    """
    labels = None
    if config.pretrained:
        weights = models.get_model_weights(config.model_name).DEFAULT
        labels = list(weights.meta["categories"])
        model = models.get_model(config.model_name, weights=weights)
    else:
        model = models.get_model(config.model_name, weights=None)
    model.eval()
    model.to(config.torch_device())
    return model, labels


def _preprocess(config: AdapterConfig):
    return transforms.Compose([
        transforms.Resize(config.resize_edge),
        transforms.CenterCrop(config.crop_size),
        transforms.ToTensor(),
        transforms.Normalize(mean=list(config.mean), std=list(config.std)),
    ])


def build_app(config: AdapterConfig, model=None, labels=None) -> FastAPI:
    """Assemble the FastAPI app; pass a preloaded (model, labels) to skip
    loading (used by tests)."""
    if config.threads:
        torch.set_num_threads(config.threads)
    if model is None:
        model, labels = load_model(config)
    preprocess = _preprocess(config)
    device = config.torch_device()

    with torch.inference_mode():
        probe = torch.zeros(1, 3, config.crop_size, config.crop_size, device=device)
        num_classes = int(model(probe).shape[1])

    app = FastAPI()
    app.state.config = config

    @app.get("/healthz")
    def healthz():
        return {"classes": num_classes}

    @app.post("/predict")
    async def predict(request: Request):
        body = await request.body()
        if not body:
            return JSONResponse({"error": "empty request body"}, status_code=400)
        try:
            img = Image.open(io.BytesIO(body))
            img.load()
            img = img.convert("RGB")
        except (UnidentifiedImageError, OSError, ValueError) as exc:
            return JSONResponse({"error": f"cannot decode image: {exc}"},
                                status_code=400)
        x = preprocess(img).unsqueeze(0).to(device)
        with torch.inference_mode():
            probs = torch.softmax(model(x)[0], dim=0).cpu()
        out = {"probabilities": probs.tolist()}
        if labels is not None:
            out["labels"] = labels
        return out

    return app
