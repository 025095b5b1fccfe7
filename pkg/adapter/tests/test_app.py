import io

import pytest
import torch
from fastapi.testclient import TestClient
from PIL import Image

from model_adapter import AdapterConfig, build_app, load_model

# resnet18: untrained mobilenet_v2 collapses to all-zero logits (inverted
# residuals + ReLU6 at init), resnet's skip connections keep signal alive
CONFIG = AdapterConfig(model_name="resnet18", pretrained=False)


@pytest.fixture(scope="session")
def client():
    # untrained weights: the protocol surface is identical, only the
    # probability values are meaningless
    torch.manual_seed(0)
    model, labels = load_model(CONFIG)
    app = build_app(CONFIG, model=model, labels=labels)
    with TestClient(app) as c:
        yield c


def _png_bytes(color=(180, 60, 60), size=(300, 240), mode="RGB"):
    buf = io.BytesIO()
    Image.new(mode, size, color).save(buf, format="PNG")
    return buf.getvalue()


def test_healthz_reports_1000_classes(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"classes": 1000}


def test_predict_returns_distribution(client):
    r = client.post("/predict", content=_png_bytes(),
                    headers={"Content-Type": "image/png"})
    assert r.status_code == 200
    probs = r.json()["probabilities"]
    assert len(probs) == 1000
    assert all(p >= 0 for p in probs)
    assert abs(sum(probs) - 1.0) < 1e-6


def test_predict_deterministic(client):
    body = _png_bytes()
    r1 = client.post("/predict", content=body)
    r2 = client.post("/predict", content=body)
    assert r1.content == r2.content


def _noise_png(seed):
    import numpy as np
    rng = np.random.default_rng(seed)
    img = Image.fromarray(rng.integers(0, 256, (240, 300, 3), dtype="uint8"))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def test_predict_distinguishes_inputs(client):
    a = client.post("/predict", content=_noise_png(0)).json()
    b = client.post("/predict", content=_noise_png(1)).json()
    assert a["probabilities"] != b["probabilities"]


def test_predict_masked_image_same_pipeline(client):
    # an image with blacked-out regions is just another image: 200 and a
    # valid distribution, no special-casing
    img = Image.new("RGB", (300, 240), (120, 200, 80))
    for x in range(150):
        for y in range(120):
            img.putpixel((x, y), (0, 0, 0))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    r = client.post("/predict", content=buf.getvalue())
    assert r.status_code == 200
    assert abs(sum(r.json()["probabilities"]) - 1.0) < 1e-6


def test_predict_accepts_rgba_and_odd_sizes(client):
    r = client.post("/predict", content=_png_bytes((1, 2, 3, 255), (97, 311), "RGBA"))
    assert r.status_code == 200


def test_predict_empty_body_400(client):
    r = client.post("/predict", content=b"")
    assert r.status_code == 400
    assert "error" in r.json()


def test_predict_garbage_400(client):
    r = client.post("/predict", content=b"this is not a png")
    assert r.status_code == 400
    assert "error" in r.json()


def test_unknown_model_name_raises():
    with pytest.raises(Exception):
        load_model(AdapterConfig(model_name="no_such_model", pretrained=False))


def test_bad_device_rejected():
    with pytest.raises(ValueError):
        AdapterConfig(device="tpu").torch_device()
