#!/usr/bin/env python3
"""End-to-end run: serve a pretrained model, evolve an explanation for one
photo through the consumer's CLI, and check that the evolved mask's
target-class probability is at least the original probability.

Requires pretrained weights (downloaded or cached by torchvision) and the
`evoxplain` CLI on PATH. The two sides talk only over the wire protocol.

Usage: python e2e.py --photo dog.png [--model mobilenet_v2] [--superpixels 100]
"""

import argparse
import json
import socket
import subprocess
import sys
import tempfile
import time
from pathlib import Path


def wait_for_port(port, timeout=120.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        try:
            with socket.create_connection(("127.0.0.1", port), timeout=1.0):
                return
        except OSError:
            time.sleep(0.5)
    raise RuntimeError(f"server on port {port} never came up")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--photo", required=True, help="input photo (PNG)")
    parser.add_argument("--model", default="mobilenet_v2")
    parser.add_argument("--superpixels", type=int, default=100)
    parser.add_argument("--port", type=int, default=8731)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    server = subprocess.Popen(
        [sys.executable, "-m", "model_adapter.cli",
         "--model", args.model, "--port", str(args.port)])
    try:
        wait_for_port(args.port)
        url = f"http://127.0.0.1:{args.port}"
        report = Path(tempfile.mkdtemp()) / "report.json"
        t0 = time.monotonic()
        subprocess.run(
            ["evoxplain", "explain", "--model", url, "--image", args.photo,
             "--superpixels", str(args.superpixels), "--seed", str(args.seed),
             "--timing", "--report", str(report)],
            check=True)
        wall = time.monotonic() - t0
        data = json.loads(report.read_text())

        pop = data["params"]["population_size"]
        gens = data["params"]["generations"]
        calls = pop * (gens + 1) + 1
        print(f"\noriginal probability: {data['original_probability']:.4f}")
        print(f"evolved probability:  {data['best_fitness']:.4f}")
        print(f"classifier calls:     {calls}")
        print(f"total wall time:      {wall:.1f}s")
        ok = (data["best_fitness"] >= data["original_probability"]
              and wall < 15 * 60)
        print("RESULT:", "PASS" if ok else "FAIL")
        return 0 if ok else 1
    finally:
        server.terminate()
        server.wait(timeout=10)


if __name__ == "__main__":
    sys.exit(main())
