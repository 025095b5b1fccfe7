"""Serve a pretrained image classifier behind the prediction wire protocol."""

from __future__ import annotations

import sys

import click
import uvicorn

from .app import AdapterConfig, build_app


@click.command()
@click.option("--model", "model_name", default="mobilenet_v2", show_default=True,
              help="torchvision classifier name (resnet34, densenet121, ...).")
@click.option("--device", type=click.Choice(["cpu", "gpu"]), default="cpu",
              show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--pretrained/--no-pretrained", default=True,
              help="Load pretrained weights (disable only for protocol testing).")
@click.option("--threads", default=0, help="torch CPU threads (0 = default).")
def main(model_name, device, port, host, pretrained, threads):
    config = AdapterConfig(model_name=model_name, device=device, port=port,
                           host=host, pretrained=pretrained, threads=threads)
    try:
        app = build_app(config)
    except Exception as exc:  # model load failure -> nonzero exit per contract
        click.echo(f"error: cannot load model {model_name!r}: {exc}", err=True)
        sys.exit(1)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
