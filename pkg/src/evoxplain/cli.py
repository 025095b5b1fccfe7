"""Command line front end.

Subcommands: segment (SLIC + map JSON), explain (evolve or baseline a mask
for one image), bench (seeded suite runs with JSON/CSV reports) and
check-model (wire-protocol health probe).

Exit codes: 0 success, 2 input/parameter error, 3 transport error,
4 protocol/numeric error.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import bench as bench_mod
from . import slic
from .classifier import RemoteClassifier
from .core import RasterImage
from .errors import (EvoxplainError, InputError, NumericError, ParameterError,
                     ProtocolError, RemoteError, TransportError)
from .explainer import GaParams, decode_mask, evolve
from .lime_baseline import LimeParams, explain_lime

_EXIT_CODES = [
    ((ParameterError, InputError), 2),
    ((TransportError,), 3),
    ((RemoteError, ProtocolError, NumericError), 4),
]


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EvoxplainError as exc:
            for types, code in _EXIT_CODES:
                if isinstance(exc, types):
                    click.echo(f"error: {exc}", err=True)
                    sys.exit(code)
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
    return wrapper


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    cfg = {}
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ParameterError(f"bad config line: {line!r}")
                key, value = line.split("=", 1)
                cfg[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path!r}: {exc}") from exc
    return cfg


def _apply_config(ctx: click.Context, cfg: dict, params: dict) -> dict:
    """Precedence: explicit flags > config file entries > defaults."""
    out = dict(params)
    for name, value in cfg.items():
        if name not in out:
            raise ParameterError(f"unknown config key {name!r}")
        source = ctx.get_parameter_source(name)
        if source is None or source.name == "DEFAULT":
            default = out[name]
            if isinstance(default, bool):
                out[name] = value.lower() in ("1", "true", "yes", "on")
            elif isinstance(default, int):
                out[name] = int(value)
            elif isinstance(default, float):
                out[name] = float(value)
            else:
                out[name] = value
    return out


@click.group()
def main():
    """Explain black-box image classifier predictions with evolved
    superpixel masks."""


@main.command()
@click.option("--image", "image_path", required=True, type=click.Path(), help="Input PNG.")
@click.option("--superpixels", "-n", default=100, show_default=True, help="Requested superpixel count.")
@click.option("--compactness", "-m", default=10.0, show_default=True, help="SLIC compactness weight.")
@click.option("--out", "out_path", type=click.Path(), help="Boundary-overlay PNG path.")
@click.option("--map-out", "map_out", type=click.Path(), help="Label map JSON path.")
@click.option("--check", is_flag=True, help="Verify all map invariants.")
@_handle_errors
def segment(image_path, superpixels, compactness, out_path, map_out, check):
    """Segment an image into SLIC superpixels."""
    img = RasterImage.load_png(image_path)
    spmap = slic.segment(img, slic.SlicParams(k=superpixels, m=compactness))
    if out_path:
        slic.boundary_overlay(img, spmap).save_png(out_path)
    if map_out:
        with open(map_out, "w") as fh:
            json.dump(spmap.to_json_dict(), fh)
            fh.write("\n")
    if check:
        assert spmap.ns <= superpixels
        if not spmap.is_connected():
            raise NumericError("segmentation produced a disconnected superpixel")
        click.echo(f"ok: ns={spmap.ns}, all invariants hold")
    else:
        click.echo(f"ns={spmap.ns}")


def _make_model(model_spec: str, image_path, superpixels, compactness, timeout):
    """Resolve a model spec to (model, image, map)."""
    if model_spec == "builtin:demo":
        scenario = bench_mod.make_scenario(bench_mod.ScenarioSpec(name="demo"))
        return scenario.classifier, scenario.reference, scenario.spmap
    if model_spec.startswith(("http://", "https://")):
        if not image_path:
            raise ParameterError("--image is required with a remote model")
        img = RasterImage.load_png(image_path)
        spmap = slic.segment(img, slic.SlicParams(k=superpixels, m=compactness))
        model = RemoteClassifier(model_spec, timeout=timeout)
        model.health()
        return model, img, spmap
    raise ParameterError(
        f"model spec must be 'builtin:demo' or an http(s) URL, got {model_spec!r}")


@main.command()
@click.option("--image", "image_path", type=click.Path(), help="Input PNG (remote models).")
@click.option("--model", "model_spec", default=None,
              help="'builtin:demo' or endpoint URL (falls back to $EVOXPLAIN_MODEL_URL).")
@click.option("--method", type=click.Choice(["elime", "lime"]), default="elime",
              show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--superpixels", "-n", default=100, show_default=True)
@click.option("--compactness", "-m", default=10.0, show_default=True)
@click.option("--population", default=100, show_default=True)
@click.option("--generations", default=50, show_default=True)
@click.option("--crossover-rate", default=0.9, show_default=True)
@click.option("--mutation-rate", default=0.2, show_default=True)
@click.option("--tournament-size", default=3, show_default=True)
@click.option("--num-samples", default=1000, show_default=True, help="Baseline sample count.")
@click.option("--kernel-width", default=0.0, help="Baseline kernel width (0 = 0.25*sqrt(ns)).")
@click.option("--ridge-lambda", default=1e-3, show_default=True)
@click.option("--budget", default=0, help="Baseline feature budget (0 = ns // 4).")
@click.option("--jobs", default=1, show_default=True, help="Fitness evaluation workers.")
@click.option("--timeout", default=30.0, show_default=True, help="Remote timeout, seconds.")
@click.option("--out", "out_path", type=click.Path(), help="Masked-image PNG path.")
@click.option("--report", "report_path", type=click.Path(), help="Explanation JSON path.")
@click.option("--timing/--no-timing", default=False,
              help="Keep real wall time in the report (breaks byte-level determinism).")
@click.option("--config", "config_path", type=click.Path(), help="key=value config file.")
@click.pass_context
@_handle_errors
def explain(ctx, **params):
    """Evolve (or sample) a local explanation for one prediction."""
    params = _apply_config(ctx, _load_config(params.pop("config_path")), params)
    model_spec = params["model_spec"] or os.environ.get("EVOXPLAIN_MODEL_URL") \
        or "builtin:demo"
    model, img, spmap = _make_model(model_spec, params["image_path"],
                                    params["superpixels"], params["compactness"],
                                    params["timeout"])
    if params["method"] == "elime":
        ga = GaParams(
            population_size=params["population"],
            generations=params["generations"],
            crossover_rate=params["crossover_rate"],
            mutation_rate=params["mutation_rate"],
            tournament_size=params["tournament_size"],
            seed=params["seed"],
            n_jobs=params["jobs"],
        )
        exp = evolve(model, img, spmap, ga)
    else:
        lp = LimeParams(
            num_samples=params["num_samples"],
            kernel_width=params["kernel_width"] or None,
            ridge_lambda=params["ridge_lambda"],
            seed=params["seed"],
            n_jobs=params["jobs"],
        )
        budget = params["budget"] or max(1, spmap.ns // 4)
        exp = explain_lime(model, img, spmap, lp, budget)

    if not params["timing"]:
        exp = replace(exp, wall_time=0.0)
    if params["out_path"]:
        decode_mask(exp.best, img, spmap).save_png(params["out_path"])
    if params["report_path"]:
        with open(params["report_path"], "w") as fh:
            fh.write(exp.to_json(indent=2, sort_keys=True))
            fh.write("\n")
    click.echo(f"target={exp.target_label} original={exp.original_probability:.6f} "
               f"best={exp.best_fitness:.6f} selected={exp.best.ones()}/{len(exp.best)}")


@main.command("bench")
@click.option("--suite", "suite_path", type=click.Path(), help="Suite JSON (default: packaged).")
@click.option("--runs", default=30, show_default=True)
@click.option("--seed0", default=0, show_default=True)
@click.option("--out-dir", "out_dir", required=True, type=click.Path())
@click.option("--population", default=100, show_default=True)
@click.option("--generations", default=50, show_default=True)
@click.option("--num-samples", default=1000, show_default=True)
@_handle_errors
def bench_cmd(suite_path, runs, seed0, out_dir, population, generations, num_samples):
    """Run the seeded benchmark suite and write JSON/CSV reports."""
    if suite_path:
        try:
            specs, extras = bench_mod.load_suite(suite_path)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot parse suite {suite_path!r}: {exc}") from exc
        runs = int(extras.get("runs", runs))
        methods = tuple(extras.get("methods", ("elime", "lime")))
    else:
        specs = bench_mod.default_suite()
        methods = ("elime", "lime")
    scenarios = [bench_mod.make_scenario(s) for s in specs]
    reports = bench_mod.run_suite(
        scenarios, methods=methods, runs=runs,
        ga_params=GaParams(population_size=population, generations=generations),
        lime_params=LimeParams(num_samples=num_samples),
        seed0=seed0,
    )
    json_path, csv_path = bench_mod.write_reports(reports, out_dir)
    click.echo(f"wrote {json_path} and {csv_path}")


@main.command("check-model")
@click.option("--model", "model_url", default=None,
              help="Endpoint URL (falls back to $EVOXPLAIN_MODEL_URL).")
@_handle_errors
def check_model(model_url):
    """Probe a remote classifier's /healthz endpoint."""
    url = model_url or os.environ.get("EVOXPLAIN_MODEL_URL")
    if not url:
        raise ParameterError("no model URL given (flag or $EVOXPLAIN_MODEL_URL)")
    classes = RemoteClassifier(url).health()
    click.echo(f"classes: {classes}")


if __name__ == "__main__":
    main()
