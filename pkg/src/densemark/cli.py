"""densemark command line: sample, build, verify-train, eval, report, serve.

Exit codes: 0 success, 1 domain error, 2 usage error. Diagnostics go to
stderr; machine output goes to files or stdout only. Every subcommand can
read defaults from a JSON config file (--config) with dotted --set
overrides, e.g. --set sampler.iterations=2.
"""

import json
import os
import sys

import click
import numpy as np

from . import npyio
from .dataset import build_dataset, load_manifest
from .errors import DensemarkError, DomainError
from .evaluator import (EvalConfig, EvalReport, EvalSample, evaluate_dataset,
                        render_comparison)
from .geom import BoundingBox, KeypointSet, LandmarkSet, schema_for
from .meshio import load_template
from .sampler import (SamplerConfig, merge_keep_manual, run_sampling,
                      top_up_manual)
from .template import load_landmarks68, reference_landmarks68
from .trainer import (RegressorSpec, compare_losses_heavy_tail,
                      gradient_check, train_synthetic)


def _coerce(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path, sets):
    cfg = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except FileNotFoundError:
            raise DomainError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise DomainError(f"config file {path} is not valid JSON: {exc}")
    for item in sets or ():
        if "=" not in item:
            raise click.UsageError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = _coerce(value)
    return cfg


def _cfg_get(cfg, dotted, default=None):
    node = cfg
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return default
        node = node[part]
    return node


def _resolve_landmarks68(landmarks68, template_spec):
    if landmarks68:
        return load_landmarks68(landmarks68)
    if template_spec == "reference":
        return reference_landmarks68()
    raise DomainError("--landmarks68 is required for non-reference templates")


_CONFIG_OPTS = [
    click.option("--config", "config_path", type=click.Path(), default=None,
                 help="JSON config file."),
    click.option("--set", "sets", multiple=True,
                 help="Override a config key, e.g. --set sampler.iterations=2."),
]


def _with_config(fn):
    for opt in reversed(_CONFIG_OPTS):
        fn = opt(fn)
    return fn


@click.group()
def cli():
    """Dense facial-landmark ground-truth tooling."""


@cli.command()
@click.option("--template", default=None, help="OBJ file, 'verts.npy,uvs.npy'"
              ", a directory, or 'reference'.")
@click.option("--landmarks68", default=None, type=click.Path(),
              help="JSON table of 68 landmark vertex indices.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--iterations", default=None, type=int)
@click.option("--target", default=None, type=int,
              help="Top the set up to this many keypoints with evenly "
                   "strided manual entries (stand-in for hand rectification).")
@_with_config
def sample(template, landmarks68, out_path, iterations, target, config_path,
           sets):
    """Derive the keypoint set by iterated Delaunay centroid sampling."""
    cfg = load_config(config_path, sets)
    template = template or _cfg_get(cfg, "paths.template", "reference")
    landmarks68 = landmarks68 or _cfg_get(cfg, "paths.landmarks68")
    target = target if target is not None else _cfg_get(cfg, "sampler.target")
    mesh = load_template(template)
    table = _resolve_landmarks68(landmarks68, template)
    sampler_cfg = SamplerConfig(
        seed_indices68=tuple(_cfg_get(cfg, "sampler.seedIndices68",
                                      SamplerConfig().seed_indices68)),
        iterations=(iterations if iterations is not None
                    else _cfg_get(cfg, "sampler.iterations", 3)),
        snap_dedup=_cfg_get(cfg, "sampler.snapDedup", True),
    )
    fresh = run_sampling(mesh, table, sampler_cfg)
    if os.path.exists(out_path):
        existing = KeypointSet.load(out_path)
        result = merge_keep_manual(existing, fresh, mesh)
        kept = sum(1 for t in result.provenance if t == "manual")
        click.echo(f"merged over existing set: {kept} manual entries kept, "
                   f"{len(result)} total", err=True)
    else:
        result = fresh
        click.echo(f"sampled {len(result)} keypoints "
                   f"({sampler_cfg.iterations} iterations)", err=True)
    if target is not None and target > len(result):
        result = top_up_manual(result, mesh, target)
        click.echo(f"topped up to {len(result)} with manual placeholders",
                   err=True)
    result.save(out_path)


@cli.command()
@click.option("--in", "input_dir", required=True,
              type=click.Path(file_okay=False))
@click.option("--keys", "keys_path", required=True, type=click.Path())
@click.option("--template", default=None)
@click.option("--landmarks68", default=None, type=click.Path())
@click.option("--augment/--no-augment", default=False)
@click.option("--image-width", default=None, type=int,
              help="Image pixel width for flip reflection (per-sample meta "
                   "imageWidth wins; defaults to the position-map width).")
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False))
@_with_config
def build(input_dir, keys_path, template, landmarks68, augment, image_width,
          out_dir, config_path, sets):
    """Extract 68/520-point ground truth and write a dataset manifest."""
    from .sampler import build_mirror_table, snap_to_vertices

    cfg = load_config(config_path, sets)
    template = template or _cfg_get(cfg, "paths.template", "reference")
    landmarks68 = landmarks68 or _cfg_get(cfg, "paths.landmarks68")
    if not os.path.isdir(input_dir):
        raise DomainError(f"input directory not found: {input_dir}")
    mesh = load_template(template)
    keys520 = KeypointSet.load(keys_path)
    table = _resolve_landmarks68(landmarks68, template)
    keys68 = build_mirror_table(
        snap_to_vertices(mesh.uv[table], mesh, tags=("manual",) * 68,
                         dedup=False), mesh)
    manifest = build_dataset(input_dir, keys520, mesh, keys68, out_dir,
                             augment=augment, image_width=image_width)
    records = load_manifest(manifest)
    click.echo(f"built {len(records)} records -> {manifest}", err=True)


@cli.command("verify-train")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Write the JSON report here instead of stdout.")
@click.option("--quick", is_flag=True, help="Smaller spec for smoke runs.")
@_with_config
def verify_train(out_path, quick, config_path, sets):
    """Train the reference regressor on synthetic tasks and check gradients."""
    cfg = load_config(config_path, sets)
    t = _cfg_get(cfg, "trainer", {})
    if quick:
        t = {"inputDim": 8, "outputDim": 30, "epochs": 200, "nTrain": 32,
             **t}
    spec = RegressorSpec(
        input_dim=t.get("inputDim", 16),
        hidden=t.get("hidden"),
        output_dim=t.get("outputDim", 1560),
        seed=t.get("seed", 0),
        lr=t.get("lr", 150.0),
        epochs=t.get("epochs", 1500),
        n_train=t.get("nTrain", 64),
    )
    run = train_synthetic(spec, task_seed=t.get("taskSeed", 0))
    grad = gradient_check(RegressorSpec(input_dim=6, output_dim=30,
                                        seed=spec.seed))
    comparison = compare_losses_heavy_tail()
    report = {
        "train": {
            "finalLoss": run["final_loss"],
            "finalNME": run["final_nme"],
            "epochs": spec.epochs,
            "lr": spec.lr,
            "lossCurve": run["loss_curve"],
        },
        "gradientCheck": {
            "passed": grad["passed"],
            "nChecked": grad["n_checked"],
            "worstRelErr": grad["worst"]["rel_err"],
            "worstParam": grad["worst"]["param"],
        },
        "lossComparison": comparison,
    }
    text = json.dumps(report, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        click.echo(f"report -> {out_path}", err=True)
    else:
        click.echo(text, nl=False)


def _load_predictions(pred_path, pred_ids, n_points):
    if os.path.isdir(pred_path):
        preds = {}
        for name in sorted(os.listdir(pred_path)):
            if name.endswith(".npy"):
                arr = npyio.load_landmarks(os.path.join(pred_path, name),
                                           expected_n=n_points)
                preds[name[:-len(".npy")]] = arr
        return preds
    if pred_ids is None:
        raise DomainError("stacked predictions need --pred-ids")
    with open(pred_ids, "r", encoding="utf-8") as fh:
        ids = json.load(fh)
    arr = np.load(pred_path, allow_pickle=False)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] != len(ids):
        raise DomainError(f"prediction stack {pred_path} must be "
                          f"(n_ids, n_points, 3); got {arr.shape} for "
                          f"{len(ids)} ids")
    return {i: arr[k].astype(np.float64) for k, i in enumerate(ids)}


@cli.command("eval")
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path())
@click.option("--pred", "pred_path", required=True, type=click.Path())
@click.option("--pred-ids", default=None, type=click.Path())
@click.option("--schema", type=click.Choice(["68", "21", "520"]),
              default="68")
@click.option("--mode", type=click.Choice(["2d", "3d"]), default="3d")
@click.option("--normalization",
              type=click.Choice(["gtLandmarkBox", "providedBox"]),
              default="gtLandmarkBox")
@click.option("--out", "out_path", default=None, type=click.Path())
@_with_config
def eval_cmd(manifest_path, pred_path, pred_ids, schema, mode, normalization,
             out_path, config_path, sets):
    """Score predictions against manifest ground truth (NME/CED/AUC)."""
    cfg = load_config(config_path, sets)
    e = _cfg_get(cfg, "eval", {})
    eval_cfg = EvalConfig(
        mode=mode or e.get("mode", "3d"),
        normalization=normalization,
        bins=tuple(tuple(b) for b in e.get("bins",
                                           [[0, 30], [30, 60], [60, 90]])),
        ced_max_threshold=e.get("cedMaxThreshold", 0.05),
        balanced_seed=e.get("balancedSeed", 0),
    )
    if not os.path.exists(manifest_path):
        raise DomainError(f"manifest not found: {manifest_path}")
    records = load_manifest(manifest_path)
    base = os.path.dirname(os.path.abspath(manifest_path))
    n_points = int(schema)
    key = f"lmk{schema}"
    samples = []
    for rec in records:
        if key not in rec or rec[key] is None:
            raise DomainError(f"record {rec['id']} has no {key} ground truth")
        gt = npyio.load_landmarks(os.path.join(base, rec[key]),
                                  expected_n=n_points)
        box = None
        if eval_cfg.normalization == "providedBox":
            if not rec.get("bbox"):
                raise DomainError(f"record {rec['id']} has no bbox but "
                                  f"providedBox normalization was requested")
            x0, y0, h, w = rec["bbox"]
            box = BoundingBox(x0=x0, y0=y0, h=h, w=w)
        samples.append(EvalSample(id=rec["id"],
                                  gt=LandmarkSet(gt, schema_for(n_points)),
                                  yaw=rec.get("yaw"), box=box))
    raw_preds = _load_predictions(pred_path, pred_ids, n_points)
    predictions = {k: LandmarkSet(v, schema_for(n_points))
                   for k, v in raw_preds.items()}
    report = evaluate_dataset(samples, predictions, eval_cfg)
    if out_path:
        report.save(out_path)
        click.echo(f"report -> {out_path}", err=True)
    else:
        click.echo(json.dumps(report.to_json_dict(), indent=2))


@cli.command()
@click.option("--report", "report_paths", multiple=True, type=click.Path(),
              help="report.json (repeatable; pair with --label).")
@click.option("--label", "labels", multiple=True,
              help="Row label per --report (default Ours).")
@click.option("--layout", type=click.Choice(["aflw2000-68", "aflw-21",
                                             "backbone-compare"]),
              default="aflw2000-68")
def report(report_paths, labels, layout):
    """Render evaluation reports as a paper-style fixed-width table."""
    if not report_paths:
        raise click.UsageError("pass at least one --report")
    labels = list(labels) + ["Ours"] * (len(report_paths) - len(labels))
    rows = []
    for path, label in zip(report_paths, labels):
        if not os.path.exists(path):
            raise DomainError(f"report not found: {path}")
        rows.append((label, EvalReport.load(path)))
    click.echo(render_comparison(rows, layout), nl=False)


@cli.command()
@click.option("--template", default=None)
@click.option("--keys", "keys_path", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True, type=int)
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
@click.option("--ui-dir", default=None, type=click.Path(file_okay=False))
@_with_config
def serve(template, keys_path, host, port, manifest_path, ui_dir,
          config_path, sets):
    """Host the rectification HTTP API (and optionally the built UI)."""
    from .server import make_server

    cfg = load_config(config_path, sets)
    template = template or _cfg_get(cfg, "paths.template", "reference")
    port = port if port is not None else _cfg_get(cfg, "serve.port", 8787)
    if not 1 <= port <= 65535:
        raise DomainError(f"port {port} outside [1, 65535]")
    if not os.path.exists(keys_path):
        raise DomainError(f"keypoint file not found: {keys_path}")
    mesh = load_template(template)
    httpd = make_server(mesh, keys_path, host=host, port=port,
                        manifest_path=manifest_path, ui_dir=ui_dir)
    click.echo(f"serving on http://{host}:{httpd.server_address[1]}/ "
               f"(Ctrl-C to stop)", err=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        click.echo("stopped", err=True)
    finally:
        httpd.server_close()


def main(argv=None):
    try:
        return cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except DensemarkError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
