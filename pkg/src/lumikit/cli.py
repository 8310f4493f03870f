"""Command-line entry point wiring the library into one workflow.

Subcommands: planck (locus math), augment (variant generation), edges
(Canny export), loss-check (kernel self-test or single evaluation),
evaluate (manifest scoring), study (2AFC scaling), probe (embedding
analysis).  Exit codes: 0 success, 1 validation or usage error, 2 I/O
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, loss, pngio, probe, relight, study
from .color import (
    CMF_SHA256,
    IDENTITY_PRESET_ID,
    PRESETS,
    PRESET_IDS,
    chromaticity_to_illuminant_rgb,
    kelvin_to_chromaticity,
    preset_to_illuminant_rgb,
)
from .config import ToolConfig
from .errors import LumikitError, ValidationError
from .evaluation import evaluate_manifest, parse_wb_method
from .relight import AugmentationManifest, PromptTemplate

__all__ = ["main", "main_entry"]


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(payload: dict, as_json: bool, lines) -> None:
    if as_json:
        print(json.dumps(payload, indent=2))
    else:
        for line in lines:
            print(line)


def _load_config(args) -> ToolConfig:
    base = ToolConfig.load(args.config) if getattr(args, "config", None) else ToolConfig()
    return base


# ---------------------------------------------------------------- planck

def _cmd_planck(args) -> int:
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise ValidationError(
                f"unknown preset {args.preset!r}; valid ids: {', '.join(PRESET_IDS)}"
            )
        preset = PRESETS[args.preset]
        kelvin = preset.temperature.kelvin
        preset_id = preset.id
    else:
        kelvin = args.kelvin
        preset_id = None
    chroma = kelvin_to_chromaticity(kelvin)
    gains = (
        preset_to_illuminant_rgb(preset_id)
        if preset_id is not None
        else chromaticity_to_illuminant_rgb(chroma)
    )
    payload = {
        "preset_id": preset_id,
        "kelvin": kelvin,
        "chromaticity": {"x": chroma.x, "y": chroma.y},
        "gains": list(gains.gains),
    }
    _emit(payload, args.json, [
        f"kelvin: {kelvin:g}" + (f"  (preset {preset_id})" if preset_id else ""),
        f"chromaticity: x={chroma.x:.6f} y={chroma.y:.6f}",
        f"gains (linear sRGB, green=1): r={gains.red:.6f} g=1.000000 b={gains.blue:.6f}",
    ])
    return 0


# ---------------------------------------------------------------- augment

def _split_presets(text: str):
    return [p.strip() for p in text.split(",") if p.strip()]


def _cmd_augment(args) -> int:
    cfg = _load_config(args).override(
        canny_low=args.canny_low,
        canny_high=args.canny_high,
        canny_sigma=args.canny_sigma,
        presets=tuple(_split_presets(args.presets)) if args.presets else None,
        out_dir=args.out,
    )
    img = pngio.read_image(args.image)
    soft = pngio.read_mask_soft(args.mask)
    mask = pngio.binarize_mask(soft)
    is_soft = not np.all(np.isin(np.unique(soft), (0.0, 1.0)))
    template = PromptTemplate(concept_token=args.concept, class_noun=args.class_noun)
    presets = list(cfg.presets)
    if args.include_identity and IDENTITY_PRESET_ID not in presets:
        presets = [IDENTITY_PRESET_ID] + presets
    manifest = relight.generate_variants(
        img,
        mask,
        template,
        presets=presets,
        out_dir=cfg.out_dir,
        source_name=Path(args.image).stem,
        bit_depth=args.bit_depth,
        low_threshold=cfg.canny_low,
        high_threshold=cfg.canny_high,
        blur_sigma=cfg.canny_sigma,
        threads=args.threads,
        soft_mask_source=args.mask if is_soft else None,
    )
    manifest_path = Path(cfg.out_dir) / relight.MANIFEST_NAME
    payload = {
        "manifest": str(manifest_path),
        "records": len(manifest.records),
        "presets": [r.preset_id for r in manifest.records],
        "clipped_pixel_counts": {r.preset_id: r.clipped_pixel_count for r in manifest.records},
        "effective_config": cfg.to_dict(),
    }
    _emit(payload, args.json, [
        f"wrote {len(manifest.records)} variants to {cfg.out_dir}",
        f"manifest: {manifest_path}",
        "clipped pixels per preset: "
        + ", ".join(f"{r.preset_id}={r.clipped_pixel_count}" for r in manifest.records),
    ])
    return 0


# ---------------------------------------------------------------- edges

def _cmd_edges(args) -> int:
    cfg = _load_config(args).override(
        canny_low=args.canny_low, canny_high=args.canny_high, canny_sigma=args.canny_sigma
    )
    img = pngio.read_image(args.image)
    edges = relight.canny_edges(
        img,
        low_threshold=cfg.canny_low,
        high_threshold=cfg.canny_high,
        blur_sigma=cfg.canny_sigma,
        relative_thresholds=not args.absolute_thresholds,
    )
    pngio.write_edge_map(args.out, edges)
    payload = {
        "out": str(args.out),
        "edge_pixels": int(edges.sum()),
        "total_pixels": int(edges.size),
        "effective_config": cfg.to_dict(),
    }
    _emit(payload, args.json, [
        f"wrote edge map to {args.out} ({int(edges.sum())} edge pixels of {edges.size})",
    ])
    return 0


# ---------------------------------------------------------------- loss-check

def _loss_selftest(seed: int, trials: int = 100) -> dict:
    rng = np.random.default_rng(seed)
    checks = {}

    res = np.ones((8, 8, 4))
    half = np.zeros((8, 8))
    half[:4] = 1.0
    closed = [
        abs(loss.mrl(res, half, loss.MrlParams(0.2)) - 0.5),
        abs(loss.mrl(res, np.ones((8, 8)), loss.MrlParams(1.0)) - 1.0),
        abs(loss.mrl(res, np.zeros((8, 8)), loss.MrlParams(0.0)) - 1.0),
    ]
    rand_res = rng.random((8, 8, 4))
    rand_mask = rng.random((8, 8))
    closed.append(
        abs(loss.mrl(rand_res, rand_mask, loss.MrlParams(0.5)) - 0.5 * rand_res.mean())
    )
    checks["closed_form_max_abs_err"] = float(max(closed))
    checks["closed_form_pass"] = bool(max(closed) < 1e-12)

    worst = 0.0
    step = 1e-4
    for _ in range(trials):
        pred = rng.uniform(-1.0, 1.0, (8, 8, 4))
        target = pred - np.sign(rng.uniform(-1, 1, pred.shape)) * rng.uniform(0.1, 1.0, pred.shape)
        mask = rng.random((8, 8))
        params = loss.MrlParams(rng.uniform(0.05, 0.95))
        grad = loss.mrl_gradient(pred, target, mask, params)
        i, j, k = rng.integers(0, 8), rng.integers(0, 8), rng.integers(0, 4)
        bump = np.zeros_like(pred)
        bump[i, j, k] = step
        fd = (
            loss.mrl(loss.residual_map(pred + bump, target), mask, params)
            - loss.mrl(loss.residual_map(pred - bump, target), mask, params)
        ) / (2.0 * step)
        worst = max(worst, abs(fd - grad[i, j, k]) / max(abs(fd), 1e-12))
    checks["gradient_trials"] = trials
    checks["gradient_worst_rel_err"] = float(worst)
    checks["gradient_pass"] = bool(worst < 1e-5)

    fixture = loss.RegionFixture(fg_residual=1.0, bg_residual=0.0)
    table = loss.lambda_sweep(fixture, [1.0, 0.8, 0.6, 0.4, 0.2, 0.0])
    affine_err = max(abs(val - lam / 2.0) for lam, val in table)
    checks["sweep"] = [[lam, val] for lam, val in table]
    checks["sweep_affine_max_err"] = float(affine_err)
    checks["sweep_pass"] = bool(affine_err < 1e-10)

    checks["default_lambda"] = loss.DEFAULT_LAMBDA
    checks["pass"] = checks["closed_form_pass"] and checks["gradient_pass"] and checks["sweep_pass"]
    return checks


def _cmd_loss_check(args) -> int:
    cfg = _load_config(args)
    if args.pred or args.target or args.mask:
        if not (args.pred and args.target and args.mask):
            raise ValidationError("single evaluation needs --pred, --target, and --mask together")
        pred = loss.read_tensor(args.pred)
        target = loss.read_tensor(args.target)
        mask = loss.read_tensor(args.mask)
        if mask.ndim == 3 and mask.shape[2] == 1:
            mask = mask[:, :, 0]
        lam = cfg.lam if args.lam is None else args.lam
        params = loss.MrlParams(lam)
        value = loss.mrl(loss.residual_map(pred, target), mask, params)
        grad_norm = float(np.linalg.norm(loss.mrl_gradient(pred, target, mask, params)))
        payload = {
            "loss": value,
            "lambda": lam,
            "gradient_l2": grad_norm,
            "shape": list(pred.shape),
            "effective_config": cfg.to_dict(),
        }
        _emit(payload, args.json, [
            f"mrl = {value:.10g}  (lambda={lam:g}, shape {tuple(pred.shape)})",
            f"gradient l2 norm = {grad_norm:.10g}",
        ])
        return 0

    checks = _loss_selftest(args.seed)
    checks["effective_config"] = cfg.to_dict()
    _emit(checks, args.json, [
        f"closed forms: max |err| {checks['closed_form_max_abs_err']:.3g} "
        f"-> {'pass' if checks['closed_form_pass'] else 'FAIL'}",
        f"gradient vs finite differences ({checks['gradient_trials']} trials): "
        f"worst rel err {checks['gradient_worst_rel_err']:.3g} "
        f"-> {'pass' if checks['gradient_pass'] else 'FAIL'}",
        f"lambda sweep affine: max err {checks['sweep_affine_max_err']:.3g} "
        f"-> {'pass' if checks['sweep_pass'] else 'FAIL'}",
    ])
    return 0 if checks["pass"] else 1


# ---------------------------------------------------------------- evaluate

def _cmd_evaluate(args) -> int:
    cfg = _load_config(args).override(wb_method=args.wb, plots=bool(args.plot) or None)
    manifest = AugmentationManifest.load(args.manifest)
    method = parse_wb_method(cfg.wb_method)
    report = evaluate_manifest(
        manifest,
        method,
        aggregate=args.aggregate,
        masked_ssim=not args.full_frame_ssim,
        threads=args.threads,
    )
    doc = report.to_dict()
    doc["effective_config"] = cfg.to_dict()
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if args.plot:
        from . import plots

        plots.metric_bars(report, args.plot)
    overall = doc["aggregates"].get("overall")
    lines = [f"scored {len(report.records)} records "
             f"({len(report.excluded)} excluded) -> {args.out}"]
    if overall:
        lines.append(
            "overall: angular_error_deg {:.4f}, lab_mse {:.4f}, ssim {:.4f}".format(
                overall["angular_error_deg"]["mean"],
                overall["lab_mse"]["mean"],
                overall["ssim"]["mean"],
            )
        )
    _emit(doc if args.json else {}, args.json, lines)
    return 0


# ---------------------------------------------------------------- study

def _cmd_study(args) -> int:
    prefs = study.PreferenceMatrix.from_csv(args.prefs)
    result = study.run_study(
        prefs,
        with_bootstrap=not args.no_bootstrap,
        n_resamples=args.resamples,
        seed=args.seed,
        ci_level=args.ci,
    )
    doc = result.to_dict()
    doc["effective_config"] = _load_config(args).to_dict()
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    lines = [f"scaled {len(prefs.methods)} methods over {prefs.trials} trials/pair -> {args.out}"]
    for name, scale in zip(result.methods, result.scales):
        lines.append(f"  {name}: {scale:.4f}")
    _emit(doc if args.json else {}, args.json, lines)
    return 0


# ---------------------------------------------------------------- probe

def _cmd_probe(args) -> int:
    cfg = _load_config(args)
    sets = []
    for manifest in args.embeddings:
        sets.extend(probe.load_embeddings(manifest))
    configs = (
        probe.load_cluster_configs(args.configs)
        if args.configs
        else probe.default_cluster_configs()
    )
    report = probe.run_probe_suite(sets, configs, metric=args.metric)
    doc = report.to_dict()
    doc["effective_config"] = cfg.to_dict()
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if args.plots:
        from . import plots

        for es, entry in zip(sets, report.entries):
            pca = entry.get("pca", {})
            if "projections" in pca:
                name = f"{es.encoder_id}_{es.level}.png".replace("/", "_")
                plots.pca_scatter(
                    es,
                    np.asarray(pca["projections"]),
                    pca["explained_variance"],
                    Path(args.plots) / name,
                )
    lines = [f"probed {len(sets)} embedding sets x {len(configs)} configs -> {args.out}"]
    for entry in report.entries:
        cells = ", ".join(
            f"{k}={v:.3f}" if isinstance(v, float) else f"{k}=error"
            for k, v in entry["silhouette"].items()
        )
        lines.append(f"  {entry['encoder_id']}/{entry['level']}: {cells}")
    _emit(doc if args.json else {}, args.json, lines)
    return 0


# ---------------------------------------------------------------- wiring

def _add_common(p: _Parser, *, threads=False, seed=False):
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--config", help="JSON config file overriding built-in defaults")
    if threads:
        p.add_argument("--threads", type=int, default=1, help="worker pool size")
    if seed:
        p.add_argument("--seed", type=int, default=42, help="RNG seed")


def _add_canny_flags(p: _Parser):
    p.add_argument("--canny-low", type=float, default=None, help="low threshold (default 0.1)")
    p.add_argument("--canny-high", type=float, default=None, help="high threshold (default 0.2)")
    p.add_argument("--canny-sigma", type=float, default=None, help="blur sigma (default 1.4)")


def build_parser() -> _Parser:
    parser = _Parser(prog="lumikit", description=__doc__)
    parser.add_argument(
        "--version",
        action="version",
        version=f"lumikit {__version__} (cmf sha256 {CMF_SHA256})",
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("planck", help="blackbody chromaticity and RGB gains")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--kelvin", type=float, help="color temperature in kelvin")
    group.add_argument("--preset", help="preset id (c1..c7)")
    _add_common(p)
    p.set_defaults(func=_cmd_planck)

    p = sub.add_parser("augment", help="generate relit variants plus manifest")
    p.add_argument("--image", required=True, help="source PNG (sRGB)")
    p.add_argument("--mask", required=True, help="foreground mask PNG")
    p.add_argument("--concept", required=True, help="concept pseudo-token, e.g. '[v]'")
    p.add_argument("--class", dest="class_noun", required=True, help="class noun, e.g. dog")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--presets", default=None, help="comma-separated preset ids")
    p.add_argument("--include-identity", action="store_true",
                   help="also write an unmodified c0 record")
    p.add_argument("--bit-depth", type=int, default=16, choices=(8, 16))
    _add_canny_flags(p)
    _add_common(p, threads=True)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("edges", help="export a Canny edge map")
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True, help="output edge-map PNG")
    p.add_argument("--absolute-thresholds", action="store_true",
                   help="treat thresholds as absolute gradient magnitudes")
    _add_canny_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_edges)

    p = sub.add_parser("loss-check", help="kernel self-test, or score tensor files")
    p.add_argument("--pred", help="prediction tensor file")
    p.add_argument("--target", help="target tensor file")
    p.add_argument("--mask", help="mask tensor file")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="foreground weight (default 0.2)")
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_loss_check)

    p = sub.add_parser("evaluate", help="score a manifest against preset ground truth")
    p.add_argument("--manifest", required=True)
    p.add_argument("--wb", default=None,
                   help="gray_world | sog:<p> | white_patch | external:<dir>")
    p.add_argument("--out", default="report.json")
    p.add_argument("--aggregate", choices=("median", "mean"), default="median")
    p.add_argument("--full-frame-ssim", action="store_true",
                   help="SSIM over the whole frame instead of the mask")
    p.add_argument("--plot", default=None, help="directory for per-preset metric charts")
    _add_common(p, threads=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("study", help="Thurstone Case V scaling of 2AFC preferences")
    p.add_argument("--prefs", required=True, help="CSV with header winner,loser,count")
    p.add_argument("--out", default="scales.json")
    p.add_argument("--no-bootstrap", action="store_true")
    p.add_argument("--resamples", type=int, default=1000)
    p.add_argument("--ci", type=float, default=0.95)
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_study)

    p = sub.add_parser("probe", help="PCA and silhouettes over embedding sets")
    p.add_argument("--embeddings", nargs="+", required=True, help="manifest file(s)")
    p.add_argument("--configs", default=None, help="cluster config JSON (default: bundled four)")
    p.add_argument("--out", default="probe_report.json")
    p.add_argument("--plots", default=None, help="directory for PCA scatter images")
    p.add_argument("--metric", choices=("cosine", "euclidean"), default="cosine")
    _add_common(p)
    p.set_defaults(func=_cmd_probe)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except ValidationError as err:
        print(f"lumikit {args.command}: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"lumikit {args.command}: {err}", file=sys.stderr)
        return 2
    except LumikitError as err:
        print(f"lumikit {args.command}: {err}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
