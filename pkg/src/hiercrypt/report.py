"""JSON reports and CSV tables for the analysis battery."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from typing import Iterable

import numpy as np

from . import analysis
from .chaos import Key
from .errors import DegenerateSampleError, ImageFormatError
from .hierarchy import CannyParams, encrypt_content
from .partition import as_image

SCHEMA_VERSION = 1
SELECTIONS = ("histogram", "differential", "correlation", "sensitivity")


def _clean(value):
    # JSON has no NaN/inf; numpy scalars are unwrapped
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else str(value)
    return value


def run_battery(
    img,
    key: Key,
    selections: Iterable[str] = SELECTIONS,
    seed: int = 0,
    n_flips: int = 5,
    n_pairs: int = 2500,
    params: CannyParams = CannyParams(),
) -> dict:
    """Run the selected analyses; the result is deterministic given ``seed``."""
    selections = list(selections)
    unknown = set(selections) - set(SELECTIONS)
    if unknown:
        raise ValueError(f"unknown analysis selection(s): {', '.join(sorted(unknown))}")
    img = as_image(img)
    mask = params.mask(img)
    cryptogram = encrypt_content(img >> 1, mask, key)
    report: dict = {
        "schema_version": SCHEMA_VERSION,
        "image": {"height": img.shape[0], "width": img.shape[1], "contour_fraction": float(mask.mean())},
        "seed": seed,
        "canny": asdict(params),
    }

    if "histogram" in selections:
        plain_h = analysis.histogram(img)
        full_h = analysis.histogram(cryptogram)
        content_h = analysis.histogram(cryptogram >> 1, alphabet=128)
        report["histogram"] = {
            "plain": {"chi2": plain_h.chi2, "p_value": plain_h.p_value, "counts": plain_h.counts.tolist()},
            "cipher": {"chi2": full_h.chi2, "p_value": full_h.p_value, "counts": full_h.counts.tolist()},
            "cipher_content": {
                "chi2": content_h.chi2,
                "dof": content_h.dof,
                "p_value": content_h.p_value,
                "uniform_at_0.01": content_h.is_uniform(0.01),
            },
        }

    if "differential" in selections:
        flips = analysis.random_flips(img.shape, n_flips, seed)
        runs = []
        for index, bit in flips:
            res = analysis.differential_test(img, key, (index, bit), params)
            runs.append({"index": index, "bit": bit, "npcr": res.npcr, "uaci": res.uaci})
        report["differential"] = {
            "npcr": float(np.mean([r["npcr"] for r in runs])) if runs else None,
            "uaci": float(np.mean([r["uaci"] for r in runs])) if runs else None,
            "runs": runs,
        }

    if "correlation" in selections:
        corr = {}
        for label, im in (("plain", img), ("cipher", cryptogram)):
            corr[label] = {}
            for d in analysis.DIRECTIONS:
                try:
                    corr[label][d] = analysis.correlation(im, d, n_pairs, seed).r
                except (DegenerateSampleError, ImageFormatError):
                    corr[label][d] = None
        report["correlation"] = {"n_pairs": n_pairs, **corr}

    if "sensitivity" in selections:
        rows = analysis.key_sensitivity_suite(img, key, params=params)
        report["sensitivity"] = [asdict(r) for r in rows]

    return _clean(report)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_differential_csv(path, report: dict) -> None:
    diff = report["differential"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["NPCR", "UACI"])
        w.writerow([diff["npcr"], diff["uaci"]])


def write_sensitivity_csv(path, report: dict) -> None:
    rows = report["sensitivity"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["label"])
        w.writeheader()
        w.writerows(rows)


def write_histogram_csv(path, plain, cipher) -> None:
    hp = analysis.histogram(plain).counts
    hc = analysis.histogram(cipher).counts
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["value", "plain", "cipher"])
        for v in range(256):
            w.writerow([v, int(hp[v]), int(hc[v])])


def write_scatter_csv(path, img, n_pairs: int = 2500, seed: int = 0) -> None:
    """Sampled adjacent-pixel pairs in all three directions, for plotting."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["direction", "x", "y"])
        for d in analysis.DIRECTIONS:
            x, y = analysis.adjacent_pairs(img, d, n_pairs, seed)
            w.writerows((d, int(a), int(b)) for a, b in zip(x, y))
