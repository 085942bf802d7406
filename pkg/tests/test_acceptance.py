"""The ten acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; ``conftest.py`` prints them at the
end of the pytest run. Running this file directly prints the same lines.
"""
import time

import numpy as np
import pytest

from _checks import li_oracle, ncomp, png_bytes, polyline_gap, random_histograms, shape_suite
from privshade.corpus import ChartSpec, corpus, generate
from privshade.errors import InvalidMaskSizeError
from privshade.mask import MaskPlan, area_pattern, line_pattern, retained_mask
from privshade.perception import ViewingGeometry, predict_visibility
from privshade.pipeline import load_preset, transform
from privshade.raster import lightness
from privshade.segment import (AREA_MARK, BACKGROUND, MarkMap, li_threshold_from_histogram,
                               measure_stroke_width, skeletonize)

RESULTS = {}
PPI = 394.6


def record(n, title, ok, detail):
    RESULTS[n] = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    assert ok, RESULTS[n]


@pytest.fixture(scope="module")
def corpus24():
    return list(corpus())


def test_c01_frequency_shift(corpus24):
    bad = []
    start = time.perf_counter()
    for name, img, _ in corpus24:
        rep = transform(img, name.split("_")[0]).report
        if not (rep.non_dc_after > rep.non_dc_before and rep.centroid_after > rep.centroid_before):
            bad.append(name)
    elapsed = time.perf_counter() - start
    record(1, "frequency shift", not bad and elapsed < 10.0,
           f"{24 - len(bad)}/24 charts shifted up, {elapsed:.2f} s (limit 10 s)")


def test_c02_presets():
    expected = {"bar": (13, 75), "scatter": (5, 75), "line": (21, 25), "pie": (7, 25),
                "pie-study1": (7, 75)}
    got = {k: load_preset(k).pair() for k in expected}
    rejected = 0
    for n in (0, 2, 4, 6, 12):
        for key in ("areaMaskN", "lineMaskN"):
            try:
                load_preset({"chartType": "bar", key: n})
            except InvalidMaskSizeError:
                rejected += 1
    record(2, "preset fidelity", got == expected and rejected == 10,
           f"presets {got}, {rejected}/10 even sizes rejected")


def test_c03_masking_exactness(rng):
    labels = np.zeros((10, 10), np.uint8)
    labels[:, :] = AREA_MARK
    plan = MaskPlan({"area_mark": area_pattern(5)})
    empty = np.zeros((10, 10), np.int32)
    kept = set(zip(*(a.tolist() for a in np.nonzero(retained_mask(MarkMap(labels, empty, []), plan)))))
    square_ok = kept == {(2, 2), (2, 7), (7, 2), (7, 7)}
    mismatches = 0
    for _ in range(1000):
        H, W = (int(v) for v in rng.integers(1, 60, 2))
        y0, x0 = int(rng.integers(0, H)), int(rng.integers(0, W))
        y1, x1 = int(rng.integers(y0 + 1, H + 1)), int(rng.integers(x0 + 1, W + 1))
        n = int(rng.choice([1, 3, 5, 7, 9, 11, 13]))
        kind = "area" if rng.random() < 0.5 else "line"
        pat = area_pattern(n) if kind == "area" else line_pattern(n)
        lab = np.zeros((H, W), np.uint8)
        lab[y0:y1, x0:x1] = AREA_MARK
        got = retained_mask(MarkMap(lab, np.zeros((H, W), np.int32), []),
                            MaskPlan({"area_mark": pat}))
        yy, xx = np.mgrid[:H, :W]
        c = n // 2
        if kind == "area":
            tile = (yy % n == c) & (xx % n == c)
        else:
            tile = (yy % n == c) | (xx % n == c) | ((abs(yy % n - c) <= 1) & (abs(xx % n - c) <= 1))
        inside = (yy >= y0) & (yy < y1) & (xx >= x0) & (xx < x1)
        mismatches += not np.array_equal(got, inside & tile)
    record(3, "masking exactness", square_ok and mismatches == 0,
           f"10x10/n=5 kept {sorted(kept)}, {mismatches} mismatches on 1000 rectangles")


def test_c04_contrast_exactness(corpus24):
    charts = {name: (img, gt) for name, img, gt in corpus24}
    worst, bg_ok = 0.0, True
    for name in ("bar_00", "pie_00", "scatter_00", "line_00"):
        img, _ = charts[name]
        for c in (0, 25, 50, 75, 100):
            res = transform(img, {"chartType": name.split("_")[0], "contrast": c},
                            analyze=False, distances=())
            L = lightness(res.image)[res.retained]
            worst = max(worst, float(np.abs(L - (100 - c)).max()))
            bg = res.marks.labels == BACKGROUND
            bg_ok &= np.array_equal(res.image[bg], img[bg])
    record(4, "contrast exactness", worst <= 0.5 and bg_ok,
           f"max |L* - (100 - c)| = {worst:.3f} (limit 0.5), background identical: {bg_ok}")


def test_c05_li_oracle():
    mismatches = sum(li_threshold_from_histogram(h) != li_oracle(h.tolist())
                     for h in random_histograms(1000, seed=2024))
    record(5, "Li threshold oracle", mismatches == 0, f"{mismatches} mismatches on 1000 histograms")


def test_c06_thinning():
    failures = []
    for i, m in enumerate(shape_suite()):
        sk = skeletonize(m)
        if (sk & ~m).any() or not np.array_equal(skeletonize(sk), sk) or ncomp(sk) != ncomp(m):
            failures.append(i)
    bar = np.zeros((13, 106), bool)
    bar[3:10, 3:103] = True
    w = measure_stroke_width(bar)
    record(6, "thinning invariants", not failures and abs(w - 7) <= 1,
           f"{50 - len(failures)}/50 shapes pass, 100x7 bar width {w:g} (7 +- 1)")


def test_c07_line_continuity(corpus24):
    preset = load_preset("line")
    lines = [(img, gt) for name, img, gt in corpus24 if name.startswith("line")]
    fine = [polyline_gap(img, gt, preset, "fine") for img, gt in lines]
    coarse = [polyline_gap(img, gt, preset, "coarse") for img, gt in lines]
    ok = max(fine) <= preset.line_mask_n and max(coarse) > preset.line_mask_n
    record(7, "line continuity", ok,
           f"fine gaps {fine} (limit {preset.line_mask_n}), coarse gaps {coarse} (must exceed once)")


def test_c08_visibility_dichotomy():
    rows, ok = [], True
    for name in ("bar", "pie", "scatter", "line"):
        p = load_preset(name)
        v = {d: predict_visibility(p, ViewingGeometry(d, PPI)) for d in (30, 60, 90)}
        good = (v[30].verdict == "visible" and v[90].verdict == "invisible"
                and v[60].margin < v[30].margin and v[90].margin < v[60].margin)
        ok &= good
        rows.append(f"{name} {v[30].verdict}@30/{v[90].verdict}@90 "
                    f"margins {v[30].margin:.3f},{v[60].margin:.3f},{v[90].margin:.3f}")
    record(8, "visibility dichotomy", ok, "; ".join(rows))


def test_c09_determinism(corpus24):
    charts = {name: img for name, img, _ in corpus24}
    distinct = {}
    for name in ("bar_00", "pie_00", "scatter_00", "line_00"):
        outs = {png_bytes(charts[name], name.split("_")[0], threads=t) for t in (1, 1, 1, 8)}
        distinct[name] = len(outs)
    record(9, "determinism", all(v == 1 for v in distinct.values()),
           f"distinct outputs per chart over 3 runs + 8 threads: {distinct}")


def test_c10_runtime():
    img, _ = generate(ChartSpec("bar", width=1080, height=2400), 10)
    transform(img, "bar")                       # warm caches and lookup tables
    times = []
    for _ in range(3):
        start = time.perf_counter()
        transform(img, "bar")
        times.append(time.perf_counter() - start)
    best = min(times)
    record(10, "end-to-end runtime", best < 2.0,
           f"1080x2400 transform {best:.2f} s (best of 3, limit 2 s)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
