"""Command-line front end. Reports are JSON, errors are one JSON line on stderr."""
import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

from .corpus import CHART_TYPES as CORPUS_TYPES, write_corpus
from .errors import ConfigError, PrivshadeError, UnknownChartTypeError
from .perception import (DEFAULT_DISTANCES, DEFAULT_PPI, CsfModel, ViewingGeometry,
                         predict_visibility, simulate_view)
from .pipeline import CHART_TYPES, load_preset, transform
from .raster import encode_png, read_png
from .segment import TextAnnotation, segment
from .spectral import frequency_summary, log_magnitude_image, magnitude_spectrum

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def write_atomic(path, data):
    """Write bytes or text next to ``path`` and rename into place."""
    if isinstance(data, str):
        data = data.encode()
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(doc, path=None):
    if path:
        write_atomic(path, _dump(doc))
    else:
        sys.stdout.write(_dump(doc))


def build_parser():
    p = _Parser(prog="privshade", description=__doc__)
    p.add_argument("--config", help="JSON file of defaults; explicit flags win")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def viewing(sp, many=True):
        if many:
            sp.add_argument("--distance", type=float, action="append",
                            help="viewing distance in cm (repeatable)")
        else:
            sp.add_argument("--distance", type=float, help="viewing distance in cm")
        sp.add_argument("--ppi", type=float, help=f"display density (default {DEFAULT_PPI})")

    t = sub.add_parser("transform", help="mask and fade a chart image")
    t.add_argument("--chart", help="bar, pie, scatter or line")
    t.add_argument("--in", dest="inputs", action="append", help="input PNG (repeatable)")
    t.add_argument("--out", help="output PNG for a single input")
    t.add_argument("--out-dir", help="output directory for batch runs")
    t.add_argument("--granularity", choices=("fine", "coarse"))
    t.add_argument("--text-annotations", help="JSON text boxes; skips text detection")
    t.add_argument("--preset", help="preset name or JSON overrides file")
    t.add_argument("--report", help="write the JSON report here")
    t.add_argument("--threads", type=int, help="worker threads")
    viewing(t)

    a = sub.add_parser("analyze-frequency", help="spectral summary of a PNG")
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--spectrum", help="write a log-magnitude PNG here")
    a.add_argument("--report", help="write the JSON here instead of stdout")

    v = sub.add_parser("predict-visibility", help="CSF verdict for a preset")
    v.add_argument("--chart")
    v.add_argument("--preset")
    v.add_argument("--granularity", choices=("fine", "coarse"))
    v.add_argument("--report")
    viewing(v)

    s = sub.add_parser("simulate-view", help="render what a distant viewer resolves")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    viewing(s, many=False)

    g = sub.add_parser("segment", help="dump mark labels for debugging")
    g.add_argument("--in", dest="input", required=True)
    g.add_argument("--out", help="label PNG (gray = label * 60)")
    g.add_argument("--report", help="component JSON; stdout if omitted")
    g.add_argument("--text-annotations")
    g.add_argument("--threads", type=int)

    c = sub.add_parser("gen-corpus", help="write the synthetic chart corpus")
    c.add_argument("--out", required=True)
    c.add_argument("--types", help="comma-separated chart types")
    c.add_argument("--count", type=int)
    c.add_argument("--seed", type=int)
    return p


_CONFIG_KEYS = {"chart", "granularity", "distances", "ppi", "preset", "textAnnotations",
                "threads", "seed", "count", "types", "csf"}


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return doc


def _merge(args, cfg):
    """Fill flags left unset from the config file, then from built-in defaults."""
    def pick(attr, key, default):
        if getattr(args, attr, None) is None:
            setattr(args, attr, cfg.get(key, default))
    pick("granularity", "granularity", "fine")
    pick("ppi", "ppi", DEFAULT_PPI)
    pick("threads", "threads", 1)
    pick("chart", "chart", None)
    pick("preset", "preset", None)
    pick("text_annotations", "textAnnotations", None)
    pick("seed", "seed", 42)
    pick("count", "count", 6)
    if args.command == "simulate-view":
        pick("distance", "distance", 60.0)
    elif hasattr(args, "distance"):
        pick("distance", "distances", list(DEFAULT_DISTANCES))
    if getattr(args, "types", 0) is None:
        args.types = cfg.get("types", ",".join(CORPUS_TYPES))
    args.csf = CsfModel.from_dict(cfg["csf"]) if "csf" in cfg else CsfModel()
    return args


def _preset(args):
    if args.chart is not None and args.chart not in CHART_TYPES:
        raise UnknownChartTypeError(args.chart, CHART_TYPES)
    if args.preset is None:
        if args.chart is None:
            raise UsageError("--chart or --preset is required")
        return load_preset(args.chart)
    if isinstance(args.preset, dict):
        return load_preset(args.preset, args.chart)
    if args.preset.endswith(".json") and os.path.exists(args.preset):
        try:
            with open(args.preset) as fh:
                doc = json.load(fh)
        except ValueError as exc:
            raise ConfigError(f"preset file is not JSON: {exc}") from exc
        return load_preset(doc, args.chart)
    return load_preset(args.preset)


def _text(args, shape=None):
    if not args.text_annotations:
        return None
    ann = TextAnnotation.load(args.text_annotations)
    if shape is not None:
        ann.validate(shape)
    return ann


def _transform_one(args, preset, src, dst):
    img = read_png(src)
    res = transform(img, preset, text=_text(args, img.shape[:2]), granularity=args.granularity,
                    distances=args.distance, ppi=args.ppi, csf=args.csf, threads=args.threads)
    write_atomic(dst, encode_png(res.image))
    res.report.input_path, res.report.output_path = src, dst
    return res.report.to_dict()


def cmd_transform(args):
    if not args.inputs:
        raise UsageError("transform needs --in")
    batch = len(args.inputs) > 1 or args.out_dir is not None
    if batch and args.out_dir is None:
        raise UsageError("several inputs need --out-dir")
    if not batch and args.out is None:
        raise UsageError("transform needs --out or --out-dir")
    if args.out and args.out_dir:
        raise UsageError("--out and --out-dir are exclusive")
    preset = _preset(args)
    if not batch:
        reports = [_transform_one(args, preset, args.inputs[0], args.out)]
    else:
        dsts = [os.path.join(args.out_dir, os.path.basename(p)) for p in args.inputs]
        if len(set(dsts)) != len(dsts):
            raise ConfigError("batch inputs share a file name")
        with ThreadPoolExecutor(max(1, args.threads)) as pool:
            reports = list(pool.map(lambda sd: _transform_one(args, preset, *sd),
                                    zip(args.inputs, dsts)))
    if args.report:
        write_atomic(args.report, _dump(reports[0] if not batch else reports))
    return EXIT_OK


def cmd_analyze_frequency(args):
    img = read_png(args.input)
    doc = frequency_summary(img)
    if args.spectrum:
        write_atomic(args.spectrum, encode_png(log_magnitude_image(magnitude_spectrum(img))))
    _emit(doc, args.report)
    return EXIT_OK


def cmd_predict_visibility(args):
    preset = _preset(args)
    reports = [predict_visibility(preset, ViewingGeometry(d, args.ppi), args.csf,
                                  args.granularity).to_dict()
               for d in args.distance]
    _emit({"preset": preset.to_dict(), "ppi": args.ppi, "reports": reports}, args.report)
    return EXIT_OK


def cmd_simulate_view(args):
    img = read_png(args.input)
    out = simulate_view(img, ViewingGeometry(args.distance, args.ppi), args.csf)
    write_atomic(args.out, encode_png(out))
    return EXIT_OK


def cmd_segment(args):
    img = read_png(args.input)
    marks, bg, text = segment(img, _text(args, img.shape[:2]), threads=args.threads)
    doc = {"background": [int(v) for v in bg], "text_source": text.source,
           "counts": marks.counts(), "components": [c.to_dict() for c in marks.components]}
    if args.out:
        g = (marks.labels.astype("uint16") * 60).clip(0, 255).astype("uint8")
        write_atomic(args.out, encode_png(g[..., None].repeat(3, axis=2)))
    _emit(doc, args.report)
    return EXIT_OK


def cmd_gen_corpus(args):
    types = tuple(t.strip() for t in args.types.split(",") if t.strip())
    for t in types:
        if t not in CORPUS_TYPES:
            raise UnknownChartTypeError(t, CORPUS_TYPES)
    names = write_corpus(args.out, types, args.count, args.seed)
    _emit({"out": args.out, "charts": names})
    return EXIT_OK


COMMANDS = {
    "transform": cmd_transform,
    "analyze-frequency": cmd_analyze_frequency,
    "predict-visibility": cmd_predict_visibility,
    "simulate-view": cmd_simulate_view,
    "segment": cmd_segment,
    "gen-corpus": cmd_gen_corpus,
}


def _fail(doc, code):
    sys.stderr.write(json.dumps(doc, sort_keys=True) + "\n")
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        args = _merge(args, load_config(args.config))
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail({"error": "usage", "message": str(exc)}, EXIT_USAGE)
    except PrivshadeError as exc:
        return _fail(exc.to_dict(), EXIT_FAIL)
    except OSError as exc:
        return _fail({"error": "io", "message": str(exc)}, EXIT_FAIL)


if __name__ == "__main__":
    sys.exit(main())
