# coding: utf-8

# # The same thing from a shell
#
# `privshade` ships a command line tool. Here it is driven through `main`, which
# takes an argv list and returns the exit code, so the demo needs no subprocess.

import json
import os

from privshade.cli import main
from _out import OUT, path

corpus_dir = path("corpus")
print(main(["gen-corpus", "--out", corpus_dir, "--types", "bar,line", "--count", "2", "--seed", "5"]))
pngs = sorted(f for f in os.listdir(corpus_dir) if f.endswith(".png"))
print(pngs)

args = ["transform", "--chart", "line", "--out-dir", path("masked"), "--report", path("report.json")]
for f in pngs:
    if f.startswith("line") and not f.endswith(".labels.png"):
        args += ["--in", os.path.join(corpus_dir, f)]
print(main(args))

report = json.load(open(path("report.json")))
first = report[0] if isinstance(report, list) else report
print(json.dumps(first["spectral"], indent=1))

# Errors come back as one line of JSON on stderr and a non-zero exit code.

print(main(["predict-visibility", "--chart", "histogram"]))
print("outputs under", OUT)
