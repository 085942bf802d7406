"""Shipped defaults (presets, CSF parameters, text mask table)."""
import json
from importlib import resources


def load_defaults():
    with resources.files("privshade").joinpath("data/defaults.json").open() as fh:
        return json.load(fh)


DEFAULTS = load_defaults()


def text_mask_table(doc=None):
    rows = (doc or DEFAULTS)["text_mask_table"]
    return tuple((float("inf") if upper is None else float(upper), int(n)) for upper, n in rows)
