import os
import tempfile

OUT = os.environ.get("PRIVSHADE_DEMO_OUT") or os.path.join(tempfile.gettempdir(), "privshade-demos")
os.makedirs(OUT, exist_ok=True)


def path(name):
    return os.path.join(OUT, name)
