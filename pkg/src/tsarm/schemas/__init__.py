"""JSON schemas for every report the CLI writes."""

import json
from functools import lru_cache
from importlib import resources

import jsonschema

NAMES = ("recommendation", "benchmark", "profile", "evaluation", "ranking")


@lru_cache(maxsize=None)
def load(name):
    if name not in NAMES:
        raise KeyError(name)
    text = resources.files(__name__).joinpath(f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(obj, name):
    """Raise ``jsonschema.ValidationError`` if ``obj`` does not match ``name``."""
    jsonschema.validate(obj, load(name))
    return obj
