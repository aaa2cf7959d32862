"""Content-addressed result cache for the command-line front end.

Entries are keyed by the SHA-256 of the canonical JSON of (operation,
config); the config always embeds the precision context, so results at
different precision never alias.  Corrupt entries are recomputed and
overwritten with a warning.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys

ENV_VAR = "MAASSJACOBI_CACHE_DIR"


def cache_dir() -> str:
    d = os.environ.get(ENV_VAR)
    if not d:
        d = os.path.join(os.path.expanduser("~"), ".cache", "maassjacobi")
    return d


def cache_key(operation: str, config: dict) -> str:
    payload = json.dumps({"operation": operation, "config": config},
                         sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def lookup(operation: str, config: dict):
    """Returns the cached result string or None."""
    path = os.path.join(cache_dir(), cache_key(operation, config) + ".json")
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            entry = json.load(fh)
        if entry.get("operation") != operation:
            raise ValueError("operation mismatch")
        return entry["result"]
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"warning: corrupt cache entry {path} ({exc}); recomputing",
              file=sys.stderr)
        return None


def store(operation: str, config: dict, result: str):
    d = cache_dir()
    os.makedirs(d, exist_ok=True)
    path = os.path.join(d, cache_key(operation, config) + ".json")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump({"operation": operation, "config": config, "result": result},
                  fh, sort_keys=True, separators=(",", ":"))
    os.replace(tmp, path)
