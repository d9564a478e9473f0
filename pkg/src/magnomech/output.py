"""Deterministic artifact serialization.

Every file carries a metadata header (preset, config hash, unit system,
column names) and a data section whose bytes depend only on the inputs:
no timestamps, no environment echoes, platform-stable float formatting.
CSV metadata lines start with '#'; the data section is everything after
them. JSON artifacts hold {"metadata": ..., "data": ...} with sorted keys.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

UNITS_NOTE = "rates in Hz-as-labeled (2e7 means a 20 MHz rate); hbar = 1"


def config_hash(config, run_params=None) -> str:
    payload = {"config": config.to_dict(), "run": run_params or {}}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _fmt(value):
    # normalize numpy scalars first: their repr is not stable across versions
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, np.integer):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def metadata_block(command, preset, config, run_params=None, extra=None):
    meta = {
        "tool": "magnomech " + command,
        "preset": preset or "(none)",
        "config_hash": config_hash(config, run_params),
        "units": UNITS_NOTE,
    }
    if extra:
        meta.update(extra)
    return meta


def write_csv(path, columns, rows, metadata):
    """Write a CSV artifact: '#'-prefixed metadata header, then the data section."""
    lines = [f"# {key}: {value}" for key, value in metadata.items()]
    lines.append(f"# columns: {','.join(columns)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path, data, metadata):
    with open(path, "w", newline="") as fh:
        json.dump({"metadata": metadata, "data": data}, fh, sort_keys=True, indent=2)
        fh.write("\n")


def data_section(path) -> bytes:
    """The artifact bytes that the determinism contract covers."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.endswith(".json") or raw.lstrip()[:1] == b"{":
        obj = json.loads(raw)
        return json.dumps(obj.get("data"), sort_keys=True).encode()
    return b"\n".join(line for line in raw.split(b"\n") if not line.startswith(b"#"))
