"""Run manifests: what was run, with which inputs, producing which files.

Timestamps live here and nowhere else, so data files stay reproducible.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .. import __version__
from ..efie import kernels

MANIFEST_NAME = "manifest.json"


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """Inventory of a single CLI invocation.

    ``config_sha256`` is the hash of the raw config bytes as read, so it can
    be recomputed from the input file alone.
    """

    command: str
    config_sha256: str | None = None
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    started: str = field(default_factory=_now)
    finished: str | None = None
    tool_version: str = __version__
    environment: dict = field(default_factory=lambda: {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "kernels": kernels.BACKEND,
    })

    def add_input(self, path) -> None:
        p = Path(path)
        self.inputs.append({"path": str(p), "sha256": file_sha256(p)})

    def add_outputs(self, paths, root=None) -> None:
        for path in paths:
            p = Path(path)
            name = str(p.relative_to(root)) if root is not None else str(p)
            self.outputs.append({"path": name, "sha256": file_sha256(p),
                                 "bytes": p.stat().st_size})

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    def write(self, out_dir) -> Path:
        self.finished = _now()
        path = Path(out_dir) / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
