"""Result documents: one ``#``-prefixed manifest line, then a JSON body."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__


def now_utc() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    config: dict
    seed: int | None = None
    version: str = __version__
    started: str = field(default_factory=now_utc)
    finished: str | None = None
    wall_clock: float | None = None
    inputs: dict[str, str] = field(default_factory=dict)

    def header_line(self) -> str:
        return "# " + json.dumps(asdict(self), sort_keys=True)


def encode_complex(z: complex) -> list[float]:
    return [float(f"{z.real:.12g}") + 0.0, float(f"{z.imag:.12g}") + 0.0]


def write_document(path: str | Path, manifest: RunManifest, body: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = manifest.header_line() + "\n" + json.dumps(body, indent=2, sort_keys=True) + "\n"
    path.write_text(text, encoding="utf-8")
    return path


def read_document(path: str | Path) -> tuple[dict, dict]:
    text = Path(path).read_text(encoding="utf-8")
    first, _, rest = text.partition("\n")
    if not first.startswith("#"):
        raise ValueError(f"{path} does not start with a manifest line")
    return json.loads(first[1:]), json.loads(rest)


def write_records_csv(path: str | Path, records) -> Path:
    """Flat CSV derived from sweep records; the JSONL file stays primary."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["assignment_index", "sigma", "probability", "rank", "rank_deficient", "converged"])
        for r in records:
            w.writerow(
                [r.assignment_index, " ".join(r.sigma), r.probability, r.rank, int(r.rank_deficient), int(r.converged)]
            )
    return path
