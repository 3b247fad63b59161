"""
Output writers: deterministic JSON and CSV documents and the HTML verification report.
"""

import csv
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from jinja2 import Environment, FileSystemLoader

from . import get_template_path
from .checks import VerifyReport

logger = logging.getLogger(__name__)

jinja_env = Environment(loader=FileSystemLoader(get_template_path()), autoescape=True)


def dumps(data: Any) -> str:
    """JSON with sorted keys and a trailing newline, so reruns are byte-identical."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(path: Path, data: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data))
    logger.info(f"Wrote {path}")
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info(f"Wrote {path}")
    return path


def render_verify_report(report: VerifyReport) -> str:
    template = jinja_env.get_template("verify_report.html")
    return template.render(report=report)


def write_verify_report(path: Path, report: VerifyReport) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_verify_report(report))
    logger.info(f"Wrote {path}")
    return path
