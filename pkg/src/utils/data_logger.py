"""
Data Logger
==========

Logging setup and result files: every scenario result is written as CSV
preceded by a comment block holding the run manifest and the full resolved
config, so each file describes how it was produced.
"""

import io
import logging
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import pandas as pd
import yaml

from .config_loader import ConfigError, parse_config

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
FLOAT_FORMAT = '%.12g'

MANIFEST_MARK = '# --- manifest ---'
CONFIG_MARK = '# --- config ---'
END_MARK = '# --- end ---'


def setup_logging(level='INFO', log_file=None):
    """Configure root logging: stderr always, plus a file when requested."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


@dataclass(frozen=True)
class RunManifest:
    """Provenance of one result file."""

    scenario: str
    config_path: Optional[str]
    output_path: Optional[str]
    started: str
    elapsed_seconds: float
    version: str

    @classmethod
    def from_result(cls, result, config_path=None, output_path=None):
        return cls(
            scenario=result.config.scenario,
            config_path=None if config_path is None else str(config_path),
            output_path=None if output_path is None else str(output_path),
            started=result.started,
            elapsed_seconds=round(float(result.elapsed), 3),
            version=result.version,
        )


def _comment(text):
    return ''.join(f"# {line}\n" for line in text.splitlines())


def format_result(result, manifest: Optional[RunManifest] = None) -> str:
    """Full file content: manifest, config echo, then the CSV table."""
    manifest = manifest or RunManifest.from_result(result)
    buffer = io.StringIO()
    buffer.write(MANIFEST_MARK + '\n')
    buffer.write(_comment(yaml.safe_dump(asdict(manifest), sort_keys=False)))
    buffer.write(CONFIG_MARK + '\n')
    buffer.write(_comment(result.config.to_yaml()))
    buffer.write(END_MARK + '\n')
    result.frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT)
    return buffer.getvalue()


def emit_csv(result, destination, manifest: Optional[RunManifest] = None):
    """
    Write a result to a path or an open text stream.

    Raises OSError when the destination cannot be written.
    """
    if hasattr(destination, 'write'):
        manifest = manifest or RunManifest.from_result(result)
        destination.write(format_result(result, manifest))
        return
    path = Path(destination)
    manifest = manifest or RunManifest.from_result(result, output_path=path)
    text = format_result(result, manifest)
    try:
        with open(path, 'w', newline='') as file:
            file.write(text)
    except OSError as e:
        logger.error(f"Cannot write results to {path}: {e}")
        raise
    logger.info(f"Results written to {path} ({len(result.frame)} rows)")


def _block(lines, start, end):
    try:
        first = lines.index(start) + 1
        last = lines.index(end, first)
    except ValueError:
        return None
    return '\n'.join(line[2:] for line in lines[first:last])


def read_result(path):
    """Read an emitted file back: (DataFrame, ScenarioConfig, manifest dict)."""
    with open(path, 'r') as file:
        text = file.read()
    header = [line for line in text.splitlines() if line.startswith('#')]
    manifest_text = _block(header, MANIFEST_MARK, CONFIG_MARK)
    config_text = _block(header, CONFIG_MARK, END_MARK)
    if config_text is None:
        raise ConfigError('config', f"{path} carries no embedded config echo")
    frame = pd.read_csv(io.StringIO(text), comment='#')
    manifest = yaml.safe_load(manifest_text) if manifest_text else {}
    return frame, parse_config(config_text), manifest
