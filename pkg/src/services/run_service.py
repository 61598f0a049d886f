"""Experiment-file parsing and run-directory persistence."""
import configparser
import csv
import json
import logging
import os
from datetime import datetime
from typing import Dict, List, Optional

from errors import ConfigError
from models import SECTION_KEYS, ExperimentConfig, RunRecord
from utils.helpers import content_hash, format_cell, parse_cell, plain

logger = logging.getLogger(__name__)

SUMMARY_FILE = 'summary.json'
PLOT_FILE = 'plot.gp'


class RunService:
    """Reads experiment files and writes run directories."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir

    # configuration

    def parse_sections(self, text: str) -> Dict[str, Dict[str, str]]:
        """`[section]` + `key = value` text into nested dicts; unknown names are errors."""
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
        try:
            parser.read_string(text)
        except configparser.Error as e:
            raise ConfigError(f"malformed experiment file: {e}") from e

        failures = []
        sections = {}
        for name in parser.sections():
            if name not in SECTION_KEYS:
                failures.append(f"unknown section [{name}]")
                continue
            allowed = SECTION_KEYS[name]
            values = {}
            for key, value in parser.items(name):
                if key not in allowed:
                    failures.append(f"unknown key '{key}' in [{name}]")
                values[key] = value.strip()
            sections[name] = values
        if failures:
            raise ConfigError("; ".join(failures), failures)
        return sections

    def load_config(self, path: Optional[str]) -> ExperimentConfig:
        """Parse an experiment file; no path gives the canonical defaults."""
        text = ''
        if path is not None:
            try:
                with open(path, 'r', encoding='utf-8') as handle:
                    text = handle.read()
            except OSError as e:
                raise ConfigError(f"cannot read experiment file {path}: {e}") from e
        sections = self.parse_sections(text)
        try:
            config = ExperimentConfig.from_sections(sections)
        except (KeyError, ValueError) as e:
            raise ConfigError(f"invalid experiment value: {e}", [str(e)]) from e
        logger.debug(f"Loaded experiment config from {path or '<defaults>'}")
        return config

    def config_hash(self, config: ExperimentConfig) -> str:
        return content_hash(config.to_dict())

    # run directories

    def start_run(self, command: str, config: ExperimentConfig) -> RunRecord:
        """Create `<out>/<command>-<hash[:12]>` and the record that tracks it."""
        echo = config.to_dict()
        digest = content_hash(echo)
        run_dir = os.path.join(self.out_dir, f"{command}-{digest[:12]}")
        os.makedirs(run_dir, exist_ok=True)
        logger.info(f"Run directory {run_dir}")
        return RunRecord(command=command, config=echo, config_hash=digest,
                         started_at=datetime.now(), run_dir=run_dir)

    def write_csv(self, record: RunRecord, name: str, rows: List[dict],
                  columns: Optional[List[str]] = None) -> str:
        """Header row plus one line per row; floats at 17 significant digits."""
        columns = columns or (list(rows[0].keys()) if rows else [])
        path = os.path.join(record.run_dir, name)
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_cell(row.get(column)) for column in columns])
        record.outputs[name] = 'csv'
        logger.debug(f"Wrote {len(rows)} rows to {path}")
        return path

    def read_csv(self, path: str) -> List[dict]:
        """Rows of a written CSV with numbers parsed back."""
        with open(path, 'r', encoding='utf-8', newline='') as handle:
            reader = csv.DictReader(handle)
            return [{key: parse_cell(value) for key, value in row.items()} for row in reader]

    def write_plot(self, record: RunRecord) -> str:
        """gnuplot script with one plot per CSV, first column against the others."""
        path = os.path.join(record.run_dir, PLOT_FILE)
        lines = ["set datafile separator ','", "set key autotitle columnhead", "set grid"]
        for name in sorted(n for n, kind in record.outputs.items() if kind == 'csv'):
            with open(os.path.join(record.run_dir, name), 'r', encoding='utf-8') as handle:
                header = handle.readline().strip().split(',')
            stem = os.path.splitext(name)[0]
            lines.append("set terminal pngcairo size 900,600")
            lines.append(f"set output '{stem}.png'")
            lines.append(f"set xlabel '{header[0]}'")
            curves = [f"'{name}' using 1:{k + 1} with linespoints"
                      for k in range(1, len(header))
                      if header[k] not in ('method', 'error')]
            lines.append("plot " + ", ".join(curves) if curves else f"# {name}: nothing to plot")
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write("\n".join(lines) + "\n")
        record.outputs[PLOT_FILE] = 'gnuplot'
        return path

    def summary_hash(self, record: RunRecord) -> str:
        """Hash of the config echo and summary scalars, timestamps excluded."""
        return content_hash({'config': record.config, 'summary': record.summary})

    def finish_run(self, record: RunRecord, summary: dict, passed: bool) -> RunRecord:
        """Write plot.gp and summary.json and seal the record."""
        record.summary = plain(summary)
        record.passed = bool(passed)
        record.summary_hash = self.summary_hash(record)
        self.write_plot(record)
        record.outputs[SUMMARY_FILE] = 'json'
        record.finished_at = datetime.now()
        path = os.path.join(record.run_dir, SUMMARY_FILE)
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(record.to_dict(), handle, sort_keys=True, indent=2)
            handle.write("\n")
        logger.info(f"Run {record.command} finished: passed={record.passed}, "
                    f"summary_hash={record.summary_hash[:12]}")
        return record

    def load_record(self, run_dir: str) -> RunRecord:
        with open(os.path.join(run_dir, SUMMARY_FILE), 'r', encoding='utf-8') as handle:
            record = RunRecord.from_dict(json.load(handle))
        record.run_dir = run_dir
        return record
