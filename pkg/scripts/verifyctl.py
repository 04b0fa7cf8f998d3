# verifyctl.py - Command-line front end for the verification suites
from configparser import ConfigParser, Error as ConfigParserError
from pathlib import Path
from typing import Any, Dict, Mapping, Optional
import functools
import logging
import os
import re
import sys

import click
from rich.console import Console
from rich.table import Table

# Project root, for direct `python scripts/verifyctl.py` invocation
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..'))

from config import CONFIG_SECTION, KERNEL_NAMES, LOG_LEVEL, SUITE_NAMES
from cylinder import ConfigError, CylinderError, __version__
from cylinder.kernels import dump_kernel_csv
from cylinder.suites import SUITE_DESCRIPTIONS, RunConfig, SuiteReport, run_suite
from utils import atomic_write_text, configure_logging, sanitize_path, validate_kernel_name, validate_suite_names

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

# CLI flag -> RunConfig field
FLAG_FIELDS = {
    "n_max": "n_max",
    "k_trunc": "K",
    "hbar_order": "hbar_trunc",
    "band_limit": "band_limit",
    "seed": "seed",
    "out_dir": "output_dir",
}

# Any section header line, possibly after comments or blank lines
SECTION_HEADER = re.compile(r"^\s*\[", re.M)


def _read_ini(path: Path) -> Dict[str, str]:
    """Flat key = value pairs; the [run] header is optional."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot read config file {path}: {e}")
        raise ConfigError("config", f"cannot read {path}: {e}") from None
    if not SECTION_HEADER.search(text):
        text = f"[{CONFIG_SECTION}]\n{text}"
    parser = ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
        unknown = [s for s in parser.sections() if s != CONFIG_SECTION]
        if unknown:
            raise ConfigError(unknown[0], f"unknown section; only [{CONFIG_SECTION}] is read")
        if not parser.has_section(CONFIG_SECTION):
            return {}
        return dict(parser.items(CONFIG_SECTION))
    except ConfigParserError as e:
        logger.error(f"Malformed config file {path}: {e}")
        raise ConfigError("config", f"malformed file {path}: {e.message}") from None


def parse_config(path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Effective RunConfig with precedence flags > file > defaults."""
    values: Dict[str, Any] = _read_ini(path) if path else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            values[FLAG_FIELDS.get(key, key)] = value
    cfg = RunConfig.build(**values)
    logger.debug(f"Effective configuration: {cfg.report_dict()}")
    return cfg


def dump_config(cfg: RunConfig) -> str:
    """INI text that parse_config reads back to an identical RunConfig."""
    lines = [f"[{CONFIG_SECTION}]"]
    for key, value in cfg.report_dict().items():
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _summary_table(report: SuiteReport) -> Table:
    passed = sum(1 for c in report.checks if c.passed)
    table = Table(title=f"{report.suite_name}: {passed}/{len(report.checks)} passed")
    table.add_column("Check")
    table.add_column("Kind")
    table.add_column("Expected")
    table.add_column("Actual")
    table.add_column("ms", justify="right")
    # Show failures first, then a short sample of passes.
    shown = report.failures + [c for c in report.checks if c.passed][:5]
    for c in shown:
        status = "[green]✔[/green]" if c.passed else "[red]✘[/red]"
        table.add_row(f"{status} {c.check_id}", c.kind.value, c.expected, c.actual, str(c.runtime_ms))
    return table


def run_options(func):
    """Flags shared by commands that build a RunConfig."""

    @click.option("--n-max", type=int, default=None, help="Largest |n| in mode tables")
    @click.option("--k-trunc", type=int, default=None, help="Mode truncation K for B_n")
    @click.option("--hbar-order", type=int, default=None, help="ħ truncation order")
    @click.option("--band-limit", type=int, default=None, help="Band limit of sampled configurations")
    @click.option("--seed", type=int, default=None, help="Seed for randomized checks")
    @click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="INI config file")
    @click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Report directory")
    @functools.wraps(func)
    def wrapper(*args, config_path=None, **kwargs):
        flags = {key: kwargs.pop(key) for key in FLAG_FIELDS}
        ctx = click.get_current_context()
        try:
            cfg = parse_config(sanitize_path(config_path) if config_path else None, flags)
        except ConfigError as e:
            click.echo(f"❌ Invalid configuration: {e}", err=True)
            ctx.exit(EXIT_USAGE)
        return func(*args, cfg=cfg, **kwargs)

    return wrapper


@click.group()
@click.version_option(__version__)
@click.option("--log-level", default=LOG_LEVEL, help="Logging level")
def cli(log_level):
    """Verification harness for the cylinder star-algebra engine."""
    configure_logging(log_level)


@cli.command()
@click.argument("suites", nargs=-1, required=True)
@run_options
@click.option("--format", "fmt", type=click.Choice(["json"]), default="json", help="Report format")
@click.option("--no-timing", is_flag=True, help="Write runtime_ms as 0 for byte-identical reports")
def verify(suites, cfg: RunConfig, fmt, no_timing):
    """Run the named suites and write one report per suite."""
    ctx = click.get_current_context()
    try:
        validate_suite_names(list(suites))
    except ValueError as e:
        click.echo(f"❌ {e}", err=True)
        ctx.exit(EXIT_USAGE)

    console = Console()
    failed = []
    for name in suites:
        try:
            report = run_suite(name, cfg)
        except CylinderError as e:
            click.echo(f"❌ Suite {name} could not run: {e}", err=True)
            ctx.exit(EXIT_USAGE)
        path = Path(cfg.output_dir) / f"{name}.{fmt}"
        try:
            atomic_write_text(path, report.to_json(include_timing=not no_timing))
        except OSError as e:
            click.echo(f"❌ Cannot write report {path}: {e}", err=True)
            ctx.exit(EXIT_USAGE)
        console.print(_summary_table(report))
        if report.all_passed:
            click.echo(f"✅ {name}: all {len(report.checks)} checks passed ({path})")
        else:
            failed.append(name)
            click.echo(f"❌ {name}: {len(report.failures)} of {len(report.checks)} checks failed ({path})", err=True)
    ctx.exit(EXIT_CHECK_FAILED if failed else EXIT_OK)


@cli.command("dump-kernel")
@click.argument("name")
@click.option("--grid", type=int, default=256, help="Points per axis")
@click.option("--out", "out", type=click.Path(dir_okay=False), default=None, help="CSV output path")
def dump_kernel(name, grid, out):
    """Write a kernel on a grid of separations as CSV."""
    ctx = click.get_current_context()
    try:
        validate_kernel_name(name)
        path = sanitize_path(out) if out else Path(f"{name}.csv")
        dump_kernel_csv(name, grid, path)
    except ValueError as e:
        click.echo(f"❌ {e}", err=True)
        ctx.exit(EXIT_USAGE)
    except OSError as e:
        click.echo(f"❌ Cannot write {out}: {e}", err=True)
        ctx.exit(EXIT_USAGE)
    click.echo(f"✅ Wrote {grid * grid} rows of {name} to {path}")


@cli.command("list-suites")
def list_suites():
    """Show the registered suites."""
    table = Table(title="Verification suites")
    table.add_column("Suite", style="cyan")
    table.add_column("Checks")
    for name in SUITE_NAMES:
        table.add_row(name, SUITE_DESCRIPTIONS.get(name, ""))
    Console().print(table)


@cli.command("dump-config")
@run_options
@click.option("--out", "out", type=click.Path(dir_okay=False), default=None, help="Write to a file instead of stdout")
def dump_config_cmd(cfg: RunConfig, out):
    """Print or write the effective configuration as INI text."""
    text = dump_config(cfg)
    if out is None:
        click.echo(text, nl=False)
        return
    path = sanitize_path(out)
    atomic_write_text(path, text)
    click.echo(f"✅ Configuration written to {path}")


if __name__ == "__main__":
    cli()
