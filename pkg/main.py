"""
Command-line entry point for the part-level action parsing toolkit.

One executable with subcommands for every pipeline stage. Exit codes:
0 on success, 1 on validation failure, 2 on usage error.
"""

from pathlib import Path

import click
from click.core import ParameterSource

from commands import configure_logging, register_commands
from pap import config
from pap.config import GLOBAL_KEYS, RunConfig, default_map, load_config_file
from pap.validation import ValidationError

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


class PapGroup(click.Group):
    """Click group that turns ValidationError into exit code 1."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ValidationError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(1)


@click.group(cls=PapGroup, context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--seed", type=click.IntRange(min=0), default=config.SEED, show_default=True,
              help="Seed of every random stream.")
@click.option("--jobs", type=click.IntRange(min=1), default=config.JOBS, show_default=True,
              help="Worker parallelism; results do not depend on it.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="TOML or JSON file of defaults; flags override it.")
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=config.LOG_LEVEL,
              show_default=True)
@click.pass_context
def cli(ctx, seed, jobs, config_path, log_level):
    """Part-level action parsing: data tooling, pseudo labels and scoring."""
    configure_logging(log_level)
    settings = {"seed": seed, "jobs": jobs}
    if config_path is not None:
        data = load_config_file(config_path)
        for key in GLOBAL_KEYS:
            if key in data and ctx.get_parameter_source(key) is ParameterSource.DEFAULT:
                settings[key] = data[key]
        ctx.default_map = default_map(data, cli.commands)
    ctx.obj = RunConfig(seed=settings["seed"], jobs=settings["jobs"], config_path=config_path)


register_commands(cli)


if __name__ == "__main__":
    cli()
