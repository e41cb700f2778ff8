#!/usr/bin/env python
import logging
import sys

import click
import rich.console
import rich.logging
import rich.traceback

import semcom_tools
import semcom_tools.experiment_config
import semcom_tools.run_experiment
import semcom_tools.utils
from semcom_tools.exceptions import SemcomToolsError

log = logging.getLogger()

# Set up rich stderr console
stderr = rich.console.Console(
    stderr=True, force_terminal=semcom_tools.utils.rich_force_colors()
)


def run_semcom_tools():

    # Set up the rich traceback
    rich.traceback.install(console=stderr, width=200, word_wrap=True, extra_lines=1)

    stderr.print(
        "[blue]    ___  ___  _   _  ___  ___  _   _          ",
        highlight=False,
    )
    stderr.print(
        "[blue]   / __|| __|| \\_/ |/ __|/ _ \\| \\_/ |  [grey39]z1 z2 .. zL",
        highlight=False,
    )
    stderr.print(
        "[blue]   \\__ \\| _| | |_| | (__| (_) | |_| |  [grey39]~~~~~~~~~~~",
        highlight=False,
    )
    stderr.print(
        "[blue]   |___/|___||_| |_|\\___|\\___/|_| |_|  [grey39]-> x^(Z_l)",
        highlight=False,
    )
    stderr.print(
        "\n" "[grey39]    semcom-tools version {}".format(semcom_tools.__version__),
        highlight=False,
    )

    # Lanch the click cli
    semcom_tools_cli()


# Customise the order of subcommands for --help
class CustomHelpOrder(click.Group):
    def __init__(self, *args, **kwargs):
        self.help_priorities = {}
        super(CustomHelpOrder, self).__init__(*args, **kwargs)

    def get_help(self, ctx):
        self.list_commands = self.list_commands_for_help
        return super(CustomHelpOrder, self).get_help(ctx)

    def list_commands_for_help(self, ctx):
        """reorder the list of commands when listing the help"""
        commands = super(CustomHelpOrder, self).list_commands(ctx)
        return (
            c[1]
            for c in sorted(
                (self.help_priorities.get(command, 1000), command)
                for command in commands
            )
        )

    def command(self, *args, **kwargs):
        """Behaves the same as `click.Group.command()` except capture
        a priority for listing command names in help.
        """
        help_priority = kwargs.pop("help_priority", 1000)
        help_priorities = self.help_priorities

        def decorator(f):
            cmd = super(CustomHelpOrder, self).command(*args, **kwargs)(f)
            help_priorities[cmd.name] = help_priority
            return cmd

        return decorator


@click.group(cls=CustomHelpOrder)
@click.version_option(semcom_tools.__version__)
@click.option(
    "-v",
    "--verbose",
    is_flag=True,
    default=False,
    help="Print verbose output to the console.",
)
@click.option(
    "-l", "--log-file", help="Save a verbose log to a file.", metavar="<filename>"
)
def semcom_tools_cli(verbose, log_file):

    # Set the base logger to output DEBUG
    log.setLevel(logging.DEBUG)

    # Set up logs to the console if we asked for verbose output
    if verbose:
        log.addHandler(
            rich.logging.RichHandler(
                level=logging.DEBUG,
                console=rich.console.Console(
                    stderr=True,
                    force_terminal=semcom_tools.utils.rich_force_colors(),
                ),
                show_time=False,
                markup=True,
            )
        )

    # Set up logs to a file if we asked for one
    if log_file:
        log_fh = logging.FileHandler(log_file, encoding="utf-8")
        log_fh.setLevel(logging.DEBUG)
        log_fh.setFormatter(
            logging.Formatter(
                "[%(asctime)s] %(name)-20s [%(levelname)-7s]  %(message)s"
            )
        )
        log.addHandler(log_fh)


def experiment_options(f):
    """Flags shared by every experiment; they override config values"""
    options = [
        click.option(
            "-c",
            "--config",
            "config_file",
            type=click.Path(),
            help="Experiment configuration file in yaml format",
        ),
        click.option(
            "-s",
            "--seed",
            type=click.IntRange(0, 2**64 - 1),
            help="Unsigned 64-bit seed of the trial random streams",
        ),
        click.option(
            "-t", "--trials", type=click.IntRange(min=1), help="Monte Carlo trials"
        ),
        click.option(
            "-w",
            "--workers",
            type=click.IntRange(min=1),
            help="Worker processes for the trials. Results do not depend on it",
        ),
        click.option(
            "-o",
            "--out",
            type=click.Path(dir_okay=False),
            help="Path of the csv file to write",
        ),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def launch_experiment(experiment, config_file, seed, trials, workers, out):
    if out is None:
        out = semcom_tools.utils.prompt_path(msg="Select the csv file to write")
    overrides = {"seed": seed, "n_trials": trials, "workers": workers}
    try:
        if config_file is None:
            config = semcom_tools.experiment_config.build_config(
                {}, experiment=experiment, overrides=overrides
            )
        else:
            config = semcom_tools.experiment_config.load_config(
                config_file, experiment=experiment, overrides=overrides
            )
        report = semcom_tools.run_experiment.run(config, out)
    except SemcomToolsError as e:
        log.error("%s failed: %s", experiment, e)
        stderr.print(f"[red] {e}")
        sys.exit(e.exit_code)
    click.echo(report.summary_line())


# codec profile
@semcom_tools_cli.command(help_priority=1)
@experiment_options
def codec_profile(config_file, seed, trials, workers, out):
    """Distortion after each prefix of prompt layers."""
    launch_experiment("codec-profile", config_file, seed, trials, workers, out)


# sweep snr
@semcom_tools_cli.command(help_priority=2)
@experiment_options
def sweep_snr(config_file, seed, trials, workers, out):
    """Mean distortion over a grid of average SNRs."""
    launch_experiment("sweep-snr", config_file, seed, trials, workers, out)


# broadcast
@semcom_tools_cli.command(help_priority=3)
@experiment_options
def broadcast(config_file, seed, trials, workers, out):
    """Per-user distortion when one transmission reaches several users."""
    launch_experiment("broadcast", config_file, seed, trials, workers, out)


# diversity
@semcom_tools_cli.command(help_priority=4)
@experiment_options
def diversity(config_file, seed, trials, workers, out):
    """K-of-M multimodal recovery probability."""
    launch_experiment("diversity", config_file, seed, trials, workers, out)


if __name__ == "__main__":
    run_semcom_tools()
