#!/usr/bin/env python
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import rich.console

import semcom_tools
import semcom_tools.broadcast
import semcom_tools.codec
import semcom_tools.diversity
import semcom_tools.utils
from semcom_tools.config_json import ConfigJson
from semcom_tools.exceptions import ConfigValidationError, ReportWriteError

log = logging.getLogger(__name__)
stderr = rich.console.Console(
    stderr=True,
    style="dim",
    highlight=False,
    force_terminal=semcom_tools.utils.rich_force_colors(),
)


@dataclass
class RunReport:
    experiment: str
    seed: int
    n_trials: int
    version: str
    config: dict
    heading: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "n_trials": self.n_trials,
            "version": self.version,
            "config": self.config,
            "columns": self.heading,
            "row_count": len(self.rows),
            "summary": self.summary,
        }

    def summary_line(self):
        details = ", ".join(
            f"{key}={_plain(value)}" for key, value in sorted(self.summary.items())
        )
        return (
            f"{self.experiment}: {len(self.rows)} rows, seed {self.seed}, "
            f"{self.n_trials} trials ({details})"
        )


def _plain(value):
    """Summary values as json friendly python scalars"""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _pmf_columns(num_layers):
    return [f"p_prefix_{k}" for k in range(num_layers + 1)]


def _quantile_column(q):
    return "distortion_q" + format(100.0 * q, "g").replace(".", "_")


class ExperimentRun:
    """Run one configured experiment and write its csv and report files"""

    def __init__(self, config, out_path):
        self.config = config
        self.out_path = out_path
        config_json = ConfigJson()
        self.common_columns = config_json.get_topic_data("csv", "common_columns")

    @staticmethod
    def float_format():
        return ConfigJson().get_topic_data("csv", "float_format")

    def _common(self):
        return [self.config.experiment, self.config.seed, self.config.n_trials]

    def _report(self, heading):
        return RunReport(
            experiment=self.config.experiment,
            seed=self.config.seed,
            n_trials=self.config.n_trials,
            version=semcom_tools.__version__,
            config=self.config.echo(),
            heading=self.common_columns + heading,
        )

    def codec_profile(self):
        config = self.config
        prompts = semcom_tools.codec.decompose(config.signal, config.plan.num_layers)
        profile = semcom_tools.codec.distortion_profile(
            config.signal, config.plan.num_layers
        )
        tail = semcom_tools.codec.tail_energy_profile(prompts)
        report = self._report(["layer", "distortion", "tail_energy"])
        for layer in range(len(profile)):
            report.rows.append(
                self._common() + [layer, float(profile[layer]), float(tail[layer])]
            )
        report.summary = {
            "distortion_0": float(profile[0]),
            "distortion_final": float(profile[profile.num_layers]),
            "nonincreasing": profile.is_nonincreasing(),
        }
        return report

    def sweep_snr(self):
        config = self.config
        curve = semcom_tools.broadcast.expected_distortion_curve(
            config.signal,
            config.plan,
            list(config.snr_grid_db),
            config.n_trials,
            config.seed,
            kind=config.channel.kind,
            workers=config.workers,
            chunk_size=config.chunk_size,
        )
        heading = ["avg_snr_db", "mean_distortion", "closed_form_distortion"]
        if config.baseline:
            heading.append("baseline_mean_distortion")
        report = self._report(heading + _pmf_columns(config.plan.num_layers))
        for point in curve:
            row = self._common() + [
                point.avg_snr_db,
                point.mean_distortion,
                point.closed_form_distortion,
            ]
            if config.baseline:
                row.append(point.baseline_mean_distortion)
            report.rows.append(row + [float(p) for p in point.prefix_pmf])
        order = np.argsort(config.snr_grid_db, kind="stable")
        means = [curve[i].mean_distortion for i in order]
        report.summary = {
            "grid_points": len(curve),
            "max_closed_form_gap": max(
                abs(p.mean_distortion - p.closed_form_distortion) for p in curve
            ),
            "nonincreasing": all(b <= a for a, b in zip(means, means[1:])),
        }
        return report

    def broadcast(self):
        config = self.config
        result = semcom_tools.broadcast.broadcast_report(
            config.signal,
            config.plan,
            list(config.users),
            config.n_trials,
            config.seed,
            coupled=config.coupled,
            kind=config.channel.kind,
            quantiles=config.quantiles,
            workers=config.workers,
            chunk_size=config.chunk_size,
        )
        heading = ["user", "avg_snr_db", "coupled", "mean_distortion"]
        heading += [_quantile_column(q) for q in config.quantiles]
        report = self._report(heading + _pmf_columns(config.plan.num_layers))
        for user in result.users:
            report.rows.append(
                self._common()
                + [user.name, user.avg_snr_db, str(config.coupled).lower()]
                + [user.mean_distortion]
                + [user.distortion_quantiles[float(q)] for q in config.quantiles]
                + [float(p) for p in user.prefix_pmf]
            )
        report.summary = {
            "users": len(result.users),
            "coupled": config.coupled,
            "ordering_violations": ordering_violations(config.users, result),
        }
        return report

    def diversity(self):
        mode = self.config.diversity["mode"]
        if mode == "scaling":
            return self._diversity_scaling()
        built = self.config.diversity
        div_config = built["config"]
        if "p_err" in built:
            p_errs = [built["p_err"]] * div_config.num_modalities
            closed_form = semcom_tools.diversity.recovery_probability(
                div_config.num_modalities, div_config.required, built["p_err"]
            )
        else:
            p_errs = div_config.p_errs()
            closed_form = semcom_tools.diversity.closed_form_recovery(div_config)
        heading = ["mode", "num_modalities", "required", "p_err"]
        heading.append("recovery_probability")
        row = self._common() + [
            mode,
            div_config.num_modalities,
            div_config.required,
            _p_err_cell(p_errs),
            closed_form,
        ]
        summary = {"recovery_probability": closed_form}
        if mode == "simulate":
            empirical = semcom_tools.diversity.simulate_recovery(
                div_config,
                self.config.n_trials,
                self.config.seed,
                workers=self.config.workers,
                chunk_size=self.config.chunk_size,
            )
            std_error = semcom_tools.diversity.binomial_std_error(
                closed_form, self.config.n_trials
            )
            heading += ["empirical_probability", "std_error"]
            row += [empirical, std_error]
            summary["empirical_probability"] = empirical
            summary["within_4_sigma"] = abs(empirical - closed_form) <= 4 * max(
                std_error, 1.0 / self.config.n_trials
            )
        report = self._report(heading)
        report.rows.append(row)
        report.summary = summary
        return report

    def _diversity_scaling(self):
        built = self.config.diversity
        check = semcom_tools.diversity.diversity_scaling_check(
            built["success_fraction_required"], built["p_err"], built["m_values"]
        )
        report = self._report(
            [
                "mode",
                "num_modalities",
                "required",
                "success_fraction_required",
                "p_err",
                "recovery_probability",
            ]
        )
        for point in check.points:
            report.rows.append(
                self._common()
                + [
                    "scaling",
                    point.num_modalities,
                    point.required,
                    check.success_fraction_required,
                    check.p_err,
                    point.recovery_probability,
                ]
            )
        report.summary = {
            "condition_holds": check.condition_holds,
            "final_exceeds_earlier": check.final_exceeds_earlier,
            "strictly_decreasing": check.strictly_decreasing,
        }
        return report

    def execute(self):
        experiments = {
            "codec-profile": self.codec_profile,
            "sweep-snr": self.sweep_snr,
            "broadcast": self.broadcast,
            "diversity": self.diversity,
        }
        try:
            runner = experiments[self.config.experiment]
        except KeyError:
            raise ConfigValidationError(
                f"unknown experiment '{self.config.experiment}'", key="experiment"
            )
        stderr.print(f"[blue]Running {self.config.experiment}")
        log.info("Running %s with seed %s", self.config.experiment, self.config.seed)
        return runner()

    def write(self, report):
        """Write the csv, the json report and the yaml config echo"""
        stem, _ = os.path.splitext(self.out_path)
        try:
            out_dir = os.path.dirname(os.path.abspath(self.out_path))
            os.makedirs(out_dir, exist_ok=True)
            semcom_tools.utils.write_csv_file(
                report.heading, report.rows, self.out_path, self.float_format()
            )
            semcom_tools.utils.write_json_fo_file(
                _jsonable(report.to_dict()), stem + ".report.json"
            )
            semcom_tools.utils.write_yml_file(report.config, stem + ".config.yml")
        except OSError as e:
            log.error("Unable to write results to %s: %s", self.out_path, e)
            raise ReportWriteError(f"unable to write {self.out_path}: {e}")
        stderr.print(f"[green]Results written to {self.out_path}")
        return True

    def run(self):
        report = self.execute()
        self.write(report)
        return report


def _p_err_cell(p_errs):
    if len(set(p_errs)) == 1:
        return float(p_errs[0])
    fmt = ExperimentRun.float_format()
    return ";".join(semcom_tools.utils.format_float(p, fmt) for p in p_errs)


def _jsonable(data):
    if isinstance(data, dict):
        return {str(k): _jsonable(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [_jsonable(v) for v in data]
    return _plain(data)


def ordering_violations(users, result):
    """Trials in which a user with a higher average SNR decoded fewer layers
    or saw more distortion than a weaker one. Zero whenever users are coupled
    """
    order = np.argsort([user.avg_snr_db for user in users], kind="stable")
    prefixes = result.prefixes[order]
    distortions = result.distortions[order]
    bad = np.any(prefixes[1:] < prefixes[:-1], axis=0) | np.any(
        distortions[1:] > distortions[:-1], axis=0
    )
    return int(np.count_nonzero(bad))


def run(config, out_path):
    """Execute the configured experiment and write its outputs"""
    return ExperimentRun(config, out_path).run()
