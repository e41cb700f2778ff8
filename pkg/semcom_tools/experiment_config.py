#!/usr/bin/env python
"""
Experiment configuration.

A YAML document is checked against schema/experiment_schema.json, completed
with the packaged defaults from conf/configuration.json, overridden by
command line flags and finally turned into the domain objects, whose own
invariants are the last line of validation. The completed document is kept
as the canonical echo; loading the echo back reproduces the run.
"""
import copy
import logging
import os
from dataclasses import dataclass

import jsonschema
import yaml
from jsonschema import Draft202012Validator

import semcom_tools.channel
import semcom_tools.codec
import semcom_tools.diversity
import semcom_tools.utils
from semcom_tools.broadcast import UserProfile
from semcom_tools.channel import ChannelKind, ChannelModel, snr_for_outage
from semcom_tools.config_json import ConfigJson
from semcom_tools.diversity import DiversityConfig
from semcom_tools.exceptions import (
    ConfigFileNotFoundError,
    ConfigParseError,
    ConfigValidationError,
    DomainError,
)
from semcom_tools.superposition import LayerPlan

log = logging.getLogger(__name__)

_GENERATOR_PARAMS = {
    "constant": ("value",),
    "ramp": ("start", "step"),
    "sine": ("amplitude", "periods"),
    "gaussian": ("std", "seed"),
}


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    experiment: str
    seed: int
    n_trials: int
    workers: int
    chunk_size: int
    signal: semcom_tools.codec.Signal
    plan: LayerPlan
    channel: ChannelModel
    snr_grid_db: tuple
    baseline: bool
    users: tuple
    coupled: bool
    quantiles: tuple
    diversity: dict
    canonical: dict

    def echo(self):
        """Canonical config document, safe to dump as yaml"""
        return copy.deepcopy(self.canonical)


def _domain(key, build, *args, **kwargs):
    """Run a constructor and report its DomainError against a config key"""
    try:
        return build(*args, **kwargs)
    except DomainError as e:
        raise ConfigValidationError(str(e), key=key)


class ConfigValidation:
    def __init__(self, json_schema_file=None):
        self.config_json = ConfigJson()
        if json_schema_file is None:
            json_schema_file = os.path.join(
                os.path.dirname(os.path.realpath(__file__)),
                "schema",
                self.config_json.get_configuration("experiment_schema"),
            )
        self.json_schema = semcom_tools.utils.read_json_file(json_schema_file)

    def validate_schema(self):
        """Validate json schema against draft"""
        try:
            Draft202012Validator.check_schema(self.json_schema)
        except jsonschema.SchemaError as e:
            raise ConfigValidationError(
                f"experiment schema does not fulfill Draft 202012: {e.message}"
            )

    def validate_instance(self, data):
        """Report the first schema violation, naming the offending key"""
        validator = Draft202012Validator(self.json_schema)
        errors = sorted(
            validator.iter_errors(data), key=lambda e: [str(p) for p in e.path]
        )
        if not errors:
            return True
        error = errors[0]
        key = ".".join(str(p) for p in error.absolute_path) or "<root>"
        log.error("Invalid config at %s: %s", key, error.message)
        raise ConfigValidationError(error.message, key=key)

    def defaults(self, topic):
        return copy.deepcopy(self.config_json.get_configuration(topic))

    def complete(self, data, experiment=None, overrides=None, config_dir="."):
        """Fill every value the run needs, yielding the canonical document"""
        if experiment is not None:
            if data.get("experiment", experiment) != experiment:
                raise ConfigValidationError(
                    f"config is for '{data['experiment']}' but '{experiment}' "
                    "was requested",
                    key="experiment",
                )
            data["experiment"] = experiment
        if "experiment" not in data:
            raise ConfigValidationError("experiment is not set", key="experiment")

        simulation = self.defaults("simulation")
        canonical = {"experiment": data["experiment"]}
        for key in ("seed", "n_trials", "workers"):
            canonical[key] = data.get(key, simulation[key])
        for key, value in (overrides or {}).items():
            if value is not None:
                canonical[key] = value
        canonical["signal"] = self.complete_signal(data.get("signal", {}), config_dir)
        canonical["layers"] = self.complete_layers(data.get("layers", {}))
        channel = self.defaults("channel")
        channel.update(data.get("channel", {}))
        canonical["channel"] = channel

        sweep = self.defaults("sweep")
        canonical["snr_grid_db"] = data.get("snr_grid_db", sweep["snr_grid_db"])
        canonical["baseline"] = data.get("baseline", sweep["baseline"])
        broadcast = self.defaults("broadcast")
        for key in ("users", "coupled", "quantiles"):
            canonical[key] = data.get(key, broadcast[key])
        canonical["diversity"] = self.complete_diversity(data.get("diversity", {}))
        # the filled document must still satisfy the schema
        self.validate_instance(canonical)
        return canonical

    def complete_signal(self, signal, config_dir="."):
        sources = [key for key in ("generator", "file", "samples") if key in signal]
        if len(sources) > 1:
            raise ConfigValidationError(
                f"give only one of generator, file or samples, got {sources}",
                key="signal",
            )
        if sources and sources[0] != "generator":
            extra = set(signal) - {sources[0]}
            if extra:
                raise ConfigValidationError(
                    f"{sorted(extra)} only apply to generated signals",
                    key="signal",
                )
            completed = dict(signal)
            if "file" in completed:
                # absolute, so the echo reloads from anywhere
                completed["file"] = os.path.abspath(
                    os.path.join(config_dir, completed["file"])
                )
            return completed
        defaults = self.defaults("signal")
        generator = signal.get("generator", defaults["generator"])
        allowed = {"generator", "length", *_GENERATOR_PARAMS[generator]}
        extra = set(signal) - allowed
        if extra:
            raise ConfigValidationError(
                f"{sorted(extra)} do not apply to the {generator} generator",
                key="signal",
            )
        completed = {"generator": generator}
        for key in ("length", *_GENERATOR_PARAMS[generator]):
            completed[key] = signal.get(key, defaults[key])
        return completed

    def complete_layers(self, layers):
        if "ratio" in layers and "power_fractions" in layers:
            raise ConfigValidationError(
                "give either ratio or power_fractions, not both", key="layers"
            )
        if "rate" in layers and "rates" in layers:
            raise ConfigValidationError(
                "give either rate or rates, not both", key="layers"
            )
        defaults = self.defaults("layer_plan")
        if "num_layers" in layers:
            num_layers = layers["num_layers"]
        elif "power_fractions" in layers:
            num_layers = len(layers["power_fractions"])
        else:
            num_layers = defaults["num_layers"]
        completed = {"num_layers": num_layers}
        if "power_fractions" in layers:
            completed["power_fractions"] = list(layers["power_fractions"])
        else:
            completed["ratio"] = layers.get("ratio", defaults["power_ratio"])
        if "rates" in layers:
            completed["rates"] = list(layers["rates"])
        else:
            completed["rates"] = [layers.get("rate", defaults["rate"])] * num_layers
        return completed

    def complete_diversity(self, diversity):
        defaults = self.defaults("diversity")
        mode = diversity.get("mode", defaults["mode"])
        completed = {"mode": mode}
        if mode == "scaling":
            keys = ("success_fraction_required", "m_values", "per_modality_rate")
        else:
            keys = ("num_modalities", "required", "per_modality_rate")
        for key in keys:
            completed[key] = diversity.get(key, defaults[key])
        for key in ("p_err", "modality_snr_db"):
            if key in diversity:
                completed[key] = diversity[key]
        if "p_err" in completed and "modality_snr_db" in completed:
            raise ConfigValidationError(
                "give either p_err or modality_snr_db, not both", key="diversity"
            )
        return completed


def build_plan(layers):
    if "power_fractions" in layers:
        return _domain(
            "layers.power_fractions",
            LayerPlan,
            layers["num_layers"],
            tuple(layers["power_fractions"]),
            tuple(layers["rates"]),
        )
    return _domain(
        "layers",
        LayerPlan.geometric,
        layers["num_layers"],
        layers["ratio"],
        list(layers["rates"]),
    )


def build_signal(signal):
    if "file" in signal:
        file_name = signal["file"]
        if not os.path.isfile(file_name):
            raise ConfigFileNotFoundError(
                f"signal file {file_name} does not exist", key="signal.file"
            )
        return _domain("signal.file", semcom_tools.codec.Signal.from_file, file_name)
    if "samples" in signal:
        return _domain("signal.samples", semcom_tools.codec.Signal, signal["samples"])
    params = {k: v for k, v in signal.items() if k not in ("generator", "length")}
    return _domain(
        "signal",
        semcom_tools.codec.generate_signal,
        signal["generator"],
        signal["length"],
        **params,
    )


def build_diversity(diversity, channel):
    """Domain objects for the diversity block. p_err, when given, either
    feeds the closed form directly or tunes a Rayleigh channel to it
    """
    built = dict(diversity)
    mode = diversity["mode"]
    rate = diversity["per_modality_rate"]
    if mode == "scaling":
        if "p_err" not in diversity:
            built["p_err"] = _domain(
                "diversity.per_modality_rate",
                semcom_tools.channel.outage_probability,
                rate,
                channel,
            )
        beta = diversity["success_fraction_required"]
        if not 0.0 < beta < 1.0:
            raise ConfigValidationError(
                f"success fraction must lie in (0, 1), got {beta}",
                key="diversity.success_fraction_required",
            )
        m_values = list(diversity["m_values"])
        if any(b <= a for a, b in zip(m_values, m_values[1:])):
            raise ConfigValidationError(
                f"modality counts must be strictly increasing, got {m_values}",
                key="diversity.m_values",
            )
        _domain(
            "diversity",
            semcom_tools.diversity.diversity_scaling_check,
            beta,
            built["p_err"],
            m_values,
        )
        return built
    modality_models = None
    model = channel
    if "modality_snr_db" in diversity:
        modality_models = tuple(
            _domain("diversity.modality_snr_db", ChannelModel, channel.kind, snr)
            for snr in diversity["modality_snr_db"]
        )
    elif "p_err" in diversity and mode == "simulate":
        p_err = diversity["p_err"]
        if not 0.0 < p_err < 1.0:
            raise ConfigValidationError(
                "simulating from p_err needs 0 < p_err < 1; describe the "
                "channel instead",
                key="diversity.p_err",
            )
        model = _domain(
            "diversity",
            lambda: ChannelModel(ChannelKind.RAYLEIGH, snr_for_outage(rate, p_err)),
        )
    if diversity["required"] > diversity["num_modalities"]:
        raise ConfigValidationError(
            f"required count K = {diversity['required']} must not exceed the "
            f"number of modalities M = {diversity['num_modalities']} (K <= M)",
            key="diversity.required",
        )
    built["config"] = _domain(
        "diversity",
        DiversityConfig,
        diversity["num_modalities"],
        diversity["required"],
        rate,
        model,
        modality_models,
    )
    return built


def build_config(data, experiment=None, overrides=None, config_dir="."):
    """Validate a config document and build the experiment from it"""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigParseError("top level of the config must be a mapping")
    validation = ConfigValidation()
    validation.validate_schema()
    validation.validate_instance(data)
    canonical = validation.complete(
        copy.deepcopy(data), experiment, overrides, config_dir
    )

    channel = _domain(
        "channel",
        ChannelModel,
        canonical["channel"]["kind"],
        canonical["channel"]["avg_snr_db"],
    )
    for i, avg_snr_db in enumerate(canonical["snr_grid_db"]):
        _domain(f"snr_grid_db.{i}", channel.with_snr_db, avg_snr_db)
    users = tuple(
        _domain(f"users.{i}", UserProfile, user["name"], user["avg_snr_db"])
        for i, user in enumerate(canonical["users"])
    )
    names = [user.name for user in users]
    if len(set(names)) != len(names):
        raise ConfigValidationError(f"user names must be unique: {names}", key="users")

    config = ExperimentConfig(
        experiment=canonical["experiment"],
        seed=canonical["seed"],
        n_trials=canonical["n_trials"],
        workers=canonical["workers"],
        chunk_size=validation.config_json.get_topic_data("simulation", "chunk_size"),
        signal=build_signal(canonical["signal"]),
        plan=build_plan(canonical["layers"]),
        channel=channel,
        snr_grid_db=tuple(canonical["snr_grid_db"]),
        baseline=canonical["baseline"],
        users=users,
        coupled=canonical["coupled"],
        quantiles=tuple(canonical["quantiles"]),
        diversity=build_diversity(canonical["diversity"], channel),
        canonical=canonical,
    )
    if config.experiment in ("codec-profile", "sweep-snr", "broadcast"):
        # the codec must be able to split the signal into the plan's layers
        _domain(
            "layers.num_layers",
            semcom_tools.codec.decompose,
            config.signal,
            config.plan.num_layers,
        )
    log.info("Loaded %s experiment with seed %s", config.experiment, config.seed)
    return config


def load_config(path, experiment=None, overrides=None):
    """Read, validate and complete a YAML experiment config"""
    if path is None or not semcom_tools.utils.file_exists(path):
        log.error("Configuration file %s does not exist", path)
        raise ConfigFileNotFoundError(f"configuration file {path} does not exist")
    try:
        data = semcom_tools.utils.read_yml_file(path)
    except yaml.YAMLError as e:
        log.error("Unable to parse configuration file %s", path)
        raise ConfigParseError(f"unable to parse {path}: {e}")
    except UnicodeDecodeError as e:
        raise ConfigParseError(f"unable to decode {path}: {e}")
    return build_config(
        data,
        experiment=experiment,
        overrides=overrides,
        config_dir=os.path.dirname(os.path.abspath(path)),
    )
