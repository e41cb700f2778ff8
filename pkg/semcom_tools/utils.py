#!/usr/bin/env python
"""
Common utility function used for semcom_tools package.
"""
import csv
import json
import logging
import math
import os

import questionary
import yaml

log = logging.getLogger(__name__)


def file_exists(file_to_check):
    """
    Input:
        file_to_check   # file name to check if exists
    Return:
        True if exists
    """
    if os.path.isfile(file_to_check):
        return True
    return False


def read_json_file(j_file):
    """Read json file."""
    with open(j_file, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return data


def read_yml_file(file_name):
    """Read yml file"""
    with open(file_name, "r", encoding="utf-8") as fh:
        return yaml.safe_load(fh)


def write_yml_file(data, file_name):
    """Write data as block style yaml with sorted keys"""
    with open(file_name, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(data, fh, sort_keys=True, default_flow_style=False)
    return True


def write_json_fo_file(data, file_name):
    """Write data to json file"""
    with open(file_name, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(data, indent=4, sort_keys=True, ensure_ascii=False))
        fh.write("\n")
    return True


def read_signal_file(file_name):
    """Read one decimal sample per line. Blank lines are skipped, anything
    else that does not parse as a finite float raises ValueError naming the
    line number
    """
    samples = []
    with open(file_name, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                value = float(line)
            except ValueError:
                raise ValueError(f"line {line_number}: '{line}' is not a decimal")
            if not math.isfinite(value):
                raise ValueError(f"line {line_number}: sample is not finite")
            samples.append(value)
    return samples


def format_float(value, float_format=".17g"):
    """Text form used for every float written to csv"""
    return format(float(value), float_format)


def write_csv_file(heading, rows, file_name, float_format=".17g"):
    """Write rows as utf-8 csv with LF endings. Floats are printed with
    float_format, any other value with str()
    """
    with open(file_name, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(heading)
        for row in rows:
            writer.writerow(
                [
                    format_float(value, float_format)
                    if isinstance(value, float)
                    else str(value)
                    for value in row
                ]
            )
    return True


def rich_force_colors():
    """
    Check if any environment variables are set to force Rich to use coloured output
    """
    if (
        os.getenv("GITHUB_ACTIONS")
        or os.getenv("FORCE_COLOR")
        or os.getenv("PY_COLORS")
    ):
        return True
    return None


def prompt_path(msg):
    source = questionary.path(msg).unsafe_ask()
    return source
