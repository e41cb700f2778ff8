#!/usr/bin/env python
"""
Exceptions raised by semcom_tools.

DomainError flags a violated precondition inside the library. The
SemcomToolsError family is raised by the harness and carries the process exit
code the command line reports.
"""


class DomainError(ValueError):
    """Argument outside the domain of a library operation"""


class SemcomToolsError(Exception):
    exit_code = 1

    def __init__(self, message, key=None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class ConfigFileNotFoundError(SemcomToolsError):
    exit_code = 3


class ConfigParseError(SemcomToolsError):
    exit_code = 4


class ConfigValidationError(SemcomToolsError):
    exit_code = 5


class ReportWriteError(SemcomToolsError):
    exit_code = 6
