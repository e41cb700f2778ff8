""" Main semcom package file.
"""

from importlib import metadata

try:
    __version__ = metadata.version("semcom_tools")
except metadata.PackageNotFoundError:
    __version__ = "0.0.0+unknown"
