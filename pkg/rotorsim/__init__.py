"""Simulation and fitting of a two-ion quantum rotor."""
import logging

from .const import LOGGER_NAME, VERSION

__version__ = VERSION

logging.getLogger(LOGGER_NAME).addHandler(logging.NullHandler())
