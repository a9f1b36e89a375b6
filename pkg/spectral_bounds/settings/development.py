"""
Development settings for Spectral Bounds project.
"""
from .base import *

DEBUG = True

LOG_LEVEL = config("LOG_LEVEL", default="DEBUG")

LOGGING["handlers"]["console"]["level"] = "DEBUG"
