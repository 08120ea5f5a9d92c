"""
Runtime configuration for the half-wave maps laboratory
"""
import logging
import os
from dotenv import load_dotenv

load_dotenv()

# Where reports, CSV traces and field dumps go
OUTPUT_DIR = os.getenv("HWMLAB_OUTPUT_DIR", "results")
LOG_LEVEL = os.getenv("HWMLAB_LOG_LEVEL", "INFO")
DEFAULT_SEED = int(os.getenv("HWMLAB_SEED", "0"))

# Thread pool width for independent experiments, and scipy.fft workers per transform
WORKERS = int(os.getenv("HWMLAB_WORKERS", "1"))
FFT_WORKERS = int(os.getenv("HWMLAB_FFT_WORKERS", "1"))

# API server
API_HOST = os.getenv("HWMLAB_HOST", "0.0.0.0")
API_PORT = int(os.getenv("HWMLAB_PORT", "8000"))

# Tolerance gates (64-bit spectral pipelines)
POINTWISE_TOL = 1e-9
INTEGRAL_TOL = 1e-8
SPHERE_TOL = 1e-12
MEAN_ZERO_TOL = 1e-10

# Half-wave maps experiment defaults
DEFAULT_ALPHA = 1.25
ENERGY_FLOOR = 1e-28  # Grönwall intervals below this energy are skipped
CFL_LIMIT = 1.0

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Install one stream handler on the package logger."""
    logger = logging.getLogger("hwmlab")
    if not any(getattr(h, "_hwmlab", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._hwmlab = True
        logger.addHandler(handler)
    logger.setLevel(level.upper() if isinstance(level, str) else level)
