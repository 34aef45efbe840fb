import os

from dotenv import load_dotenv

# Pick up a .env file from the working directory (local development)
load_dotenv()


def getenv_bool(name, default="false"):
    return os.getenv(name, default).strip().lower() in ("true", "1", "yes")


def getenv_int(name, default):
    return int(os.getenv(name, str(default)))


def getenv_float(name, default):
    return float(os.getenv(name, str(default)))


class BaseConfig:
    DEBUG = getenv_bool("DECODE_ENERGY_DEBUG")

    # Logging goes to stderr; stdout is reserved for command output
    LOG_LEVEL = os.getenv("DECODE_ENERGY_LOG_LEVEL", "WARNING").upper()
    LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

    # Cross validation
    DEFAULT_K = getenv_int("DECODE_ENERGY_DEFAULT_K", 10)
    DEFAULT_SEED = getenv_int("DECODE_ENERGY_DEFAULT_SEED", 0)

    # Synthetic data generator
    NOMINAL_POWER_W = getenv_float("DECODE_ENERGY_NOMINAL_POWER_W", 2.0)
    TIME_NOISE_SIGMA = getenv_float("DECODE_ENERGY_TIME_NOISE_SIGMA", 0.01)
    L1_MISS_FRACTION = getenv_float("DECODE_ENERGY_L1_MISS_FRACTION", 0.05)
    LL_MISS_FRACTION = getenv_float("DECODE_ENERGY_LL_MISS_FRACTION", 0.2)

    # Result cache for cross validation runs
    CACHE_TYPE = os.getenv("DECODE_ENERGY_CACHE_TYPE", "SimpleCache")
    CACHE_THRESHOLD = getenv_int("DECODE_ENERGY_CACHE_THRESHOLD", 4096)

    # Fixed console width keeps rendered tables byte-stable across terminals
    CONSOLE_WIDTH = getenv_int("DECODE_ENERGY_CONSOLE_WIDTH", 120)

    @classmethod
    def validate(cls):
        """
        Validate the configuration values.
        Raises ValueError listing every invalid setting.
        """
        invalid = []

        if cls.LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            invalid.append(f"LOG_LEVEL ({cls.LOG_LEVEL!r} is not a logging level)")
        if cls.DEFAULT_K < 2:
            invalid.append(f"DEFAULT_K ({cls.DEFAULT_K} < 2)")
        if cls.NOMINAL_POWER_W <= 0:
            invalid.append(f"NOMINAL_POWER_W ({cls.NOMINAL_POWER_W} must be > 0)")
        if cls.TIME_NOISE_SIGMA < 0:
            invalid.append(f"TIME_NOISE_SIGMA ({cls.TIME_NOISE_SIGMA} must be >= 0)")
        for name in ("L1_MISS_FRACTION", "LL_MISS_FRACTION"):
            value = getattr(cls, name)
            if not 0 <= value <= 1:
                invalid.append(f"{name} ({value} outside [0, 1])")
        if cls.CACHE_TYPE not in ("SimpleCache", "NullCache"):
            invalid.append(f"CACHE_TYPE ({cls.CACHE_TYPE!r} is not SimpleCache or NullCache)")
        if cls.CONSOLE_WIDTH < 40:
            invalid.append(f"CONSOLE_WIDTH ({cls.CONSOLE_WIDTH} < 40)")

        if invalid:
            error_msg = "Configuration validation failed!\n"
            for var in invalid:
                error_msg += f"   - {var}\n"
            raise ValueError(error_msg)

        return True


class LocalConfig(BaseConfig):
    DEBUG = True
    LOG_LEVEL = "DEBUG"


class TestingConfig(BaseConfig):
    """Deterministic settings for the test suite (no cross-run result cache)."""
    DEBUG = False
    LOG_LEVEL = "WARNING"
    CACHE_TYPE = "NullCache"
    DEFAULT_K = 10
    DEFAULT_SEED = 0
