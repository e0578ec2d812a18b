# config.py

import os

from module_block_building.errors import ConfigError

BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# --- GLOBAL PATH CONFIGURATION ---
GENERATED_DIR_NAME = "generated"
GENERATED_DIR = os.environ.get('FIFOGAP_GENERATED_DIR', os.path.join(BASE_DIR, GENERATED_DIR_NAME))

# Bundled configuration files (reference sweep, sample instance)
CONFIGS_DIR = os.path.join(BASE_DIR, 'configs')
REFERENCE_CONFIG_PATH = os.path.join(CONFIGS_DIR, 'reference_sweep.cfg')

# --- RUNTIME SETTINGS (environment overrides) ---
LOG_LEVEL = os.environ.get('FIFOGAP_LOG_LEVEL', 'INFO').upper()


def env_int(name, default):
    """Integer setting from the environment, read at call time; blank means `default`."""
    raw = os.environ.get(name, '').strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"environment variable {name} must be an integer, got {raw!r}") from None


def default_threads():
    return env_int('FIFOGAP_THREADS', 1)


def default_exact_limit():
    return env_int('FIFOGAP_EXACT_LIMIT', 30)
