"""Flat ``key = value`` configuration files with ``#`` comments."""
from pathlib import Path


class ConfigError(ValueError):
    pass


def parse_config_text(text, source="<config>"):
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        out[key.lower()] = value
    return out


def load_config(path):
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(p.read_text(encoding="utf-8"), str(p))


def resolve(key, flag_value, file_values, default, convert=float):
    """Flag beats file beats default."""
    if flag_value is not None:
        return flag_value
    if key in file_values:
        try:
            return convert(file_values[key])
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {file_values[key]!r}") from exc
    return default
