"""Configuration parsing utilities."""
import json
from typing import Any, Dict, Union

from loguru import logger

from ..exceptions import ParsingException

TRUE_STRINGS = {"true", "yes", "on"}
FALSE_STRINGS = {"false", "no", "off"}


def str_to_value(value: str) -> Union[str, int, float, bool]:
    """
    Convert a raw configuration string to a number or a boolean if possible.

    Args:
        value (str): raw string.

    Returns:
        Union[str, int, float, bool]: converted value.
    """
    lowered = value.lower()
    if lowered in TRUE_STRINGS:
        return True
    if lowered in FALSE_STRINGS:
        return False
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def parse_config_text(text: str) -> Dict[str, Any]:
    """
    Parse a flat key=value configuration with # comments.

    Args:
        text (str): configuration content.

    Returns:
        Dict[str, Any]: parsed settings with keys normalized to snake case.

    Raises:
        ParsingException: on lines without "=" or with an empty key.
    """
    config: Dict[str, Any] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ParsingException(f"Expected key=value, got [{content}].", line_number)
        key, value = (token.strip() for token in content.split("=", 1))
        if not key:
            raise ParsingException("Empty key.", line_number)
        key = key.replace("-", "_")
        if key in config:
            logger.warning(f"Key {key} redefined at line {line_number}")
        config[key] = str_to_value(value)
    return config


def parse_config_file(filepath: str) -> Dict[str, Any]:
    """
    Parse a configuration file, either key=value or a JSON run manifest.

    Args:
        filepath (str): path to the file. Files ending in ".json" are read as
            manifests and their "config" section is returned.

    Returns:
        Dict[str, Any]: parsed settings.
    """
    with open(filepath) as fp:
        text = fp.read()
    if filepath.endswith(".json"):
        try:
            manifest = json.loads(text)
        except json.JSONDecodeError as error:
            raise ParsingException(error.msg, error.lineno)
        if not isinstance(manifest, dict) or "config" not in manifest:
            raise ParsingException("Manifest without a config section.")
        return dict(manifest["config"])
    return parse_config_text(text)
