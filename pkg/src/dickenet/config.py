"""Scenario configuration files: a small line-oriented dialect with line-anchored errors.

Format: ``[section]`` headers, ``key = value`` entries, ``#`` comments (full
line or inline).  Values are booleans, integers, floats, strings (bare or
double-quoted), or comma-separated lists of scalars.  The parser records the
source line of every key so both syntax and semantic diagnostics can point at
the exact line, and the canonical emitter round-trips any parsed file.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .errors import ConfigError


@dataclass(frozen=True)
class ConfigValue:
    value: object
    line: int


@dataclass
class ParsedConfig:
    sections: dict = field(default_factory=dict)       # name -> {key -> ConfigValue}
    section_lines: dict = field(default_factory=dict)  # name -> source line
    order: list = field(default_factory=list)          # section names in file order

    # -- access helpers ----------------------------------------------------
    def has(self, section: str, key: str) -> bool:
        return section in self.sections and key in self.sections[section]

    def section_line(self, section: str) -> int | None:
        return self.section_lines.get(section)

    def require_section(self, section: str) -> dict:
        if section not in self.sections:
            raise ConfigError(f"missing required section [{section}]")
        return self.sections[section]

    def get(self, section: str, key: str, kind, default=..., minimum=None, choices=None):
        """Typed lookup; errors carry the source line of the offending key."""
        entry = self.sections.get(section, {}).get(key)
        if entry is None:
            if default is not ...:
                return default
            raise ConfigError(
                f"missing required key '{key}' in section [{section}]",
                self.section_line(section),
            )
        value = entry.value
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        wrong_type = not isinstance(value, kind) or (isinstance(value, bool) and kind is not bool)
        if wrong_type:
            raise ConfigError(f"key '{key}' must be {kind.__name__}, got {value!r}", entry.line)
        if minimum is not None and value < minimum:
            raise ConfigError(f"key '{key}' must be >= {minimum}, got {value!r}", entry.line)
        if choices is not None and value not in choices:
            raise ConfigError(f"key '{key}' must be one of {choices}, got {value!r}", entry.line)
        return value

    def get_list(self, section: str, key: str, kind=float, default=...):
        entry = self.sections.get(section, {}).get(key)
        if entry is None:
            if default is not ...:
                return default
            raise ConfigError(
                f"missing required key '{key}' in section [{section}]",
                self.section_line(section),
            )
        value = entry.value if isinstance(entry.value, list) else [entry.value]
        out = []
        for item in value:
            if kind is float and isinstance(item, int):
                item = float(item)
            if not isinstance(item, kind):
                raise ConfigError(f"list '{key}' must hold {kind.__name__} values, got {item!r}", entry.line)
            out.append(item)
        return out

    def unknown_key_check(self, known: dict):
        """``known``: section -> iterable of allowed keys; '*' allows any section."""
        for section, entries in self.sections.items():
            if section not in known:
                raise ConfigError(f"unknown section [{section}]", self.section_lines[section])
            allowed = known[section]
            if allowed == "*":
                continue
            for key, entry in entries.items():
                if key not in allowed:
                    raise ConfigError(f"unknown key '{key}' in section [{section}]", entry.line)


def _strip_inline_comment(line: str) -> str:
    out = []
    in_quote = False
    for ch in line:
        if ch == '"':
            in_quote = not in_quote
        if ch == "#" and not in_quote:
            break
        out.append(ch)
    return "".join(out)


def _parse_scalar(token: str, line_no: int):
    token = token.strip()
    if not token:
        raise ConfigError("empty value", line_no)
    if token.startswith('"'):
        if not token.endswith('"') or len(token) < 2:
            raise ConfigError(f"unterminated string {token!r}", line_no)
        return token[1:-1]
    low = token.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def _parse_value(text: str, line_no: int):
    text = text.strip()
    if "," in text and not text.startswith('"'):
        return [_parse_scalar(tok, line_no) for tok in text.split(",")]
    return _parse_scalar(text, line_no)


def parse_config_text(text: str) -> ParsedConfig:
    cfg = ParsedConfig()
    current: str | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_inline_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", line_no)
            current = line[1:-1].strip()
            if current in cfg.sections:
                raise ConfigError(f"duplicate section [{current}]", line_no)
            cfg.sections[current] = {}
            cfg.section_lines[current] = line_no
            cfg.order.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line_no)
        if current is None:
            raise ConfigError("key outside of any [section]", line_no)
        key, _, value_text = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError("empty key", line_no)
        if key in cfg.sections[current]:
            prev = cfg.sections[current][key].line
            raise ConfigError(f"duplicate key '{key}' (first defined on line {prev})", line_no)
        cfg.sections[current][key] = ConfigValue(_parse_value(value_text, line_no), line_no)
    return cfg


def _format_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, int):
        return str(value)
    text = str(value)
    bare_ok = text and not any(c in text for c in ' #,"[]=') and not text.startswith('"')
    return text if bare_ok else f'"{text}"'


def canonical_text(cfg: ParsedConfig) -> str:
    """Deterministic emission that re-parses to an equivalent config."""
    lines = []
    for section in cfg.order:
        lines.append(f"[{section}]")
        for key, entry in cfg.sections[section].items():
            if isinstance(entry.value, list):
                value = ", ".join(_format_scalar(v) for v in entry.value)
            else:
                value = _format_scalar(entry.value)
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def parameter_hash(cfg: ParsedConfig, seed: int) -> str:
    digest = hashlib.sha256()
    digest.update(canonical_text(cfg).encode())
    digest.update(f"seed={seed}".encode())
    return digest.hexdigest()[:16]
