"""Line-oriented experiment configuration.

Format: `[section]` headers and `key = value` lines; `#` starts a comment;
blank lines are ignored. Keys are validated against a fixed schema, unknown
keys or sections are errors, and numeric parse failures report the line
number. Sweep values (k1, k2, eps) accept comma-separated lists.

The random seed is mandatory: runs never seed from the clock.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

EXPERIMENT_KINDS = (
    "purity-sweep",
    "lyapunov-collapse",
    "wigner-compare",
    "env-decoherence",
    "gamma-estimate",
    "lyapunov-estimate",
)


class ConfigError(ValueError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if line_no else message)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int
    output_dir: str = "out"
    n1: int = 512
    n2: int = 512
    x_offset: float = 0.0
    p_offset: float = 0.5
    k1: tuple[float, ...] = (5.09,)
    k2: tuple[float, ...] = (5.09,)
    eps: tuple[float, ...] = (0.8,)
    phase_offset: float = 0.33
    n_kicks: int = 25
    n_initial_states: int = 20
    sigma_scale: float = 1.0
    n_env_states: int = 6
    n_classical: int = 1_000_000
    n_quantum_large: int = 2048
    husimi_resolution: int = 128
    memory_budget_mb: int = 4096
    lyap_samples: int = 400
    lyap_steps: int = 2000
    gamma_pairs: int = 100_000

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.n_initial_states < 1:
            raise ConfigError("run.n_initial_states must be >= 1")
        for name in ("k1", "k2", "eps"):
            if len(getattr(self, name)) < 1:
                raise ConfigError(f"{name} sweep list is empty")


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part.strip()) for part in text.split(","))


def _parse_str(text: str) -> str:
    return text


# section.key -> (ExperimentConfig attribute, parser)
SCHEMA = {
    "experiment.kind": ("kind", _parse_str),
    "experiment.seed": ("seed", _parse_int),
    "experiment.output_dir": ("output_dir", _parse_str),
    "grid.n1": ("n1", _parse_int),
    "grid.n2": ("n2", _parse_int),
    "grid.x_offset": ("x_offset", _parse_float),
    "grid.p_offset": ("p_offset", _parse_float),
    "rotor.k1": ("k1", _parse_float_list),
    "rotor.k2": ("k2", _parse_float_list),
    "coupling.eps": ("eps", _parse_float_list),
    "coupling.phase_offset": ("phase_offset", _parse_float),
    "run.n_kicks": ("n_kicks", _parse_int),
    "run.n_initial_states": ("n_initial_states", _parse_int),
    "run.sigma_scale": ("sigma_scale", _parse_float),
    "run.n_env_states": ("n_env_states", _parse_int),
    "run.n_classical": ("n_classical", _parse_int),
    "run.n_quantum_large": ("n_quantum_large", _parse_int),
    "run.husimi_resolution": ("husimi_resolution", _parse_int),
    "run.memory_budget_mb": ("memory_budget_mb", _parse_int),
    "run.lyap_samples": ("lyap_samples", _parse_int),
    "run.lyap_steps": ("lyap_steps", _parse_int),
    "run.gamma_pairs": ("gamma_pairs", _parse_int),
}

MANDATORY = ("experiment.kind", "experiment.seed")

_SECTIONS = sorted({key.split(".")[0] for key in SCHEMA})
_ATTR_TO_KEY = {attr: key for key, (attr, _) in SCHEMA.items()}


def parse_config_text(text: str, source: str = "<config>") -> ExperimentConfig:
    section = None
    values: dict[str, object] = {}
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", line_no)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line_no)
        if section is None:
            raise ConfigError("key before any [section] header", line_no)
        key, _, value = line.partition("=")
        full = f"{section}.{key.strip()}"
        if full not in SCHEMA:
            raise ConfigError(f"unknown key {full}", line_no)
        if full in seen:
            raise ConfigError(f"duplicate key {full}", line_no)
        seen.add(full)
        attr, parser = SCHEMA[full]
        try:
            values[attr] = parser(value.strip())
        except ValueError:
            raise ConfigError(f"cannot parse {value.strip()!r} for {full}", line_no) from None
    for key in MANDATORY:
        attr, _ = SCHEMA[key]
        if attr not in values:
            raise ConfigError(f"missing mandatory key {key} in {source}")
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, source=path)


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; parse(render(cfg)) == cfg."""
    by_section: dict[str, list[str]] = {}
    for f in fields(cfg):
        key = _ATTR_TO_KEY[f.name]
        section, short = key.split(".", 1)
        by_section.setdefault(section, []).append(f"{short} = {_format_value(getattr(cfg, f.name))}")
    chunks = []
    for section in ("experiment", "grid", "rotor", "coupling", "run"):
        chunks.append(f"[{section}]")
        chunks.extend(by_section.get(section, []))
        chunks.append("")
    return "\n".join(chunks)


def apply_overrides(cfg: ExperimentConfig, overrides: list[str]) -> ExperimentConfig:
    """Apply `section.key=value` command-line overrides."""
    updates = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key} in override")
        attr, parser = SCHEMA[key]
        try:
            updates[attr] = parser(value.strip())
        except ValueError:
            raise ConfigError(f"cannot parse {value.strip()!r} for {key}") from None
    return replace(cfg, **updates)


def config_as_dict(cfg: ExperimentConfig) -> dict:
    """Nested section dict for manifest echoing."""
    out: dict[str, dict[str, object]] = {}
    for f in fields(cfg):
        section, short = _ATTR_TO_KEY[f.name].split(".", 1)
        value = getattr(cfg, f.name)
        out.setdefault(section, {})[short] = list(value) if isinstance(value, tuple) else value
    return out
