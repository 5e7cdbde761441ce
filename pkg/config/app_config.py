# config/app_config.py
import io
import math
import re
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple, get_args

from dotenv import dotenv_values

from models.models import SuiteName

KNOWN_SUITES: Tuple[str, ...] = get_args(SuiteName)
LAWS = ("standard_gaussian", "symmetric_bernoulli", "shifted_exponential")

_SECTION = re.compile(r"^\s*\[([A-Za-z][\w-]*)\]\s*$")


class ConfigError(Exception):
    """Raised when configuration is invalid"""
    pass


def _float(text: str) -> float:
    value = text.strip().lower()
    if value in ("inf", "+inf", "infinity"):
        return math.inf
    return float(value)


def _int(text: str) -> int:
    return int(text.strip())


def _floats(text: str) -> Tuple[float, ...]:
    return tuple(_float(p) for p in text.split(",") if p.strip())


def _ints(text: str) -> Tuple[int, ...]:
    return tuple(_int(p) for p in text.split(",") if p.strip())


def _text(text: str) -> str:
    return text.strip()


# section -> key -> (field name, parser)
SCHEMA: Dict[str, Dict[str, Tuple[str, Callable[[str], Any]]]] = {
    "run": {
        "suite": ("suite", _text),
        "seed": ("seed", _int),
        "output_dir": ("output_dir", _text),
        "workers": ("workers", _int),
    },
    "model": {
        "d": ("d", _int),
        "N": ("N", _int),
        "origin_mode": ("origin_mode", _text),
        "beta": ("beta", _float),
        "h": ("h", _float),
        "K": ("K", _float),
        "law": ("law", _text),
        "boundary": ("boundary", _text),
        "u": ("u", _float),
        "pad": ("pad", _int),
        "window": ("window", _float),
        "reward": ("reward", _float),
    },
    "grids": {
        "h_list": ("h_list", _floats),
        "K_list": ("K_list", _floats),
        "N_list": ("N_list", _ints),
        "beta_list": ("beta_list", _floats),
        "t_grid": ("t_grid", _floats),
        "site": ("site", _ints),
    },
    "mcmc": {
        "n_samples": ("n_samples", _int),
        "burn_in": ("burn_in", _int),
        "thinning": ("thinning", _int),
        "replicas": ("replicas", _int),
        "ti_nodes": ("ti_nodes", _int),
        "h_anchor": ("h_anchor", _float),
    },
    "sigma": {
        "levels": ("sigma_levels", _ints),
    },
    "logging": {
        "level": ("log_level", _text),
    },
}


class RunConfig(NamedTuple):
    """Experiment configuration with validation; every value comes from the config file"""
    suite: str
    seed: int
    output_dir: str = "results"
    workers: int = 1
    d: int = 3
    N: int = 4
    origin_mode: str = "corner"
    beta: float = 0.0
    h: float = 0.5
    K: float = math.inf
    law: str = "standard_gaussian"
    boundary: str = "constant"
    u: float = 0.0
    pad: Optional[int] = None
    window: float = 1.0
    reward: float = 1.0
    h_list: Tuple[float, ...] = ()
    K_list: Tuple[float, ...] = ()
    N_list: Tuple[int, ...] = ()
    beta_list: Tuple[float, ...] = ()
    t_grid: Tuple[float, ...] = ()
    site: Tuple[int, ...] = ()
    n_samples: int = 500
    burn_in: int = 200
    thinning: int = 5
    replicas: int = 1
    ti_nodes: int = 8
    h_anchor: float = -10.0
    sigma_levels: Tuple[int, ...] = (4, 8, 16, 32)
    log_level: str = "INFO"

    def problems(self) -> List[str]:
        """Every violated constraint, one message per field"""
        out = []
        if self.suite not in KNOWN_SUITES:
            out.append(f"suite: unknown suite {self.suite!r}; valid suites are {', '.join(KNOWN_SUITES)}")
        if self.seed < 0:
            out.append(f"seed: must be >= 0, got {self.seed}")
        if self.workers < 1:
            out.append(f"workers: must be >= 1, got {self.workers}")
        if self.d < 1:
            out.append(f"d: must be >= 1, got {self.d}")
        if self.N < 2:
            out.append(f"N: must be >= 2, got {self.N}")
        if self.origin_mode not in ("corner", "centered"):
            out.append(f"origin_mode: must be corner or centered, got {self.origin_mode!r}")
        if self.law not in LAWS:
            out.append(f"law: must be one of {', '.join(LAWS)}, got {self.law!r}")
        if not math.isfinite(self.beta) or (self.law == "shifted_exponential" and self.beta >= 1):
            out.append(f"beta: outside the domain of the {self.law} law, got {self.beta}")
        if not math.isfinite(self.h):
            out.append(f"h: must be finite, got {self.h}")
        if not self.K >= 0:
            out.append(f"K: must lie in [0, inf], got {self.K}")
        if self.boundary not in ("constant", "sampled"):
            out.append(f"boundary: must be constant or sampled, got {self.boundary!r}")
        if not math.isfinite(self.u):
            out.append(f"u: must be finite, got {self.u}")
        if self.pad is not None and self.pad < 1:
            out.append(f"pad: must be >= 1, got {self.pad}")
        if not self.window > 0:
            out.append(f"window: must be positive, got {self.window}")
        if not self.reward > 0:
            out.append(f"reward: must be positive, got {self.reward}")
        if any(not k >= 0 for k in self.K_list):
            out.append(f"K_list: every K must lie in [0, inf], got {list(self.K_list)}")
        if any(n < 2 for n in self.N_list):
            out.append(f"N_list: every N must be >= 2, got {list(self.N_list)}")
        if self.site and len(self.site) != self.d:
            out.append(f"site: needs {self.d} coordinates, got {list(self.site)}")
        if self.n_samples < 1:
            out.append(f"n_samples: must be >= 1, got {self.n_samples}")
        if self.burn_in < 0:
            out.append(f"burn_in: must be >= 0, got {self.burn_in}")
        if self.thinning < 1:
            out.append(f"thinning: must be >= 1, got {self.thinning}")
        if self.replicas < 1:
            out.append(f"replicas: must be >= 1, got {self.replicas}")
        if self.ti_nodes < 1:
            out.append(f"ti_nodes: must be >= 1, got {self.ti_nodes}")
        if len(self.sigma_levels) < 2 or min(self.sigma_levels) < 2:
            out.append(f"levels: need at least two box sides >= 2, got {list(self.sigma_levels)}")
        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR"):
            out.append(f"level: must be DEBUG, INFO, WARNING or ERROR, got {self.log_level!r}")
        return out

    def validate(self) -> None:
        """Validate configuration values, listing every violation"""
        problems = self.problems()
        if problems:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))

    @property
    def is_valid(self) -> bool:
        """Check if configuration is valid without raising exceptions"""
        try:
            self.validate()
            return True
        except ConfigError:
            return False

    def resolved(self) -> Dict[str, Dict[str, Any]]:
        """Configuration grouped by section, with every default filled in"""
        values = self._asdict()
        out: Dict[str, Dict[str, Any]] = {}
        for section, keys in SCHEMA.items():
            out[section] = {}
            for key, (name, _) in keys.items():
                value = values[name]
                if isinstance(value, float) and math.isinf(value):
                    value = "inf"
                elif isinstance(value, tuple):
                    value = ["inf" if isinstance(v, float) and math.isinf(v) else v for v in value]
                out[section][key] = value
        return out


def split_sections(text: str) -> Tuple[Dict[str, str], List[str]]:
    """Cut the file at [section] headers; returns section bodies and structural problems"""
    bodies: Dict[str, List[str]] = {}
    problems = []
    current: Optional[str] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        match = _SECTION.match(line)
        if match:
            current = match.group(1)
            if current not in SCHEMA:
                problems.append(f"line {lineno}: unknown section [{current}]")
            bodies.setdefault(current, [])
            continue
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if current is None:
            problems.append(f"line {lineno}: key outside any [section]")
            continue
        bodies[current].append(line)
    return {name: "\n".join(lines) for name, lines in bodies.items()}, problems


def parse_config(text: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Build a validated RunConfig from config file text"""
    bodies, problems = split_sections(text)
    fields: Dict[str, Any] = {}
    for section, body in bodies.items():
        schema = SCHEMA.get(section)
        if schema is None:
            continue
        for key, raw in dotenv_values(stream=io.StringIO(body), interpolate=False).items():
            if key not in schema:
                problems.append(f"{key}: unknown key in [{section}]")
                continue
            name, parser = schema[key]
            if raw is None or not raw.strip():
                problems.append(f"{key}: missing value")
                continue
            try:
                fields[name] = parser(raw)
            except ValueError:
                problems.append(f"{key}: cannot parse {raw!r}")
    for name, value in (overrides or {}).items():
        if value is not None:
            fields[name] = value
    for required in ("suite", "seed"):
        if required not in fields:
            problems.append(f"{required}: required in [run]")
    if problems:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))
    config = RunConfig(**fields)
    config.validate()
    return config


def load_config(path: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Load configuration from a config file with validation"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}")
    return parse_config(text, overrides)
