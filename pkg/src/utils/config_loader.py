"""
Configuration Loader
===================

Loads scenario configuration from YAML files, layers defaults, presets and
``--set key=value`` overrides, and validates the result into frozen
``ScenarioConfig`` dataclasses.

Merge order (later wins): built-in defaults, scenario defaults, config file,
overrides. Grids may be written as explicit ``values`` or as
``start/stop/num/spacing``; the resolved config always stores explicit
values so that the echo embedded in every result file parses back to the
same config.
"""

import copy
import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from physics.fock import MAX_CUTOFF, MAX_FOCK_MODES

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parents[1] / 'config'
PRESET_DIR = CONFIG_DIR / 'presets'

SCENARIO_KINDS = ('equilibrium_gc', 'equilibrium_canonical', 'relaxation', 'junction')
DYNAMIC_SCENARIOS = ('relaxation', 'junction')
SUBCOMMANDS = {
    'equilibrium-gc': 'equilibrium_gc',
    'equilibrium-canonical': 'equilibrium_canonical',
    'relax': 'relaxation',
    'junction': 'junction',
}

MAX_CANONICAL_LEVELS = MAX_FOCK_MODES - 1
GRID_KEYS = ('start', 'stop', 'num', 'spacing')
GRID_SECTIONS = ('sweep', 'time')

# Sweep variable -> (section, field); the shared names route by scenario.
_SINGLE_BATH_VARIABLES = {
    'gamma': ('bath', 'gamma'),
    'bandwidth': ('bath', 'bandwidth'),
    'level_count': ('bath', 'level_count'),
    'mu': ('bath', 'mu'),
    'delta': ('bath', 'delta'),
    'mu_offset': ('bath', 'mu_offset'),
    'epsilon0': ('model', 'epsilon0'),
    'beta': ('model', 'beta'),
}
_JUNCTION_VARIABLES = {
    'gamma': ('junction', 'gamma'),
    'bandwidth': ('junction', 'bandwidth'),
    'level_count': ('junction', 'level_count'),
    'mu_bar': ('junction', 'mu_bar'),
    'voltage': ('junction', 'voltage'),
    'asymmetry': ('junction', 'asymmetry'),
    'epsilon0': ('model', 'epsilon0'),
    'beta': ('model', 'beta'),
    'n0_initial': ('model', 'n0_initial'),
}
SWEEP_VARIABLES = {
    'equilibrium_gc': _SINGLE_BATH_VARIABLES,
    'equilibrium_canonical': _SINGLE_BATH_VARIABLES,
    'relaxation': dict(_SINGLE_BATH_VARIABLES, n0_initial=('model', 'n0_initial'), t=None),
    'junction': dict(_JUNCTION_VARIABLES, t=None),
}

# Short names accepted by --set and sweep.variable.
ALIASES = {
    'V': 'voltage',
    'a': 'asymmetry',
    'Gamma': 'gamma',
    'W': 'bandwidth',
    'K': 'level_count',
    'eps0': 'epsilon0',
    'n0': 'n0_initial',
    'time': 't',
}
OVERRIDE_KEYS = {
    'M': 'output.cutoff',
    'N': 'output.canonical_particles',
    't_eval': 'time.t_eval',
}


class ConfigError(ValueError):
    """Configuration problem; the message starts with the dotted key path."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


def get_default_config():
    """Return default configuration."""
    return {
        'model': {'epsilon0': 0.0, 'n0_initial': 0.0, 'beta': 1.0},
        'bath': {
            'gamma': 1.0,
            'bandwidth': 50.0,
            'bandwidth_unit': 'gamma',
            'level_count': 400,
            'mu': 0.0,
            'delta': None,
            'mu_offset': None,
        },
        'junction': {
            'gamma': 0.01,
            'bandwidth': 50.0,
            'bandwidth_unit': 'gamma',
            'level_count': 300,
            'mu_bar': 0.0,
            'voltage': 0.0,
            'asymmetry': 0.0,
        },
        'time': {'start': 0.01, 'stop': 20.0, 'num': 60, 'spacing': 'log', 't_eval': 10.0},
        'output': {
            'cutoff': 4,
            'canonical_particles': None,
            'compare_grand_canonical': True,
            'log_file': None,
        },
    }


def get_scenario_defaults(scenario):
    """Defaults layered on top of the global ones for a single scenario kind."""
    if scenario == 'relaxation':
        return {
            'model': {'n0_initial': 0.1},
            'bath': {'gamma': 0.01, 'delta': 1.5, 'mu_offset': 1.0},
            'sweep': {'variable': 't'},
        }
    if scenario == 'junction':
        return {'model': {'n0_initial': 0.5}, 'sweep': {'variable': 't'}}
    if scenario == 'equilibrium_canonical':
        return {'bath': {'bandwidth': 5.0, 'level_count': 7}, 'sweep': {'variable': 'gamma'}}
    return {'sweep': {'variable': 'gamma'}}


def _merge(base, override, path=''):
    """Deep-merge override into a copy of base; grid styles replace each other."""
    result = copy.deepcopy(base)
    for key, value in override.items():
        current = result.get(key)
        if isinstance(value, dict) and isinstance(current, dict):
            if path == '' and key in GRID_SECTIONS:
                current = _drop_other_grid_style(current, value)
            result[key] = _merge(current, value, f"{path}{key}.")
        else:
            result[key] = copy.deepcopy(value)
    return result


def _drop_other_grid_style(section, incoming):
    section = dict(section)
    if 'values' in incoming:
        for key in GRID_KEYS:
            section.pop(key, None)
    elif any(key in incoming for key in GRID_KEYS):
        section.pop('values', None)
    return section


def _number(key, value):
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    return float(value)


def _optional_number(key, value):
    return None if value is None else _number(key, value)


def _integer(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(key, f"expected an integer, got {value!r}")
    return int(value)


def _check_keys(section, mapping, allowed):
    if mapping is None:
        return {}
    if not isinstance(mapping, dict):
        raise ConfigError(section, f"expected a mapping, got {type(mapping).__name__}")
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"{section}.{key}", "unknown key")
    return mapping


def _resolve_grid(section, mapping):
    """Explicit values from either a values list or start/stop/num/spacing."""
    has_values = mapping.get('values') is not None
    has_grid = any(mapping.get(key) is not None for key in GRID_KEYS)
    if has_values and has_grid:
        raise ConfigError(section, "give either values or start/stop/num/spacing, not both")
    if has_values:
        values = mapping['values']
        if not isinstance(values, (list, tuple)):
            values = [values]
        return tuple(_number(f"{section}.values[{i}]", v) for i, v in enumerate(values))
    if not has_grid:
        return None
    for key in ('start', 'stop', 'num'):
        if mapping.get(key) is None:
            raise ConfigError(f"{section}.{key}", "required when the grid is given by start/stop/num")
    start = _number(f"{section}.start", mapping['start'])
    stop = _number(f"{section}.stop", mapping['stop'])
    num = _integer(f"{section}.num", mapping['num'])
    spacing = mapping.get('spacing') or 'linear'
    if num < 1:
        raise ConfigError(f"{section}.num", f"must be >= 1, got {num}")
    if spacing == 'linear':
        grid = np.linspace(start, stop, num)
    elif spacing == 'log':
        if start <= 0 or stop <= 0:
            raise ConfigError(f"{section}.start", "log spacing needs positive start and stop")
        grid = np.geomspace(start, stop, num)
    else:
        raise ConfigError(f"{section}.spacing", f"must be 'linear' or 'log', got {spacing!r}")
    return tuple(float(v) for v in grid)


def _check_grid(section, values):
    if not values:
        raise ConfigError(section, "grid must not be empty")
    steps = np.diff(np.asarray(values))
    if np.any(steps <= 0):
        raise ConfigError(section, "grid must be strictly increasing")


@dataclass(frozen=True)
class ModelSection:
    epsilon0: float = 0.0
    n0_initial: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.n0_initial <= 1.0:
            raise ConfigError('model.n0_initial', f"n0_initial must lie in [0, 1], got {self.n0_initial}")
        if not self.beta > 0:
            raise ConfigError('model.beta', f"beta must be > 0, got {self.beta}")


@dataclass(frozen=True)
class BathSection:
    gamma: float = 1.0
    bandwidth: float = 50.0
    bandwidth_unit: str = 'gamma'
    level_count: int = 400
    mu: float = 0.0
    delta: Optional[float] = None
    mu_offset: Optional[float] = None

    def __post_init__(self):
        _check_bath('bath', self.gamma, self.bandwidth, self.bandwidth_unit, self.level_count)

    @property
    def absolute_bandwidth(self) -> float:
        return self.bandwidth * self.gamma if self.bandwidth_unit == 'gamma' else self.bandwidth


@dataclass(frozen=True)
class JunctionSection:
    gamma: float = 0.01
    bandwidth: float = 50.0
    bandwidth_unit: str = 'gamma'
    level_count: int = 300
    mu_bar: float = 0.0
    voltage: float = 0.0
    asymmetry: float = 0.0

    def __post_init__(self):
        _check_bath('junction', self.gamma, self.bandwidth, self.bandwidth_unit, self.level_count)
        if abs(self.asymmetry) > 1:
            raise ConfigError('junction.asymmetry', f"asymmetry |a| must be <= 1, got {self.asymmetry}")

    @property
    def absolute_bandwidth(self) -> float:
        return self.bandwidth * self.gamma if self.bandwidth_unit == 'gamma' else self.bandwidth


def _check_bath(section, gamma, bandwidth, unit, level_count):
    if unit not in ('gamma', 'kT'):
        raise ConfigError(f"{section}.bandwidth_unit", f"must be 'gamma' or 'kT', got {unit!r}")
    if not gamma >= 0:
        raise ConfigError(f"{section}.gamma", f"coupling gamma must be >= 0, got {gamma}")
    if not bandwidth > 0:
        raise ConfigError(f"{section}.bandwidth", f"bandwidth W must be > 0, got {bandwidth}")
    if unit == 'gamma' and gamma == 0:
        raise ConfigError(f"{section}.gamma", "bandwidth is given in units of gamma, gamma must be > 0")
    if level_count < 2:
        raise ConfigError(f"{section}.level_count", f"level_count K must be >= 2, got {level_count}")


@dataclass(frozen=True)
class SweepSection:
    variable: str
    values: tuple

    def __post_init__(self):
        _check_grid('sweep.values', self.values)


@dataclass(frozen=True)
class TimeSection:
    values: tuple
    t_eval: float = 10.0

    def __post_init__(self):
        _check_grid('time.values', self.values)
        if self.values[0] < 0:
            raise ConfigError('time.values', f"times must be >= 0, got {self.values[0]}")
        if self.t_eval < 0:
            raise ConfigError('time.t_eval', f"must be >= 0, got {self.t_eval}")


@dataclass(frozen=True)
class OutputSection:
    cutoff: int = 4
    canonical_particles: Optional[int] = None
    compare_grand_canonical: bool = True
    log_file: Optional[str] = None

    def __post_init__(self):
        if not 1 <= self.cutoff <= MAX_CUTOFF:
            raise ConfigError('output.cutoff', f"cutoff M must lie in 1..{MAX_CUTOFF}, got {self.cutoff}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated configuration of one scenario run."""

    scenario: str
    model: ModelSection
    bath: BathSection
    junction: JunctionSection
    sweep: SweepSection
    time: TimeSection
    output: OutputSection
    description: str = ''

    def __post_init__(self):
        if self.scenario not in SCENARIO_KINDS:
            raise ConfigError('scenario', f"must be one of {', '.join(SCENARIO_KINDS)}, got {self.scenario!r}")
        if self.sweep.variable not in SWEEP_VARIABLES[self.scenario]:
            allowed = ', '.join(sorted(SWEEP_VARIABLES[self.scenario]))
            raise ConfigError('sweep.variable', f"{self.sweep.variable!r} cannot be swept in {self.scenario} (allowed: {allowed})")
        if self.scenario in DYNAMIC_SCENARIOS and not self.gamma > 0:
            raise ConfigError(f"{self.bath_section_name}.gamma", "time is measured in units of 1/gamma, gamma must be > 0")
        modes = self.mode_count
        # The canonical scenario reports the full negativity; no chain cutoff applies.
        if self.scenario != 'equilibrium_canonical' and self.output.cutoff + 1 > modes:
            raise ConfigError('output.cutoff', f"cutoff M={self.output.cutoff} needs at least {self.output.cutoff + 1} modes, model has {modes}")
        if self.scenario == 'equilibrium_canonical':
            if self.bath.level_count > MAX_CANONICAL_LEVELS:
                raise ConfigError('bath.level_count', f"canonical scenario is limited to K <= {MAX_CANONICAL_LEVELS}, got {self.bath.level_count}")
            n = self.output.canonical_particles
            if n is not None and not 0 <= n <= modes:
                raise ConfigError('output.canonical_particles', f"particle number N must lie in 0..{modes}, got {n}")

    @property
    def bath_section_name(self) -> str:
        return 'junction' if self.scenario == 'junction' else 'bath'

    @property
    def gamma(self) -> float:
        return self.junction.gamma if self.scenario == 'junction' else self.bath.gamma

    @property
    def mode_count(self) -> int:
        if self.scenario == 'junction':
            return 1 + 2 * self.junction.level_count
        return 1 + self.bath.level_count

    def sweep_key(self, variable=None) -> Optional[tuple]:
        """(section, field) changed by the sweep variable; None for time."""
        return SWEEP_VARIABLES[self.scenario][variable or self.sweep.variable]

    def at(self, variable, value) -> 'ScenarioConfig':
        """Copy of this config with the sweep variable set to value."""
        key = self.sweep_key(variable)
        if key is None:
            raise ConfigError('sweep.variable', "time points are not config values")
        section_name, name = key
        section = getattr(self, section_name)
        if name == 'level_count':
            value = _integer(f"{section_name}.{name}", value)
        return dataclasses.replace(self, **{section_name: dataclasses.replace(section, **{name: value})})

    def to_dict(self) -> dict:
        """Plain nested mapping with explicit grids, suitable for YAML."""
        def plain(value):
            if isinstance(value, tuple):
                return [plain(v) for v in value]
            if isinstance(value, dict):
                return {k: plain(v) for k, v in value.items()}
            return value
        data = plain(dataclasses.asdict(self))
        if not data['description']:
            del data['description']
        return data

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), default_flow_style=None, sort_keys=False)


_SECTION_TYPES = {
    'model': ModelSection,
    'bath': BathSection,
    'junction': JunctionSection,
    'output': OutputSection,
}
_FIELD_KINDS = {
    'level_count': _integer,
    'cutoff': _integer,
}


def _build_section(name, mapping):
    cls = _SECTION_TYPES[name]
    allowed = {f.name for f in dataclasses.fields(cls)}
    mapping = _check_keys(name, mapping, allowed)
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in mapping:
            continue
        key, value = f"{name}.{f.name}", mapping[f.name]
        if f.name in _FIELD_KINDS:
            kwargs[f.name] = _FIELD_KINDS[f.name](key, value)
        elif f.name == 'canonical_particles':
            kwargs[f.name] = None if value is None else _integer(key, value)
        elif f.name == 'compare_grand_canonical':
            if not isinstance(value, bool):
                raise ConfigError(key, f"expected true or false, got {value!r}")
            kwargs[f.name] = value
        elif f.name in ('bandwidth_unit', 'log_file'):
            if value is not None and not isinstance(value, str):
                raise ConfigError(key, f"expected a string, got {value!r}")
            kwargs[f.name] = value
        elif f.name in ('delta', 'mu_offset'):
            kwargs[f.name] = _optional_number(key, value)
        else:
            kwargs[f.name] = _number(key, value)
    return cls(**kwargs)


def canonical_variable(name):
    return ALIASES.get(name, name)


def validate_config(mapping) -> ScenarioConfig:
    """Validate a raw mapping (defaults are applied here) into a ScenarioConfig."""
    if not isinstance(mapping, dict):
        raise ConfigError('config', f"expected a mapping at the top level, got {type(mapping).__name__}")
    allowed = {'scenario', 'description', 'model', 'bath', 'junction', 'sweep', 'time', 'output'}
    for key in mapping:
        if key not in allowed:
            raise ConfigError(key, "unknown key")
    scenario = mapping.get('scenario')
    if scenario not in SCENARIO_KINDS:
        raise ConfigError('scenario', f"must be one of {', '.join(SCENARIO_KINDS)}, got {scenario!r}")
    merged = _merge(_merge(get_default_config(), get_scenario_defaults(scenario)), mapping)

    sections = {name: _build_section(name, merged.get(name)) for name in _SECTION_TYPES}

    time_map = _check_keys('time', merged.get('time'), {'values', 't_eval', *GRID_KEYS})
    time_values = _resolve_grid('time', time_map)
    if time_values is None:
        raise ConfigError('time.values', "a time grid is required")
    time = TimeSection(time_values, _number('time.t_eval', time_map.get('t_eval', 10.0)))

    sweep_map = _check_keys('sweep', merged.get('sweep'), {'variable', 'values', *GRID_KEYS})
    variable = sweep_map.get('variable')
    if not isinstance(variable, str):
        raise ConfigError('sweep.variable', f"expected a variable name, got {variable!r}")
    variable = canonical_variable(variable)
    values = _resolve_grid('sweep', sweep_map)
    if values is None:
        if variable == 't':
            values = time.values
        else:
            key = SWEEP_VARIABLES[scenario].get(variable)
            if key is None:
                raise ConfigError('sweep.variable', f"{variable!r} cannot be swept in {scenario}")
            current = getattr(sections[key[0]], key[1])
            if current is None:
                raise ConfigError('sweep.values', f"no grid given and {key[0]}.{key[1]} is unset")
            values = (float(current),)

    description = mapping.get('description') or ''
    if not isinstance(description, str):
        raise ConfigError('description', f"expected a string, got {description!r}")

    config = ScenarioConfig(
        scenario=scenario,
        sweep=SweepSection(variable, values),
        time=time,
        description=description,
        **sections,
    )
    if variable != 't':
        for i, value in enumerate(values):
            try:
                config.at(variable, value)
            except ConfigError as e:
                raise ConfigError(f"sweep.values[{i}]", str(e)) from e
    return config


def parse_config(text) -> ScenarioConfig:
    """Parse YAML text into a validated ScenarioConfig."""
    try:
        mapping = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError('config', f"invalid YAML: {e}") from e
    return validate_config(mapping or {})


def override_key(key, scenario):
    """Dotted config key for a --set key, expanding short aliases."""
    if key in OVERRIDE_KEYS:
        return OVERRIDE_KEYS[key]
    if '.' in key:
        return key
    name = canonical_variable(key)
    target = SWEEP_VARIABLES.get(scenario, _SINGLE_BATH_VARIABLES).get(name)
    if target is None:
        raise ConfigError(key, f"unknown parameter for {scenario}")
    return '.'.join(target)


def list_presets(directory=None):
    """Mapping of preset name to its description, sorted by name."""
    directory = Path(directory or PRESET_DIR)
    presets = {}
    for path in sorted(directory.glob('*.yaml')):
        with open(path, 'r') as file:
            data = yaml.safe_load(file) or {}
        presets[path.stem] = data.get('description', '')
    return presets


def preset_path(name, directory=None):
    path = Path(directory or PRESET_DIR) / f"{name}.yaml"
    if not path.exists():
        raise ConfigError('config', f"unknown preset {name!r}")
    return path


class ConfigLoader:
    """Manages scenario configuration loading, overrides and validation."""

    def __init__(self, config_path=None, scenario=None):
        """Initialize configuration loader."""
        self.config_path = config_path
        self.scenario = scenario
        self.config = {}
        self.load_config()

    def load_config(self):
        """Load configuration from YAML file (a preset name is accepted too)."""
        self.config = {}
        if self.config_path is not None:
            path = Path(self.config_path)
            if not path.exists() and not path.suffix:
                path = preset_path(str(self.config_path))
            if not path.exists():
                logger.error(f"Config file not found: {path}")
                raise ConfigError('config', f"file not found: {path}")
            try:
                with open(path, 'r') as file:
                    self.config = yaml.safe_load(file) or {}
            except yaml.YAMLError as e:
                raise ConfigError('config', f"invalid YAML in {path}: {e}") from e
            if not isinstance(self.config, dict):
                raise ConfigError('config', f"{path} must contain a mapping")
            logger.info(f"Configuration loaded from {path}")

        declared = self.config.get('scenario')
        if self.scenario is None:
            self.scenario = declared
        elif declared is not None and declared != self.scenario:
            raise ConfigError('scenario', f"config declares {declared!r} but {self.scenario!r} was requested")
        self.config['scenario'] = self.scenario

    def set(self, key, value):
        """Set configuration value."""
        keys = key.split('.')
        config = self.config

        for k in keys[:-1]:
            if k not in config or not isinstance(config[k], dict):
                config[k] = {}
            config = config[k]

        if len(keys) == 2 and keys[0] in GRID_SECTIONS:
            kept = _drop_other_grid_style(config, {keys[1]: value})
            config.clear()
            config.update(kept)
        config[keys[-1]] = value

    def apply_override(self, assignment):
        """Apply one ``key=value`` override; the value is parsed as YAML."""
        if '=' not in assignment:
            raise ConfigError(assignment, "override must look like key=value")
        key, raw = assignment.split('=', 1)
        key = key.strip()
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as e:
            raise ConfigError(key, f"cannot parse value {raw!r}: {e}") from e
        dotted = override_key(key, self.scenario)
        if dotted == 'sweep.variable' and isinstance(value, str):
            value = canonical_variable(value)
        self.set(dotted, value)
        logger.debug(f"Override {dotted} = {value!r}")

    def resolve(self) -> ScenarioConfig:
        return validate_config(self.config)
