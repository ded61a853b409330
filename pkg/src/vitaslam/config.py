"""Run parameters and the plain-text ``key = value`` config format."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    # visual pathway
    image_width: int = 64
    image_height: int = 32
    profile_len: int = 60
    view_max_shift: int = 10
    view_threshold: float = 0.02

    # tactile pathway
    normal_k: int = 4
    pfh_bins: int = 5
    w_pfh: float = 0.6
    w_sda: float = 0.4
    tactile_threshold: float = 0.0005

    # pose cells
    pc_nx: int = 21
    pc_ny: int = 21
    pc_ntheta: int = 36
    pc_extent_x: float = 10.0
    pc_extent_y: float = 10.0
    pc_inhibition: float = 0.00002
    pc_excite_sigma: float = 1.0
    pc_excite_radius: int = 3
    pc_inject_sigma: float = 1.0
    pc_decode_radius: int = 5
    view_inject_energy: float = 0.02
    tactile_inject_energy: float = 0.02

    # experience map
    exp_match_radius: float = 2.0
    relax_iterations: int = 20
    # shutdown pass; a long chain needs many sweeps to spread a loop correction
    relax_final_iterations: int = 5000
    relax_alpha: float = 0.5

    # world
    arena_width: float = 8.0
    arena_height: float = 5.0
    cylinder_x: float = 2.5
    cylinder_y: float = 2.5
    cylinder_radius: float = 0.4
    cube_x: float = 5.5
    cube_y: float = 2.5
    cube_half: float = 0.35
    wall_shade: float = 0.5
    wall_contrast: float = 0.03
    wall_period: float = 0.7
    cylinder_shade: float = 0.9
    cube_shade: float = 0.12
    background_shade: float = 0.5
    wall_height: float = 0.5
    landmark_height: float = 0.7

    # camera
    camera_fov_deg: float = 90.0
    camera_fog: float = 1.0
    camera_noise: float = 0.03

    # whiskers
    whisker_length: float = 0.25
    whisker_fan_deg: float = 60.0
    whisker_sweep_deg: float = 30.0
    whisker_increments: int = 30
    body_radius: float = 0.06
    collision_noise: float = 0.5

    # trajectory
    start_x: float = 0.6
    speed: float = 0.15
    cycle_period: float = 0.5
    orbit1_radius: float = 0.64
    orbit1_offset: float = -0.02
    return_drop: float = 0.4
    orbit2_radius: float = 0.75
    orbit2_offset: float = 0.0
    odom_sigma_forward: float = 0.01
    odom_sigma_theta_deg: float = 0.5

    @property
    def pc_dims(self) -> tuple:
        return (self.pc_nx, self.pc_ny, self.pc_ntheta)

    @property
    def pc_extent(self) -> tuple:
        return (self.pc_extent_x, self.pc_extent_y)

    def replace(self, **changes) -> "Config":
        unknown = set(changes) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        return cls().replace(**{k: _coerce(k, v) for k, v in d.items()})

    def dumps(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.to_dict().items())


_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(key: str, value):
    kind = _TYPES.get(key)
    if kind is None:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        if kind == "int":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def parse_config(text: str, base: Config | None = None) -> Config:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return (base or Config()).replace(**{k: _coerce(k, v) for k, v in values.items()})


def load_config(path) -> Config:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
