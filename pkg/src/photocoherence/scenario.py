"""Scenario files and the end-to-end runner.

A scenario is a TOML (or JSON) document whose physical values carry their
unit in the key name (``_fs``, ``_hartree``, ``_bohr``, ``_au``).  Values
are converted to atomic units once, here, and everything downstream works
in atomic units.
"""

from __future__ import annotations

import copy
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from . import io as pio
from .coherence import CoherenceTrace, EnsembleResult, coherence_trace, ensemble_average
from .core import RadialGrid, SeedPolicy, TimeGrid, au_to_fs, derive_stream_seed, fs_to_au
from .eigensolver import EigenState, bound_states
from .field import (EnvelopeSpec, FieldSpec, JumpProcessSpec, LightField, mean_spectrum,
                    normalize_flux, spectrum, synthesize)
from .potentials import ChannelSpec, DipoleSpec, PesSpec, effective_potential
from .propagator import AbsorberSpec, PropagationRun, propagate, spatial_moments

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

BUNDLED = ("fig3_top", "fig3_middle", "fig3_bottom")
WHICH = ("field", "eigenstate", "propagate", "coherence", "all")

_REQ = object()

_ENVELOPE_KEYS = {
    "envelope": (str, _REQ),
    "peak_amplitude_au": (float, 1.0),
    "center_fs": (float, 0.0),
    "width_fs": (float, 1.0),
    "start_fs": (float, 0.0),
    "duration_fs": (float, 1.0),
    "exponent": (float, 1.0),
}
_PES_KEYS = {
    "pes": (str, _REQ),
    "W0_hartree": (float, 0.0),
    "R0_bohr": (float, 0.0),
    "a_bohr": (float, 1.0),
    "W_inf_hartree": (float, 0.0),
    "mu_au": (float, _REQ),
    "J": (int, 0),
}
SCHEMA = {
    "scenario": {"name": (str, "unnamed"), "realizations": (int, 10), "master_seed": (int, 0)},
    "grid": {"r_min_bohr": (float, 0.1), "r_max_bohr": (float, _REQ), "dr_bohr": (float, 0.02),
             "ground_r_max_bohr": (float, None)},
    "time": {"t_start_fs": (float, 0.0), "t_end_fs": (float, 300.0), "dt_fs": (float, 0.003),
             "snapshot_stride": (int, 100)},
    "field": {"omega_center_hartree": (float, 0.1), "normalize_flux": (bool, True)},
    "field.coherent": dict(_ENVELOPE_KEYS),
    "field.incoherent": {**_ENVELOPE_KEYS, "mean_interval_fs": (float, 7.0),
                         "phase_range_rad": (float, float(np.pi)),
                         "freq_shift_range_hartree": (float, 0.0175)},
    "dipole": {"slope_au": (float, 0.5)},
    "ground": {**_PES_KEYS, "vibrational_level": (int, 5)},
    "excited": dict(_PES_KEYS),
    "absorber": {"enabled": (bool, False), "start_bohr": (float, None),
                 "strength_hartree": (float, 0.01), "power": (float, 2.0)},
    "output": {"directory": (str, "out"), "density_format": (str, "npy"),
               "density_r_stride": (int, 5), "coherence_eps": (float, 1e-20),
               "spectrum_max_hartree": (float, 0.5)},
}
OPTIONAL_SECTIONS = {"scenario", "time", "field", "dipole", "absorber", "output"}


class ConfigError(ValueError):
    def __init__(self, diagnostics: list[str]):
        super().__init__(diagnostics[0] if diagnostics else "invalid configuration")
        self.diagnostics = diagnostics


def load_raw(source) -> dict:
    """Read a scenario by bundled name or from a .toml / .json file.

    A run manifest (JSON with a ``config`` entry) is accepted as well.
    """
    source = str(source)
    if source in BUNDLED:
        text = resources.files("photocoherence.scenarios").joinpath(source + ".toml").read_text()
        return tomllib.loads(text)
    path = Path(source)
    if path.suffix == ".json":
        data = json.loads(path.read_text())
        return data["config"] if "config" in data else data
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _check_table(table, schema, prefix, diags):
    out = {}
    if not isinstance(table, dict):
        diags.append(f"{prefix}: expected a table")
        return out
    for key in table:
        if key not in schema:
            diags.append(f"{prefix}.{key}: unknown key")
    for key, (typ, default) in schema.items():
        name = f"{prefix}.{key}"
        if key not in table:
            if default is _REQ:
                diags.append(f"{name}: required key missing")
            else:
                out[key] = default
            continue
        value = table[key]
        if typ is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            out[key] = float(value)
        elif typ is int and isinstance(value, int) and not isinstance(value, bool):
            out[key] = value
        elif typ is bool and isinstance(value, bool):
            out[key] = value
        elif typ is str and isinstance(value, str):
            out[key] = value
        elif value is None and default is None:
            out[key] = None
        else:
            diags.append(f"{name}: expected {typ.__name__}, got {value!r}")
    return out


def resolve(raw: dict) -> tuple[dict, list[str]]:
    """Fill defaults and check keys and types; returns ``(resolved, diagnostics)``."""
    diags: list[str] = []
    res: dict = {}
    known = {s.split(".")[0] for s in SCHEMA}
    for key in raw:
        if key not in known:
            diags.append(f"{key}: unknown section")
    for section in ("scenario", "grid", "time", "field", "dipole", "ground", "absorber", "output"):
        if section not in raw and section not in OPTIONAL_SECTIONS:
            diags.append(f"{section}: required section missing")
        table = dict(raw.get(section, {}))
        if section == "field":
            sub = {k: table.pop(k) for k in ("coherent", "incoherent") if k in table}
            res["field"] = _check_table(table, SCHEMA["field"], "field", diags)
            for k in ("coherent", "incoherent"):
                if k not in sub:
                    diags.append(f"field.{k}: required section missing")
                res["field"][k] = _check_table(sub.get(k, {}), SCHEMA[f"field.{k}"], f"field.{k}", diags)
            continue
        res[section] = _check_table(table, SCHEMA[section], section, diags)
    excited = raw.get("excited", [])
    if not isinstance(excited, list) or len(excited) != 2:
        diags.append("excited: exactly two excited channels are required")
        excited = excited if isinstance(excited, list) else []
    res["excited"] = [_check_table(t, SCHEMA["excited"], f"excited[{i}]", diags)
                      for i, t in enumerate(excited)]
    return res, diags


def _pes(tab) -> PesSpec:
    return PesSpec(tab["pes"], tab["W0_hartree"], tab["R0_bohr"], tab["a_bohr"], tab["W_inf_hartree"])


def _envelope(tab) -> EnvelopeSpec:
    return EnvelopeSpec(tab["envelope"], tab["peak_amplitude_au"], center=fs_to_au(tab["center_fs"]),
                        width=fs_to_au(tab["width_fs"]), start=fs_to_au(tab["start_fs"]),
                        duration=fs_to_au(tab["duration_fs"]), exponent=tab["exponent"])


@dataclass(frozen=True)
class ScenarioConfig:
    values: dict  # resolved configuration, input units
    grid: RadialGrid
    ground_grid: RadialGrid
    time_grid: TimeGrid
    coherent: FieldSpec
    incoherent: FieldSpec
    ground: ChannelSpec
    vibrational_level: int
    excited: tuple[ChannelSpec, ChannelSpec]
    dipole: DipoleSpec
    absorber: AbsorberSpec | None

    @property
    def name(self) -> str:
        return self.values["scenario"]["name"]

    @property
    def realizations(self) -> int:
        return self.values["scenario"]["realizations"]

    @property
    def master_seed(self) -> int:
        return self.values["scenario"]["master_seed"]

    @property
    def stride(self) -> int:
        return self.values["time"]["snapshot_stride"]

    @property
    def output(self) -> dict:
        return self.values["output"]


def _build(res: dict, diags: list[str]) -> ScenarioConfig | None:
    def attempt(key, fn):
        try:
            return fn()
        except (ValueError, TypeError) as exc:
            diags.append(f"{key}: {exc}")
            return None

    sc, g, t, f, out = res["scenario"], res["grid"], res["time"], res["field"], res["output"]
    if sc["realizations"] < 1:
        diags.append("scenario.realizations: must be >= 1")
    if not 0 <= sc["master_seed"] < 2 ** 64:
        diags.append("scenario.master_seed: must be an unsigned 64-bit integer")
    if not t["dt_fs"] > 0:
        diags.append("time.dt_fs: must be > 0")
    if t["snapshot_stride"] < 1:
        diags.append("time.snapshot_stride: must be >= 1")
    if not g["dr_bohr"] > 0:
        diags.append("grid.dr_bohr: must be > 0")
    if out["density_format"] not in ("npy", "csv"):
        diags.append("output.density_format: must be 'npy' or 'csv'")
    if out["density_r_stride"] < 1:
        diags.append("output.density_r_stride: must be >= 1")
    if diags:
        return None

    grid = attempt("grid", lambda: RadialGrid.from_spacing(g["r_min_bohr"], g["r_max_bohr"], g["dr_bohr"]))
    tg = attempt("time", lambda: TimeGrid.from_fs(t["t_start_fs"], t["t_end_fs"], t["dt_fs"]))
    ground_grid = None
    if grid is not None:
        cut = g["ground_r_max_bohr"]
        if cut is None:
            ground_grid = grid
        elif not grid.r_min < cut <= grid.r_max + 1e-9:
            diags.append("grid.ground_r_max_bohr: must lie inside (r_min_bohr, r_max_bohr]")
        else:
            ground_grid = grid.truncated(cut)

    fields = {}
    for kind in ("coherent", "incoherent"):
        tab = f[kind]
        env = attempt(f"field.{kind}", lambda: _envelope(tab))
        jumps = None
        if kind == "incoherent":
            jumps = attempt("field.incoherent", lambda: JumpProcessSpec(
                fs_to_au(tab["mean_interval_fs"]), tab["phase_range_rad"], tab["freq_shift_range_hartree"]))
        if env is None or (kind == "incoherent" and jumps is None):
            continue
        spec = attempt("field.omega_center_hartree",
                       lambda: FieldSpec(env, f["omega_center_hartree"], jumps))
        if spec is None:
            continue
        if tg is not None:
            lo, hi = env.support
            if lo < tg.t_start - 1e-9 * tg.dt or hi > tg.t_end + 1e-9 * tg.dt:
                diags.append(
                    f"field.{kind}: envelope support [{au_to_fs(lo):.4g}, {au_to_fs(hi):.4g}] fs "
                    f"exceeds the propagation window [{t['t_start_fs']}, {t['t_end_fs']}] fs "
                    "(field/grid mismatch)")
        fields[kind] = spec

    gtab = res["ground"]
    ground = attempt("ground", lambda: ChannelSpec(_pes(gtab), gtab["J"], gtab["mu_au"]))
    if gtab["vibrational_level"] < 0:
        diags.append("ground.vibrational_level: must be >= 0")
    excited = [attempt(f"excited[{i}]", lambda tab=tab: ChannelSpec(_pes(tab), tab["J"], tab["mu_au"]))
               for i, tab in enumerate(res["excited"])]
    dipole = attempt("dipole", lambda: DipoleSpec("linear", res["dipole"]["slope_au"]))

    absorber = None
    ab = res["absorber"]
    if ab["enabled"]:
        if ab["start_bohr"] is None:
            diags.append("absorber.start_bohr: required when the absorber is enabled")
        else:
            absorber = attempt("absorber", lambda: AbsorberSpec(ab["start_bohr"], ab["strength_hartree"], ab["power"]))
            if absorber is not None and grid is not None and not absorber.start < grid.r_max:
                diags.append("absorber.start_bohr: must lie below grid.r_max_bohr")
    if diags:
        return None
    return ScenarioConfig(res, grid, ground_grid, tg, fields["coherent"], fields["incoherent"], ground,
                          gtab["vibrational_level"], tuple(excited), dipole, absorber)


def validate(raw: dict) -> list[str]:
    """Diagnostics for a raw configuration; empty iff it can be run."""
    res, diags = resolve(raw)
    if diags:
        return diags
    _build(res, diags)
    return diags


def build(raw: dict, overrides: dict | None = None) -> ScenarioConfig:
    """Resolve, apply ``{"section.key": value}`` overrides, and validate."""
    raw = copy.deepcopy(raw)
    for dotted, value in (overrides or {}).items():
        section, key = dotted.split(".", 1)
        raw.setdefault(section, {})[key] = value
    res, diags = resolve(raw)
    cfg = None if diags else _build(res, diags)
    if diags:
        raise ConfigError(diags)
    return cfg


def load(source, overrides: dict | None = None) -> ScenarioConfig:
    return build(load_raw(source), overrides)


# ---------------------------------------------------------------------------


@dataclass
class PairResult:
    """Both excited channels driven by one field realization."""

    trace: CoherenceTrace
    moments: np.ndarray  # (channel, snapshot, [mean, variance])
    final_population: tuple[float, float]
    absorbed: tuple[float, float]
    densities: list[np.ndarray] | None = None


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    ground_state: EigenState | None = None
    coherent_field: LightField | None = None
    incoherent_fields: list[LightField] = field(default_factory=list)
    coherent: PairResult | None = None
    incoherent: list[PairResult] = field(default_factory=list)
    ensemble: EnsembleResult | None = None
    files: list[Path] = field(default_factory=list)


def ground_state(cfg: ScenarioConfig) -> EigenState:
    v = cfg.vibrational_level
    states = bound_states(cfg.ground, cfg.ground_grid, v + 1)
    if len(states) <= v:
        raise ValueError(f"ground channel has no bound level v={v} on the configured grid")
    return states[v]


def make_fields(cfg: ScenarioConfig, count: int) -> tuple[LightField, list[LightField]]:
    coh = synthesize(cfg.coherent, cfg.time_grid)
    policy = SeedPolicy(cfg.master_seed)
    incs = []
    for k in range(count):
        light = synthesize(cfg.incoherent, cfg.time_grid, policy.for_realization(k))
        if cfg.values["field"]["normalize_flux"]:
            light = normalize_flux(light, coh.flux)
        incs.append(light)
    return coh, incs


def propagate_pair(cfg: ScenarioConfig, light: LightField, source: EigenState,
                   keep_density: bool = False) -> PairResult:
    series = [propagate(PropagationRun(cfg.grid, ch, light, source, cfg.dipole, cfg.stride, cfg.absorber))
              for ch in cfg.excited]
    trace = coherence_trace(series[0], series[1], cfg.output["coherence_eps"])
    moments = np.array([[spatial_moments(cfg.grid, u) for u in s.amplitudes] for s in series])
    dens = None
    if keep_density:
        dens = [pio.density_matrix(s, cfg.output["density_r_stride"]) for s in series]
    return PairResult(trace, moments,
                      (float(series[0].population[-1]), float(series[1].population[-1])),
                      (float(series[0].absorbed[-1]), float(series[1].absorbed[-1])), dens)


def _pair_task(args):
    cfg, light, source, keep = args
    return propagate_pair(cfg, light, source, keep)


def _map(tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [_pair_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_pair_task, tasks))


def _moments_columns(res: PairResult, times):
    m = res.moments
    return [times, m[0, :, 0], m[0, :, 1], m[1, :, 0], m[1, :, 1]]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_scenario(cfg: ScenarioConfig, which: str = "all", out_dir=None, workers: int = 1) -> ScenarioResult:
    """Run one stage (or all of them) and write its files under ``out_dir``."""
    if which not in WHICH:
        raise ValueError(f"unknown stage {which!r}; choose from {WHICH}")
    out = Path(out_dir if out_dir is not None else cfg.output["directory"])
    out.mkdir(parents=True, exist_ok=True)
    result = ScenarioResult(cfg)
    files = result.files
    n_real = cfg.realizations
    smax = cfg.output["spectrum_max_hartree"]

    if which in ("field", "propagate", "coherence", "all"):
        count = 1 if which == "propagate" else n_real
        result.coherent_field, result.incoherent_fields = make_fields(cfg, count)
    if which in ("field", "all"):
        coh, incs = result.coherent_field, result.incoherent_fields
        files.append(pio.write_field(out / "fields/field_coherent.csv", coh))
        files.append(pio.write_spectrum(out / "spectra/spectrum_coherent.csv", spectrum(coh), smax))
        specs = []
        for k, light in enumerate(incs):
            files.append(pio.write_field(out / f"fields/field_incoherent_{k:03d}.csv", light))
            files.append(pio.write_jumps(out / f"fields/jumps_incoherent_{k:03d}.csv", light))
            specs.append(spectrum(light))
            files.append(pio.write_spectrum(out / f"spectra/spectrum_incoherent_{k:03d}.csv", specs[-1], smax))
        files.append(pio.write_spectrum(out / "spectra/spectrum_incoherent_mean.csv", mean_spectrum(specs), smax))

    if which in ("eigenstate", "propagate", "coherence", "all"):
        result.ground_state = ground_state(cfg)
    if which in ("eigenstate", "all"):
        gs = result.ground_state
        v = cfg.vibrational_level
        files.append(pio.write_eigenstate(out / f"states/ground_v{v}.csv", gs))
        r = cfg.grid.r
        files.append(pio.write_pes(out / "states/pes_ground.csv", r, effective_potential(cfg.ground, r)))
        for i, ch in enumerate(cfg.excited, start=1):
            files.append(pio.write_pes(out / f"states/pes_excited_{i}.csv", r, effective_potential(ch, r)))

    if which in ("propagate", "coherence", "all"):
        gs = result.ground_state
        lights = [result.coherent_field] + result.incoherent_fields
        tasks = [(cfg, light, gs, which in ("propagate", "all") and k <= 1) for k, light in enumerate(lights)]
        pairs = _map(tasks, workers)
        result.coherent, result.incoherent = pairs[0], pairs[1:]
        times_fs = au_to_fs(result.coherent.trace.times)
        labels = ["coherent"] + [f"incoherent_{k:03d}" for k in range(len(pairs) - 1)]
        if which in ("propagate", "all"):
            fmt = cfg.output["density_format"]
            for label, pair in zip(labels[:2], pairs[:2]):
                for i, dens in enumerate(pair.densities, start=1):
                    files.append(pio.write_density(out / f"densities/density_{label}_ch{i}", dens, fmt))
            for label, pair in zip(labels, pairs):
                files.append(pio._write(out / f"moments/moments_{label}.csv",
                                        "t_fs,mean_R1_bohr,var_R1_bohr2,mean_R2_bohr,var_R2_bohr2",
                                        _moments_columns(pair, times_fs)))
        if which in ("coherence", "all"):
            for label, pair in zip(labels, pairs):
                files.append(pio.write_trace(out / f"coherence/coherence_{label}.csv", pair.trace))
            result.ensemble = ensemble_average([p.trace for p in result.incoherent])
            files.append(pio.write_ensemble(out / "coherence/ensemble_incoherent.csv", result.ensemble))
            files.append(pio.write_ensemble(out / "coherence/ensemble_coherent.csv",
                                            ensemble_average([result.coherent.trace])))

    files.append(write_manifest(out / "manifest.json", result, which))
    return result


def write_manifest(path: Path, result: ScenarioResult, which: str) -> Path:
    cfg = result.config
    doc = {
        "package": "photocoherence",
        "version": __version__,
        "backend": _kernels.BACKEND,
        "stage": which,
        "config": cfg.values,
        "stream_seeds": [derive_stream_seed(SeedPolicy(cfg.master_seed, k)) for k in range(cfg.realizations)],
        "time_steps": cfg.time_grid.n_steps,
        "radial_points": cfg.grid.n_points,
    }
    if result.ground_state is not None:
        doc["ground_energy_hartree"] = result.ground_state.energy
    if result.incoherent_fields:
        doc["jump_counts"] = [int(f.jump_record.shape[0]) for f in result.incoherent_fields]
        doc["reference_flux_au"] = result.coherent_field.flux
    if result.coherent is not None:
        doc["final_populations"] = {
            "coherent": result.coherent.final_population,
            "incoherent": [p.final_population for p in result.incoherent],
        }
    root = path.parent
    doc["files"] = {str(p.relative_to(root)): _sha256(p) for p in sorted(result.files)}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
