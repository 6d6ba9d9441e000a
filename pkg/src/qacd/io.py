"""File formats: experiment configs, calibration files and report writers."""
import csv
import io as _io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .exceptions import ParseError, ValidationError
from .noise import DENSE_QUBIT_CAP, ReadoutSpec, product_povm, readout_spec_from_effects
from .qobjects import check_effects

SCENARIOS = ("states-ideal", "states-uniform", "povms-ideal", "channels-ideal")
SCENARIO_CAPS = {"states-ideal": 8, "states-uniform": 8, "povms-ideal": 6, "channels-ideal": 5}
ENSEMBLE_NAMES = ("haar", "brickwork", "qaoa", "vqe", "vqe-y")
CSV_COLUMNS = ("N", "d", "kind", "acd", "wc", "wc_is_lb", "mc_mean", "mc_se", "samples")


# ---------------------------------------------------------------------------
# experiment config
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseConfig:
    seed: int = 0
    error_range: tuple = (0.001, 0.01)
    angle_range: tuple = (0.025, 0.0313)   # in units of pi
    calibration: Optional[str] = None
    enabled: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    n_min: int = 2
    n_max: int = 5
    ensembles: tuple = ("qaoa", "vqe")
    layers: Optional[int] = None
    seed: int = 0
    sat_seed: int = 0
    samples: int = 1000
    n_jobs: int = 1
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValidationError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        cap = SCENARIO_CAPS[self.scenario]
        if not 1 <= self.n_min <= self.n_max:
            raise ValidationError(f"need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")
        if self.n_max > cap:
            raise ValidationError(f"{self.scenario}: n_max={self.n_max} exceeds the dense cap {cap}")
        for e in self.ensembles:
            if e not in ENSEMBLE_NAMES:
                raise ValidationError(f"unknown ensemble {e!r}; choose from {ENSEMBLE_NAMES}")
        if not self.ensembles:
            raise ValidationError("at least one ensemble is required")
        if self.samples < 2:
            raise ValidationError("samples must be at least 2")
        lo, hi = self.noise.error_range
        if not 0 <= lo <= hi or 3 * hi > 1:
            raise ValidationError(f"error_range {self.noise.error_range} is not a valid probability range")

    @property
    def n_values(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ensembles"] = list(self.ensembles)
        d["noise"]["error_range"] = list(self.noise.error_range)
        d["noise"]["angle_range"] = list(self.noise.angle_range)
        return d


def config_from_dict(raw: dict, base_dir: Optional[Path] = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    raw = dict(raw)
    known = {"scenario", "n_min", "n_max", "ensembles", "layers", "seed", "sat_seed",
             "samples", "n_jobs", "noise"}
    extra = set(raw) - known
    if extra:
        raise ParseError(f"unknown config keys: {sorted(extra)}")
    if "scenario" not in raw:
        raise ParseError("config is missing 'scenario'")
    noise_raw = raw.pop("noise", {})
    if noise_raw is None or noise_raw == "none":
        noise = NoiseConfig(enabled=False)
    else:
        noise_raw = dict(noise_raw)
        cal = noise_raw.get("calibration")
        if cal is not None and base_dir is not None and not Path(cal).is_absolute():
            noise_raw["calibration"] = str(base_dir / cal)
        for key in ("error_range", "angle_range"):
            if key in noise_raw:
                noise_raw[key] = tuple(float(x) for x in noise_raw[key])
        try:
            noise = NoiseConfig(**noise_raw)
        except TypeError as exc:
            raise ParseError(f"bad noise section: {exc}") from None
    if "ensembles" in raw:
        ens = raw["ensembles"]
        raw["ensembles"] = (ens,) if isinstance(ens, str) else tuple(ens)
    return ExperimentConfig(noise=noise, **raw)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(raw, base_dir=path.parent)


# ---------------------------------------------------------------------------
# calibration files
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Calibration:
    """Per-qubit two-outcome effects ``(E0, E1)``."""

    effects: tuple

    @property
    def n_qubits(self) -> int:
        return len(self.effects)

    @property
    def readout_spec(self) -> ReadoutSpec:
        return readout_spec_from_effects(self.effects)

    @property
    def is_classical(self) -> bool:
        return all(np.allclose(E, np.diag(np.diag(E)), atol=1e-12) for pair in self.effects for E in pair)

    def povm(self, n_qubits: Optional[int] = None, max_qubits: int = DENSE_QUBIT_CAP):
        n = self.n_qubits if n_qubits is None else n_qubits
        if n > self.n_qubits:
            raise ValidationError(f"calibration covers {self.n_qubits} qubits, {n} requested")
        return product_povm(self.effects[:n], max_qubits)


def _complex_matrix(obj, where):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: effect entries must be [real, imag] pairs") from None
    if arr.shape != (2, 2, 2):
        raise ParseError(f"{where}: effect must be a 2x2 matrix of [real, imag] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _qubit_effects(entry, k):
    where = f"qubit {k}"
    if not isinstance(entry, dict):
        raise ParseError(f"{where}: expected an object with 'effects' or 'confusion'")
    if "effects" in entry:
        eff = entry["effects"]
        if not isinstance(eff, list) or len(eff) != 2:
            raise ParseError(f"{where}: 'effects' must list two 2x2 effects")
        pair = np.stack([_complex_matrix(e, f"{where} effect {i}") for i, e in enumerate(eff)])
    elif "confusion" in entry:
        try:
            C = np.asarray(entry["confusion"], dtype=float)
        except (TypeError, ValueError):
            raise ParseError(f"{where}: 'confusion' must be a 2x2 numeric matrix") from None
        if C.shape != (2, 2):
            raise ParseError(f"{where}: 'confusion' must be 2x2, got shape {C.shape}")
        # rows are outcomes, columns are prepared bits: C[k, l] = p(k | l)
        pair = np.stack([np.diag(C[0]), np.diag(C[1])]).astype(complex)
    else:
        raise ParseError(f"{where}: needs 'effects' or 'confusion'")
    try:
        check_effects(pair)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    return pair[0], pair[1]


def calibration_from_dict(raw) -> Calibration:
    if not isinstance(raw, dict) or "qubits" not in raw:
        raise ParseError("calibration must be an object with a 'qubits' list")
    qubits = raw["qubits"]
    if not isinstance(qubits, list) or not qubits:
        raise ParseError("'qubits' must be a non-empty list")
    n = raw.get("n_qubits", len(qubits))
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"'n_qubits' must be a positive integer, got {n!r}")
    if len(qubits) < n:
        raise ParseError(f"calibration declares {n} qubits but qubit {len(qubits)} is missing")
    if len(qubits) > n:
        raise ParseError(f"calibration declares {n} qubits but lists {len(qubits)}")
    return Calibration(tuple(_qubit_effects(q, k) for k, q in enumerate(qubits)))


def load_calibration(path) -> Calibration:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return calibration_from_dict(raw)


def calibration_to_dict(effects) -> dict:
    def enc(E):
        E = np.asarray(E, dtype=complex)
        return [[[float(z.real), float(z.imag)] for z in row] for row in E]
    return {"n_qubits": len(effects),
            "qubits": [{"effects": [enc(E0), enc(E1)]} for E0, E1 in effects]}


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def records_to_csv(records, header_lines=()) -> str:
    buf = _io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def csv_body(text: str) -> str:
    """CSV text without its ``#`` comment lines."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def read_records_csv(text: str) -> list:
    rows = list(csv.DictReader(_io.StringIO(csv_body(text))))
    out = []
    for r in rows:
        out.append({"N": int(r["N"]), "d": int(r["d"]), "kind": r["kind"],
                    "acd": float(r["acd"]), "wc": float(r["wc"]), "wc_is_lb": r["wc_is_lb"] == "1",
                    "mc_mean": float(r["mc_mean"]), "mc_se": float(r["mc_se"]),
                    "samples": int(r["samples"])})
    return out
