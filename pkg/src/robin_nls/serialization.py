"""Profile ingestion and artifact writers (JSON for documents, CSV for samples)."""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ProfileFormatError
from .models import ProfileDocument, SpectrumDocument, ZeroRecord
from .profiles import from_generator
from .scattering import InitialProfile, SpectralTable
from .zeros import DiscreteSpectrum

logger = logging.getLogger("robin_io")

PathLike = Union[str, Path]

TABLE_HEADER = ["k", "Re a", "Im a", "Re b", "Im b", "Re Δ", "Im Δ", "Re r", "Im r"]
SNAPSHOT_HEADER = ["x", "Re u", "Im u", "|u|"]
CONSERVED_HEADER = ["t", "mass", "energy", "mass_drift", "energy_drift", "Re u(0)", "Im u(0)"]
PREDICTION_HEADER = [
    "x", "t", "Re u_pred", "Im u_pred", "|u_pred|",
    "Re u_sol", "Im u_sol", "Re u_rad1", "Im u_rad1", "Re u_rad2", "Im u_rad2",
]


def _pair(z: complex) -> Tuple[float, float]:
    return (float(np.real(z)), float(np.imag(z)))


# ============================================================================
# PROFILES
# ============================================================================

def _loc(error: ValidationError) -> str:
    return ".".join(str(part) for part in error.errors()[0]["loc"]) or "<root>"


def parse_profile(text: str, source: str = "<string>") -> ProfileDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProfileFormatError(e.msg, f"{source}:{e.lineno}:{e.colno}") from e
    if not isinstance(raw, dict):
        raise ProfileFormatError("profile must be a JSON object", source)
    try:
        return ProfileDocument.model_validate(raw)
    except ValidationError as e:
        raise ProfileFormatError(e.errors()[0]["msg"], f"{source}:{_loc(e)}") from e


def profile_from_document(document: ProfileDocument, tol: Tolerances = DEFAULT_TOLERANCES) -> InitialProfile:
    if document.generator is not None:
        return from_generator(document.generator, document.generator_params, tol)
    samples = np.array([complex(re, im) for re, im in document.data])
    return InitialProfile(samples=samples, h=document.grid.h, lam=document.lam, q=document.q)


def read_profile(path: PathLike, tol: Tolerances = DEFAULT_TOLERANCES) -> InitialProfile:
    """
    Read an initial profile from JSON.

    Raises:
        ProfileFormatError: with file:line:col for JSON syntax errors and
            file:field for schema errors.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ProfileFormatError(str(e), str(path)) from e
    profile = profile_from_document(parse_profile(text, str(path)), tol)
    logger.info(f"Read profile from {path}: N = {profile.N}, lambda = {profile.lam}, q = {profile.q:g}")
    return profile


def profile_document(profile: InitialProfile) -> ProfileDocument:
    return ProfileDocument(
        lam=profile.lam,
        q=profile.q,
        grid={"h": profile.h, "N": profile.N},
        data=[_pair(z) for z in profile.samples],
    )


# ============================================================================
# JSON / CSV
# ============================================================================

def dumps_json(payload: Union[BaseModel, dict]) -> str:
    """Floats go out in shortest round-trip form (json uses repr)."""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(by_alias=True, exclude_none=True)
    return json.dumps(payload, indent=2, allow_nan=True) + "\n"


def write_json(path: PathLike, payload: Union[BaseModel, dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(payload))
    logger.debug(f"Wrote {path}")
    return path


def read_json(path: PathLike) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ProfileFormatError(e.msg, f"{path}:{e.lineno}:{e.colno}") from e


def format_csv(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(value)) for value in row])
    return buffer.getvalue()


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(header, rows), encoding="utf-8")
    logger.debug(f"Wrote {path}")
    return path


def read_csv(path: PathLike) -> Tuple[List[str], np.ndarray]:
    """Header and a float array of rows; malformed cells report line and column name."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ProfileFormatError("empty CSV file", str(path))
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ProfileFormatError(f"expected {len(header)} fields, got {len(row)}", f"{path}:{line_no}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                bad = next(i for i, cell in enumerate(row) if not _is_float(cell))
                raise ProfileFormatError(f"'{row[bad]}' is not a number", f"{path}:{line_no}:{header[bad]}")
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


# ============================================================================
# ARTIFACTS
# ============================================================================

def table_rows(table: SpectralTable) -> List[List[float]]:
    columns = [table.k_grid, table.a.real, table.a.imag, table.b.real, table.b.imag,
               table.delta.real, table.delta.imag, table.r.real, table.r.imag]
    return [list(row) for row in np.column_stack(columns)]


def table_csv(table: SpectralTable) -> str:
    return format_csv(TABLE_HEADER, table_rows(table))


def write_table(path: PathLike, table: SpectralTable) -> Path:
    return write_csv(path, TABLE_HEADER, table_rows(table))


def read_table(path: PathLike) -> dict:
    """Columns of a spectral table CSV as complex arrays keyed k, a, b, delta, r."""
    header, values = read_csv(path)
    if header != TABLE_HEADER:
        raise ProfileFormatError(f"unexpected header {header}", str(path))
    return {
        "k": values[:, 0],
        "a": values[:, 1] + 1j * values[:, 2],
        "b": values[:, 3] + 1j * values[:, 4],
        "delta": values[:, 5] + 1j * values[:, 6],
        "r": values[:, 7] + 1j * values[:, 8],
    }


def spectrum_document(spectrum: DiscreteSpectrum) -> SpectrumDocument:
    zeros = []
    for j, xi in enumerate(spectrum.xi):
        c = spectrum.c[j] if spectrum.c is not None else None
        simple = spectrum.simple_flags[j] if j < len(spectrum.simple_flags) else True
        zeros.append(ZeroRecord(xi=_pair(xi), c=_pair(c) if c is not None else None, simple=simple))
    return SpectrumDocument(
        M=spectrum.M,
        zeros=zeros,
        lam=spectrum.lam,
        q=spectrum.q,
        dropped=[_pair(z) for z in spectrum.dropped],
    )


def write_spectrum(path: PathLike, spectrum: DiscreteSpectrum) -> Path:
    return write_json(path, spectrum_document(spectrum))


def read_spectrum(path: PathLike) -> DiscreteSpectrum:
    raw = read_json(path)
    try:
        document = SpectrumDocument.model_validate(raw)
    except ValidationError as e:
        raise ProfileFormatError(e.errors()[0]["msg"], f"{path}:{_loc(e)}") from e
    if document.lam is None or document.q is None:
        raise ProfileFormatError("spectrum file needs lambda and q to be read back", str(path))
    has_c = all(z.c is not None for z in document.zeros)
    try:
        return DiscreteSpectrum(
            lam=document.lam,
            q=document.q,
            xi=tuple(complex(*z.xi) for z in document.zeros),
            c=tuple(complex(*z.c) for z in document.zeros) if has_c else None,
            simple_flags=tuple(z.simple for z in document.zeros),
            a_nonzero_flags=tuple(True for _ in document.zeros),
            dropped=tuple(complex(*z) for z in document.dropped),
        )
    except ValueError as e:
        raise ProfileFormatError(str(e), str(path)) from e


def snapshot_rows(state) -> List[List[float]]:
    return [[x, u.real, u.imag, abs(u)] for x, u in zip(state.x, state.u)]


def write_snapshot(path: PathLike, state) -> Path:
    return write_csv(path, SNAPSHOT_HEADER, snapshot_rows(state))


def write_conserved_log(path: PathLike, log) -> Path:
    rows = [[r.t, r.mass, r.energy, r.mass_drift, r.energy_drift, r.boundary.real, r.boundary.imag] for r in log]
    return write_csv(path, CONSERVED_HEADER, rows)


def prediction_rows(profiles) -> List[List[float]]:
    return [
        [p.x, p.t, p.total.real, p.total.imag, abs(p.total),
         p.u_sol.real, p.u_sol.imag, p.u_rad1.real, p.u_rad1.imag, p.u_rad2.real, p.u_rad2.imag]
        for p in profiles
    ]


def write_predictions(path: PathLike, profiles) -> Path:
    return write_csv(path, PREDICTION_HEADER, prediction_rows(profiles))


def load_config_profile(config) -> InitialProfile:
    """Profile named by a RunConfig: a JSON file or a generator with parameters."""
    if config.profile_path is not None:
        return read_profile(config.profile_path, config.tolerances)
    return from_generator(config.generator, config.generator_params, config.tolerances)
