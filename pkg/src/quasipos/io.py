"""CSV and JSON import/export with deterministic formatting."""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ConventionError
from .wavefunction import CONVENTIONS, REPRESENTATIONS, WaveFunction

_COORD = {"momentum": "p", "rho": "rho", "quasiposition": "xi"}


def fmt(value):
    """Shortest round-trip text for a float."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _writer(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = path.open("w", newline="")
    return handle, csv.writer(handle, lineterminator="\n")


def write_rows(path, header, rows):
    handle, w = _writer(path)
    with handle:
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return Path(path)


def write_grid_csv(grid, path):
    return write_rows(path, ["p", "weight"], zip(grid.nodes, grid.weights))


def write_wavefunction_csv(wf, path):
    """Columns (coordinate, re, im) after ``#`` header lines carrying the tags."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    coord = wf.grid.nodes if wf.representation != "rho" else wf.grid.rho
    with path.open("w", newline="") as handle:
        handle.write(f"# representation={wf.representation}\n")
        handle.write(f"# convention={wf.convention}\n")
        w = csv.writer(handle, lineterminator="\n")
        w.writerow([_COORD[wf.representation], "re", "im"])
        for x, v in zip(coord, wf.values):
            w.writerow([fmt(x), fmt(v.real), fmt(v.imag)])
    return path


def read_wavefunction_csv(path, grid):
    """Inverse of :func:`write_wavefunction_csv`; coordinates must match ``grid``."""
    tags = {}
    rows = []
    with Path(path).open() as handle:
        for line in handle:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                tags[key.strip()] = val.strip()
            else:
                rows.append(line)
    rep = tags.get("representation")
    conv = tags.get("convention")
    if rep not in REPRESENTATIONS or conv not in CONVENTIONS:
        raise ConventionError(f"missing or invalid tags in {path}: {tags}")
    reader = csv.reader(rows)
    header = next(reader)
    if header != [_COORD[rep], "re", "im"]:
        raise ConventionError(f"unexpected columns {header}")
    data = np.array([[float(v) for v in r] for r in reader if r])
    coord = grid.nodes if rep != "rho" else grid.rho
    if data.shape[0] != coord.size or not np.allclose(data[:, 0], coord, rtol=1e-12, atol=1e-12):
        raise ConventionError("sample coordinates do not match the grid")
    return WaveFunction(data[:, 1] + 1j * data[:, 2], grid, rep, conv)


def write_overlap_csv(xi_values, matrix, path):
    rows = ((a, b, matrix[i, j].real, matrix[i, j].imag)
            for i, a in enumerate(xi_values) for j, b in enumerate(xi_values))
    return write_rows(path, ["xi1", "xi2", "re", "im"], rows)


def write_spectra_csv(report, path):
    s = report.spectra
    rows = ((n, s["primed_correct"][n], s["derivative_corrected"][n], s["naive_literature"][n],
             s["naive_literature"][n] - s["derivative_corrected"][n])
            for n in range(report.levels))
    return write_rows(path, ["level", "E_primed", "E_derivative", "E_naive", "gap"], rows)


def write_spectrum_csv(spectrum, path):
    rows = ((n, e, d) for n, (e, d) in enumerate(zip(spectrum.eigenvalues, spectrum.convergence)))
    return write_rows(path, ["level", "E", "convergence"], rows)


def jsonable(obj):
    """Recursively convert to JSON types; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else fmt(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def write_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read JSON from {path}: {exc}") from None
