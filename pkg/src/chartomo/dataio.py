"""CSV and JSON emitters with a ``#`` provenance header.

Every file starts with ``# key: value`` lines (config hash, seed, RNG id,
bias flag, pad factor, grid) followed by a plain CSV table. Floats are
written with ``repr`` so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

from .dispfock import PopulationVector, RabiTrace
from .measurement import ReadoutRecord
from .recon import ChiGrid, Provenance, WignerGrid, _make_grid

FORMAT_VERSION = 1


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def header_lines(header: dict) -> list[str]:
    lines = [f"# format: chartomo/{FORMAT_VERSION}"]
    for key, value in header.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True, separators=(",", ":"))
        lines.append(f"# {key}: {_fmt(value)}")
    return lines


def write_table(path, header: dict, columns: tuple[str, ...], rows) -> Path:
    buf = _io.StringIO()
    for line in header_lines(header):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path = Path(path)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def read_table(path) -> tuple[dict, list[dict]]:
    """Header dict and rows (as string dicts) of a file written by :func:`write_table`."""
    header, body = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                header[key.strip()] = value.strip()
            else:
                body.append(line)
    if not body:
        raise ValueError(f"{path}: no table found")
    return header, list(csv.DictReader(body))


def write_json(path, header: dict, payload: dict) -> Path:
    path = Path(path)
    text = json.dumps({"header": header, **payload}, sort_keys=True, indent=1)
    path.write_text(text + "\n", encoding="utf-8")
    return path


# -- records -----------------------------------------------------------------


def write_records_csv(path, records: list[ReadoutRecord], header: dict) -> Path:
    return write_table(path, header, ReadoutRecord.CSV_COLUMNS, (r.row() for r in records))


def read_records_csv(path) -> tuple[dict, list[ReadoutRecord]]:
    header, rows = read_table(path)
    missing = set(ReadoutRecord.CSV_COLUMNS) - set(rows[0]) if rows else set()
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    return header, [ReadoutRecord.from_dict(r) for r in rows]


def write_records_json(path, records, header: dict) -> Path:
    return write_json(path, header, {"records": [r.to_dict() for r in records]})


# -- grids -------------------------------------------------------------------

CHI_COLUMNS = ("re_beta", "im_beta", "re_chi", "im_chi", "sem_re", "sem_im", "has_imag", "provenance")
WIGNER_COLUMNS = ("re_gamma", "im_gamma", "value", "imag_residual")


def _chi_rows(grid: ChiGrid):
    for b, v, s, h, p in zip(grid.beta, grid.value, grid.sem, grid.has_imag, grid.provenance):
        yield (b.real, b.imag, v.real, v.imag, s.real, s.imag, bool(h), p)


def write_chi_csv(path, grid: ChiGrid, header: dict) -> Path:
    return write_table(path, header, CHI_COLUMNS, _chi_rows(grid))


def write_chi_json(path, grid: ChiGrid, header: dict) -> Path:
    cols = dict(zip(CHI_COLUMNS, map(list, zip(*_chi_rows(grid)))))
    cols = {k: [(_fmt_json(x)) for x in v] for k, v in cols.items()}
    return write_json(path, header, {"spacing": grid.spacing, "bias_subtracted": grid.bias_subtracted,
                                     "subtracted_bias": grid.subtracted_bias, "points": cols})


def _fmt_json(x):
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


def read_chi_csv(path) -> tuple[dict, ChiGrid]:
    header, rows = read_table(path)
    spacing = json.loads(header["grid"])["spacing"] if "grid" in header else float(header["spacing"])
    beta = [complex(float(r["re_beta"]), float(r["im_beta"])) for r in rows]
    val = [complex(float(r["re_chi"]), float(r["im_chi"])) for r in rows]
    sem = [complex(float(r["sem_re"]), float(r["sem_im"])) for r in rows]
    has_im = [r["has_imag"] == "1" for r in rows]
    prov = [Provenance(r["provenance"]) for r in rows]
    subtracted = header.get("bias_subtracted") == "1"
    grid = _make_grid(beta, val, sem, prov, has_im, spacing, bias_subtracted=subtracted,
                      subtracted_bias=float(header.get("subtracted_bias", 0.0)))
    return header, grid


def _wigner_rows(wg: WignerGrid):
    for g, v, r in zip(wg.gamma, wg.value, wg.imag_residual):
        yield (g.real, g.imag, v, r)


def write_wigner_csv(path, wg: WignerGrid, header: dict) -> Path:
    return write_table(path, header, WIGNER_COLUMNS, _wigner_rows(wg))


def write_wigner_json(path, wg: WignerGrid, header: dict) -> Path:
    cols = dict(zip(WIGNER_COLUMNS, map(list, zip(*_wigner_rows(wg)))))
    cols = {k: [float(x) for x in v] for k, v in cols.items()}
    return write_json(path, header, {"kind": wg.kind.name.lower(), "points": cols})


# -- displaced-Fock data -------------------------------------------------------


def write_populations_csv(path, pops: PopulationVector, header: dict) -> Path:
    h = dict(header, re_gamma=pops.gamma.real, im_gamma=pops.gamma.imag)
    return write_table(path, h, ("n", "p"), enumerate(pops.probs))


def write_rabi_csv(path, trace: RabiTrace, header: dict) -> Path:
    h = dict(header, omega_rad_per_ms=trace.omega, re_gamma=trace.gamma.real, im_gamma=trace.gamma.imag)
    return write_table(path, h, ("time_ms", "value"), zip(trace.times, trace.values))


# -- gnuplot matrices ------------------------------------------------------------


def write_matrix(path, mat: np.ndarray, re_axis, im_axis, header: dict) -> Path:
    """Dense real matrix, rows along Im and columns along Re, with axis header lines."""
    mat = np.asarray(mat, dtype=float)
    if mat.shape != (len(im_axis), len(re_axis)):
        raise ValueError("matrix shape does not match its axes")
    lines = header_lines(header)
    lines.append("# re_axis: " + " ".join(repr(float(x)) for x in re_axis))
    lines.append("# im_axis: " + " ".join(repr(float(y)) for y in im_axis))
    for row in mat:
        lines.append(" ".join(repr(float(v)) for v in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_matrix(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    re_axis = im_axis = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# re_axis:"):
                re_axis = np.array(line.split(":", 1)[1].split(), dtype=float)
            elif line.startswith("# im_axis:"):
                im_axis = np.array(line.split(":", 1)[1].split(), dtype=float)
            elif not line.startswith("#") and line.strip():
                rows.append([float(x) for x in line.split()])
    return np.array(rows), re_axis, im_axis
