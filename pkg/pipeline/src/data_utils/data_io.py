"""
data_io.py

Handles all input/output operations of the verification harness.

This module centralizes the loading and saving of every artifact a run reads
or writes, including:

- Test-matrix configuration text
- Kernel matrices loaded from raw float64 files
- Per-command rows.csv tables and report.json summaries
- Plot-ready CSV series under plotdata/
- Golden ratio caps keyed by config hash
- Sparse families with their certificates (JSON)

Output folders follow one layout: <out>/<command>/rows.csv, report.json and
plotdata/<inequality_id>.csv. Keeping the I/O here lets the verifiers stay pure.

Created: July 15, 2025
"""

import json
import logging
import os

import numpy as np
import pandas as pd

from grid.cubes import Cube
from grid.errors import InvalidParameterError
from processing.report_rows import CSV_COLUMNS, rows_frame
from sparse.families import SparseFamily

logger = logging.getLogger(__name__)

ROWS_FILE = "rows.csv"
REPORT_FILE = "report.json"
PLOT_FOLDER = "plotdata"
PLOT_COLUMNS = ["lambda", "eps", "p", "lhs", "rhs_core", "ratio"]


def load_config_text(path):
    """
    Reads a test-matrix configuration file.

    Parameters:
        path (str): Path to the configuration file

    Returns:
        str: File contents

    Raises:
        FileNotFoundError: If the file is missing
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"config {path} not found!")
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    logger.info("config %s loaded", path)
    return text


def load_matrix_file(path, size):
    """
    Loads a kernel matrix stored as raw little-endian float64, row-major.

    Parameters:
        path (str): Matrix file
        size (int): Number of grid cells N; the file must hold N·N values

    Returns:
        np.ndarray: (N, N) matrix

    Raises:
        FileNotFoundError: If the file is missing
        InvalidParameterError: If the file does not hold exactly N·N values
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"matrix {path} not found!")
    values = np.fromfile(path, dtype="<f8")
    if values.size != size * size:
        raise InvalidParameterError(f"matrix {path} holds {values.size} values, expected {size}x{size}")
    logger.info("matrix %s loaded (%d x %d)", path, size, size)
    return values.reshape(size, size)


def save_rows(rows, folder):
    """
    Saves report rows to <folder>/rows.csv with the fixed column order.

    Parameters:
        rows (list[ReportRow]): Rows in report order
        folder (str): Command output folder

    Returns:
        str: Path of the written file
    """
    os.makedirs(folder, exist_ok=True)
    filepath = os.path.join(folder, ROWS_FILE)
    rows_frame(rows).to_csv(filepath, index=False, float_format="%.12g")
    logger.info("%d row(s) saved to %s", len(rows), filepath)
    return filepath


def load_rows(filepath):
    """
    Loads a rows.csv table.

    Returns:
        pd.DataFrame: Table with exactly CSV_COLUMNS (empty tables keep the header)
    """
    if not os.path.isfile(filepath):
        raise FileNotFoundError(f"{filepath} not found!")
    df = pd.read_csv(filepath)
    missing = [c for c in CSV_COLUMNS if c not in df.columns]
    if missing:
        raise InvalidParameterError(f"{filepath} lacks columns {missing}")
    return df[CSV_COLUMNS]


def save_frame(df, folder):
    """Saves an already compiled rows table to <folder>/rows.csv."""
    os.makedirs(folder, exist_ok=True)
    filepath = os.path.join(folder, ROWS_FILE)
    df.to_csv(filepath, index=False, float_format="%.12g")
    logger.info("%d row(s) saved to %s", len(df), filepath)
    return filepath


def save_report_json(report, folder):
    """Saves a report summary dictionary as <folder>/report.json."""
    os.makedirs(folder, exist_ok=True)
    filepath = os.path.join(folder, REPORT_FILE)
    with open(filepath, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2, sort_keys=True, allow_nan=False)
    logger.info("report saved to %s", filepath)
    return filepath


def save_plotdata(rows, folder):
    """
    Writes one plot-ready CSV per inequality id under <folder>/plotdata/.

    Parameters:
        rows (list[ReportRow]): Rows of one command
        folder (str): Command output folder

    Returns:
        list[str]: Written paths
    """
    if not rows:
        return []
    basepath = os.path.join(folder, PLOT_FOLDER)
    os.makedirs(basepath, exist_ok=True)
    df = rows_frame(rows)
    written = []
    for inequality_id, group in df.groupby("inequality_id", sort=True):
        filepath = os.path.join(basepath, f"{inequality_id}.csv")
        group[PLOT_COLUMNS].to_csv(filepath, index=False, float_format="%.12g")
        written.append(filepath)
    logger.debug("%d plotdata file(s) saved to %s", len(written), basepath)
    return written


def golden_path(golden_dir, config_hash):
    return os.path.join(golden_dir, f"{config_hash}.json")


def load_golden_caps(golden_dir, config_hash):
    """
    Loads golden ratio caps for a config hash.

    Returns:
        dict[str, float] | None: Caps per inequality id, or None when nothing
        has been frozen for this configuration
    """
    filepath = golden_path(golden_dir, config_hash)
    if not os.path.isfile(filepath):
        logger.info("no golden caps at %s", filepath)
        return None
    with open(filepath, encoding="utf-8") as handle:
        payload = json.load(handle)
    return {k: float(v) for k, v in payload["caps"].items()}


def save_golden_caps(caps, golden_dir, config_hash, headroom):
    """Writes {"config_hash", "headroom", "caps"} to <golden_dir>/<config_hash>.json."""
    os.makedirs(golden_dir, exist_ok=True)
    filepath = golden_path(golden_dir, config_hash)
    payload = {"config_hash": config_hash, "headroom": headroom, "caps": dict(sorted(caps.items()))}
    with open(filepath, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
    logger.info("golden caps frozen to %s", filepath)
    return filepath


def _cube_record(cube, certificate):
    return {
        "offsets": list(cube.offsets),
        "side": cube.side,
        "level": cube.level,
        "dyadic": cube.dyadic,
        "mode": cube.mode,
        "E_Q": [int(i) for i in certificate],
    }


def save_sparse_family(family, filepath):
    """
    Saves a sparse family and its certificates as JSON.

    Parameters:
        family (SparseFamily): Family to save
        filepath (str): Target .json file
    """
    os.makedirs(os.path.dirname(filepath) or ".", exist_ok=True)
    payload = {
        "eta": family.eta,
        "cubes": [_cube_record(q, c) for q, c in zip(family.cubes, family.certificates)],
    }
    with open(filepath, "w", encoding="utf-8") as handle:
        json.dump(payload, handle)
    logger.debug("sparse family of %d cube(s) saved to %s", len(family), filepath)


def load_sparse_family(filepath):
    """Loads a family written by save_sparse_family."""
    if not os.path.isfile(filepath):
        raise FileNotFoundError(f"{filepath} not found!")
    with open(filepath, encoding="utf-8") as handle:
        payload = json.load(handle)
    cubes, certificates = [], []
    for record in payload["cubes"]:
        cubes.append(
            Cube(tuple(record["offsets"]), record["side"], record["level"], record["dyadic"], record["mode"])
        )
        certificates.append(np.asarray(record["E_Q"], dtype=np.int64))
    return SparseFamily(tuple(cubes), tuple(certificates), float(payload["eta"]))
