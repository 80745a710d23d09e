"""
Reading and writing samples, bands and derived curves.

Paths may carry an fsspec prefix (`abfs://`, `memory://`, `file://`); bare paths
are local. Floats are written with 17 significant digits so that every file
re-loads to identical values, and infinite knots appear as `inf`/`-inf`.
"""

import io

import numpy as np

from bandtest.band.builder import BandWidthProfile
from bandtest.core.arrays import FloatArray
from bandtest.core.band import CdfBand
from bandtest.core.errors import INFEASIBLE_BAND_ERROR, InfeasibleBandError, InputFileError, InvalidBandError
from bandtest.core.step_cdf import StepCdf
from bandtest.utils.fs_utils import read_text, write_text
from bandtest.utils.logger import logger

BAND_HEADER = "knot,lower,upper"
FIT_HEADER = "knot,level"
WIDTH_HEADER = "knot,width"
FLOAT_FORMAT = "%.17g"

FILE_NOT_FOUND_ERROR = "Input file not found: {}"
MALFORMED_FILE_ERROR = "Malformed {} file {}: {}"


def _read(path: str) -> str:
    try:
        return read_text(path)
    except FileNotFoundError:
        logger.error(f"Missing input file {path}")
        raise InputFileError(FILE_NOT_FOUND_ERROR.format(path)) from None


def load_sample(path: str) -> FloatArray:
    """
    Read a sample file: one float per line, `#` comments and blank lines ignored.

    Returns:
        The raw observations in file order

    Raises:
        InputFileError: If the file is missing or a line is not a number
    """
    text = _read(path)
    try:
        values = np.loadtxt(io.StringIO(text), comments="#", ndmin=1, dtype=np.float64)
    except ValueError as e:
        raise InputFileError(MALFORMED_FILE_ERROR.format("sample", path, e)) from e
    if values.ndim != 1:
        raise InputFileError(MALFORMED_FILE_ERROR.format("sample", path, "expected one value per line"))
    return values


def save_sample(path: str, values: FloatArray) -> None:
    buffer = io.StringIO()
    np.savetxt(buffer, np.asarray(values, dtype=np.float64), fmt=FLOAT_FORMAT)
    write_text(path, buffer.getvalue())


def load_band(path: str) -> CdfBand:
    """
    Read a `knot,lower,upper` CSV into a CdfBand.

    Raises:
        InputFileError: If the file is missing, lacks the header or has bad rows
        InfeasibleBandError: If the lower edge exceeds the upper edge somewhere
    """
    text = _read(path)
    lines = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not lines or lines[0].replace(" ", "") != BAND_HEADER:
        raise InputFileError(MALFORMED_FILE_ERROR.format("band", path, f"expected header '{BAND_HEADER}'"))
    try:
        table = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as e:
        raise InputFileError(MALFORMED_FILE_ERROR.format("band", path, e)) from e
    if table.size == 0:
        raise InputFileError(MALFORMED_FILE_ERROR.format("band", path, "no rows"))
    if table.shape[1] != 3:
        raise InputFileError(MALFORMED_FILE_ERROR.format("band", path, "expected three columns"))
    knots = table[:, 0]
    lower = StepCdf(knots, table[:, 1])
    upper = StepCdf(knots.copy(), table[:, 2])
    try:
        return CdfBand(lower, upper)
    except InvalidBandError as e:
        # Crossed edges admit no CDF at all.
        raise InfeasibleBandError(INFEASIBLE_BAND_ERROR.format(e)) from e


def save_band(path: str, band: CdfBand) -> None:
    knots = band.knots()
    table = np.column_stack((knots, band.lower.eval_right(knots), band.upper.eval_right(knots)))
    _write_table(path, BAND_HEADER, table)
    logger.info(f"Band with {knots.size} knots written to {path}")


def save_width_profile(path: str, profile: BandWidthProfile) -> None:
    _write_table(path, WIDTH_HEADER, np.column_stack((profile.knots, profile.widths)))


def save_fit(path: str, knots: FloatArray, levels: FloatArray) -> None:
    """Write a fitted CDF evaluated at the sample points as `knot,level` CSV."""
    _write_table(path, FIT_HEADER, np.column_stack((knots, levels)))


def format_table(header: str, table: FloatArray) -> str:
    buffer = io.StringIO()
    np.savetxt(buffer, table.reshape(-1, len(header.split(","))), fmt=FLOAT_FORMAT, delimiter=",")
    return f"{header}\n{buffer.getvalue()}"


def _write_table(path: str, header: str, table: FloatArray) -> None:
    write_text(path, format_table(header, table))
