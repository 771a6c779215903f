"""CSV persistence for pixel datasets.

Schema (one header row, LF line endings, UTF-8):

    pixel_id,surface_pressure_mbar,water_vapor_mm,ozone_du,surface_type,
    view_zenith_deg,solar_zenith_deg,rel_azimuth_deg,refl_<center>...,
    label,cot_log10

``surface_type`` and ``label`` are symbolic (land/snow/desert/ocean and
clear/liquid/ice). ``cot_log10`` is empty exactly when the label is clear.
Floats are written with ``repr`` (shortest round-trip form), so a save/load
cycle reproduces every value bit for bit. Malformed files raise
:class:`~cloudmtl.errors.DataError` naming the offending line (1-based,
header = line 1).
"""

from __future__ import annotations

import csv
import math

import numpy as np

from ..errors import DataError
from .dataset import PixelDataset, LABEL_NAMES
from .sensors import SensorConfig, SURFACE_TYPES, sensor_names, get_sensor

_FIXED_LEAD = ["pixel_id", "surface_pressure_mbar", "water_vapor_mm", "ozone_du",
               "surface_type", "view_zenith_deg", "solar_zenith_deg",
               "rel_azimuth_deg"]
_FIXED_TAIL = ["label", "cot_log10"]

_NAME_TO_LABEL = {v: k for k, v in LABEL_NAMES.items()}
_SURFACE_TO_CODE = {name: i for i, name in enumerate(SURFACE_TYPES)}


def _fmt(x: float) -> str:
    return repr(float(x))


def save_csv(dataset: PixelDataset, path: str) -> None:
    dataset.validate()
    header = _FIXED_LEAD + dataset.sensor.band_columns() + _FIXED_TAIL
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for i in range(len(dataset)):
            row = [
                str(int(dataset.pixel_id[i])),
                _fmt(dataset.pressure[i]),
                _fmt(dataset.water_vapor[i]),
                _fmt(dataset.ozone[i]),
                SURFACE_TYPES[dataset.surface[i]],
                _fmt(dataset.view_zenith[i]),
                _fmt(dataset.solar_zenith[i]),
                _fmt(dataset.rel_azimuth[i]),
            ]
            row.extend(_fmt(v) for v in dataset.reflectance[i])
            row.append(LABEL_NAMES[int(dataset.label[i])])
            c = dataset.cot_log10[i]
            row.append("" if math.isnan(c) else _fmt(c))
            f.write(",".join(row) + "\n")


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"line {line}: column {column!r} is not numeric: {text!r}") from None
    if not math.isfinite(v):
        raise DataError(f"line {line}: column {column!r} is not finite: {text!r}")
    return v


def _sensor_from_header(band_cols: list[str], path: str) -> SensorConfig:
    centers = []
    for c in band_cols:
        try:
            centers.append(float(c[len("refl_"):]))
        except ValueError:
            raise DataError(f"{path}: malformed band column {c!r}") from None
    centers_t = tuple(centers)
    for name in sensor_names():
        if get_sensor(name).band_centers_nm == centers_t:
            return get_sensor(name)
    return SensorConfig("FILE", centers_t)


def load_csv(path: str, sensor: SensorConfig | None = None) -> PixelDataset:
    """Read a pixel CSV; if ``sensor`` is given the band columns must match it."""
    try:
        f = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    with f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if header[:len(_FIXED_LEAD)] != _FIXED_LEAD or header[-2:] != _FIXED_TAIL:
            raise DataError(
                f"{path}: header does not match the pixel CSV schema "
                f"(got {header[:3]}...{header[-2:]})")
        band_cols = header[len(_FIXED_LEAD):-2]
        if not band_cols or not all(c.startswith("refl_") for c in band_cols):
            raise DataError(f"{path}: reflectance columns missing or misnamed")
        file_sensor = _sensor_from_header(band_cols, path)
        if sensor is not None:
            if file_sensor.band_centers_nm != sensor.band_centers_nm:
                raise DataError(
                    f"{path}: band columns ({len(band_cols)} bands) do not match "
                    f"sensor {sensor.name} ({sensor.band_count} bands)")
            file_sensor = sensor

        ncols = len(header)
        rows = {name: [] for name in ("pixel_id", "pressure", "water_vapor",
                                      "ozone", "surface", "view_zenith",
                                      "solar_zenith", "rel_azimuth", "label",
                                      "cot_log10")}
        refl_rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != ncols:
                raise DataError(
                    f"line {line_no}: expected {ncols} fields, got {len(row)}")
            try:
                rows["pixel_id"].append(int(row[0]))
            except ValueError:
                raise DataError(
                    f"line {line_no}: pixel_id is not an integer: {row[0]!r}") from None
            rows["pressure"].append(_parse_float(row[1], line_no, header[1]))
            rows["water_vapor"].append(_parse_float(row[2], line_no, header[2]))
            rows["ozone"].append(_parse_float(row[3], line_no, header[3]))
            if row[4] not in _SURFACE_TO_CODE:
                raise DataError(
                    f"line {line_no}: surface_type {row[4]!r} not one of "
                    f"{list(SURFACE_TYPES)}")
            rows["surface"].append(_SURFACE_TO_CODE[row[4]])
            rows["view_zenith"].append(_parse_float(row[5], line_no, header[5]))
            rows["solar_zenith"].append(_parse_float(row[6], line_no, header[6]))
            rows["rel_azimuth"].append(_parse_float(row[7], line_no, header[7]))
            refl_rows.append([_parse_float(row[8 + j], line_no, band_cols[j])
                              for j in range(len(band_cols))])
            label_text = row[-2]
            if label_text not in _NAME_TO_LABEL:
                raise DataError(
                    f"line {line_no}: label {label_text!r} not one of "
                    f"{sorted(_NAME_TO_LABEL)}")
            label = _NAME_TO_LABEL[label_text]
            rows["label"].append(label)
            cot_text = row[-1]
            if label_text == "clear":
                if cot_text != "":
                    raise DataError(
                        f"line {line_no}: clear pixel must have empty cot_log10, "
                        f"got {cot_text!r}")
                rows["cot_log10"].append(math.nan)
            else:
                if cot_text == "":
                    raise DataError(
                        f"line {line_no}: cloudy pixel is missing cot_log10")
                rows["cot_log10"].append(_parse_float(cot_text, line_no, "cot_log10"))

    if not refl_rows:
        raise DataError(f"{path}: no data rows")
    ds = PixelDataset(
        sensor=file_sensor,
        pressure=np.asarray(rows["pressure"]),
        water_vapor=np.asarray(rows["water_vapor"]),
        ozone=np.asarray(rows["ozone"]),
        surface=np.asarray(rows["surface"], dtype=np.int64),
        view_zenith=np.asarray(rows["view_zenith"]),
        solar_zenith=np.asarray(rows["solar_zenith"]),
        rel_azimuth=np.asarray(rows["rel_azimuth"]),
        reflectance=np.asarray(refl_rows, dtype=np.float64),
        label=np.asarray(rows["label"], dtype=np.int64),
        cot_log10=np.asarray(rows["cot_log10"], dtype=np.float64),
        pixel_id=np.asarray(rows["pixel_id"], dtype=np.int64),
    )
    ds.validate()
    return ds
