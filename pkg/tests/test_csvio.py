"""Dataset CSV round trips and malformed-file diagnostics."""

import numpy as np
import pytest

from cloudmtl.data import generate_dataset, get_sensor, load_csv, save_csv
from cloudmtl.errors import DataError


@pytest.fixture()
def toy(tmp_path):
    ds = generate_dataset(get_sensor("ABI"), 120, seed=4)
    path = str(tmp_path / "toy.csv")
    save_csv(ds, path)
    return ds, path


def test_round_trip_bitwise(toy):
    ds, path = toy
    back = load_csv(path)
    assert np.array_equal(back.reflectance, ds.reflectance)
    assert np.array_equal(back.cot_log10, ds.cot_log10, equal_nan=True)
    assert np.array_equal(back.label, ds.label)
    assert np.array_equal(back.surface, ds.surface)
    assert np.array_equal(back.pixel_id, ds.pixel_id)


def test_save_is_deterministic(toy, tmp_path):
    ds, path = toy
    second = str(tmp_path / "again.csv")
    save_csv(ds, second)
    assert open(path, "rb").read() == open(second, "rb").read()


def test_sensor_cross_check(toy):
    ds, path = toy
    load_csv(path, sensor=get_sensor("ABI"))  # matches: fine
    with pytest.raises(DataError):
        load_csv(path, sensor=get_sensor("VIIRS"))


def test_header_schema(toy):
    _, path = toy
    header = open(path).readline().strip().split(",")
    assert header[0] == "pixel_id"
    assert header[-2] == "label"
    assert header[-1] == "cot_log10"
    assert sum(c.startswith("refl_") for c in header) == 6


def test_clear_pixel_with_cot_rejected(toy, tmp_path):
    _, path = toy
    lines = open(path).read().splitlines()
    header = lines[0].split(",")
    li, ci = header.index("label"), header.index("cot_log10")
    # find a clear row and force a thickness value onto it
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if cells[li] == "clear":
            cells[ci] = "1.0"
            lines[i - 1] = ",".join(cells)
            break
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(DataError, match=str(i)):
        load_csv(str(bad))


def test_cloudy_pixel_missing_cot_rejected(toy, tmp_path):
    _, path = toy
    lines = open(path).read().splitlines()
    header = lines[0].split(",")
    li, ci = header.index("label"), header.index("cot_log10")
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if cells[li] in ("liquid", "ice"):
            cells[ci] = ""
            lines[i - 1] = ",".join(cells)
            break
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(DataError, match=str(i)):
        load_csv(str(bad))


def test_non_numeric_cell_names_line(toy, tmp_path):
    _, path = toy
    lines = open(path).read().splitlines()
    cells = lines[1].split(",")
    cells[1] = "not-a-number"
    lines[1] = ",".join(cells)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(DataError, match="2"):
        load_csv(str(bad))


def test_band_count_mismatch_rejected(tmp_path):
    """An ABI-shaped file must not load as VIIRS."""
    ds = generate_dataset(get_sensor("ABI"), 10, seed=0)
    path = str(tmp_path / "abi.csv")
    save_csv(ds, path)
    with pytest.raises(DataError):
        load_csv(path, sensor=get_sensor("VIIRS"))


def test_missing_file_reported():
    with pytest.raises(DataError):
        load_csv("/nonexistent/nowhere.csv")
