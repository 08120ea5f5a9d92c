import numpy as np
import pytest

from hwmlab.errors import FieldFormatError
from hwmlab.field_io import decode_field, encode_field, read_field, write_field
from hwmlab.sampling import band_limited_field, random_sphere_field
from hwmlab.spectral_core import ScalarField, SphereField, TorusGrid, VectorField3

GRID = TorusGrid(sizes=(8, 10), lengths=(1.0, 2.5))


def test_sphere_dump_reloads_as_sphere(tmp_path):
    u = random_sphere_field(GRID, 1, band=2)
    path = write_field(tmp_path / "dumps" / "u.hwmf", u)
    back = read_field(path, as_sphere=True)
    assert isinstance(back, SphereField)
    assert back.grid == GRID
    assert np.array_equal(back.values, u.values)


def test_scalar_header_layout():
    data = encode_field(band_limited_field(GRID, 0, band=2))
    assert data[:4] == b"HWMF"
    header = np.frombuffer(data, dtype="<u4", count=4, offset=4)
    assert list(header) == [1, 2, 8, 10]
    assert isinstance(decode_field(data), ScalarField)


def test_vector_without_constraint():
    field = VectorField3.constant(GRID, [1.0, 2.0, 3.0])
    back = decode_field(encode_field(field))
    assert type(back) is VectorField3


def test_not_sphere_valued():
    field = VectorField3.constant(GRID, [1.0, 2.0, 3.0])
    with pytest.raises(FieldFormatError, match="not sphere-valued"):
        decode_field(encode_field(field), as_sphere=True)


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda b: b"XXXX" + b[4:], "bad magic"),
        (lambda b: b[:4] + np.array([2], dtype="<u4").tobytes() + b[8:], "version"),
        (lambda b: b[:-8], "payload"),
        (lambda b: b[:10], "truncated"),
    ],
)
def test_malformed(mutate, message):
    data = encode_field(ScalarField.zeros(GRID))
    with pytest.raises(FieldFormatError, match=message):
        decode_field(mutate(data))
