"""
HWMF binary field dumps.

Layout: b"HWMF", version u32, d u32, N_j u32 x d, L_j f64 x d, component count u32,
then the row-major little-endian f64 payload (component-major for vector fields).
"""
from pathlib import Path
from typing import Union

import numpy as np

from hwmlab.errors import ConstraintViolation, FieldFormatError
from hwmlab.spectral_core import ScalarField, SphereField, TorusGrid, VectorField3

MAGIC = b"HWMF"
VERSION = 1

U32 = np.dtype("<u4")
F64 = np.dtype("<f8")


def encode_field(field: Union[ScalarField, VectorField3]) -> bytes:
    grid = field.grid
    components = 3 if isinstance(field, VectorField3) else 1
    header = [
        MAGIC,
        np.array([VERSION, grid.dim], dtype=U32).tobytes(),
        np.array(grid.sizes, dtype=U32).tobytes(),
        np.array(grid.lengths, dtype=F64).tobytes(),
        np.array([components], dtype=U32).tobytes(),
    ]
    return b"".join(header) + np.ascontiguousarray(field.values, dtype=F64).tobytes()


def decode_field(data: bytes, as_sphere: bool = False) -> Union[ScalarField, VectorField3]:
    if data[:4] != MAGIC:
        raise FieldFormatError("not an HWMF dump (bad magic)")
    offset = 4

    def take(dtype, count):
        nonlocal offset
        size = dtype.itemsize * count
        if offset + size > len(data):
            raise FieldFormatError("truncated HWMF header")
        out = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
        offset += size
        return out

    version, dim = (int(x) for x in take(U32, 2))
    if version != VERSION:
        raise FieldFormatError(f"unsupported HWMF version {version}")
    sizes = tuple(int(n) for n in take(U32, dim))
    lengths = tuple(float(x) for x in take(F64, dim))
    components = int(take(U32, 1)[0])
    if components not in (1, 3):
        raise FieldFormatError(f"component count must be 1 or 3, got {components}")
    count = components * int(np.prod(sizes))
    if len(data) - offset != count * F64.itemsize:
        raise FieldFormatError(f"payload holds {len(data) - offset} bytes, expected {count * F64.itemsize}")
    grid = TorusGrid(sizes=sizes, lengths=lengths)
    values = np.frombuffer(data, dtype=F64, count=count, offset=offset)
    if components == 1:
        return ScalarField(grid, values.reshape(grid.shape))
    values = values.reshape((3,) + grid.shape)
    if as_sphere:
        try:
            return SphereField(grid, values)
        except ConstraintViolation as e:
            raise FieldFormatError(f"dump is not sphere-valued: {e}") from e
    return VectorField3(grid, values)


def write_field(path: Union[str, Path], field: Union[ScalarField, VectorField3]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_field(field))
    return path


def read_field(path: Union[str, Path], as_sphere: bool = False) -> Union[ScalarField, VectorField3]:
    return decode_field(Path(path).read_bytes(), as_sphere=as_sphere)
