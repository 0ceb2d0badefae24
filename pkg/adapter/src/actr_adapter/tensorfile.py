"""Writer for the planner's binary tensor format.

Kept independent of the planner package on purpose: the file format is
the interface boundary.  Layout: four ASCII header lines (magic, dtype,
ndim, dims), a ``data`` marker, then raw little-endian float32 values in
row-major order.  Metadata goes into a ``<path>.meta`` sidecar.
"""

import os
import tempfile

import numpy as np

MAGIC = "ACTR-TENSOR v1"


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".adapter-tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_tensor(path: str, values: np.ndarray, meta: dict | None = None) -> None:
    arr = np.ascontiguousarray(values, dtype="<f4")
    header = (
        f"{MAGIC}\n"
        f"dtype f32\n"
        f"ndim {arr.ndim}\n"
        f"dims {' '.join(str(d) for d in arr.shape)}\n"
        f"data\n"
    ).encode("ascii")
    _atomic_write(path, header + arr.tobytes(order="C"))
    if meta is not None:
        lines = "".join(f"{k} = {v}\n" for k, v in meta.items())
        _atomic_write(path + ".meta", lines.encode("utf-8"))


def read_tensor(path: str) -> np.ndarray:
    """Minimal reader used by the adapter's own tests."""
    with open(path, "rb") as fh:
        blob = fh.read()
    head, _, rest = blob.partition(b"data\n")
    lines = head.decode("ascii").splitlines()
    if lines[0] != MAGIC or lines[1] != "dtype f32":
        raise ValueError(f"{path}: not a tensor file")
    dims = tuple(int(t) for t in lines[3].split()[1:])
    return np.frombuffer(rest, dtype="<f4").reshape(dims).copy()
