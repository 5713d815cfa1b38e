"""Feature-matrix persistence: CSV and a small binary container.

CSV layout: header "id,label,f0..fN", one row per image, '.' decimal
separator, LF line endings. The binary format is little-endian with a
16-byte header: magic "DFKF", uint32 n_rows, uint32 n_cols, 4-byte
descriptor code, followed by the float64 matrix row-major.
"""

import csv
import os
import struct
import tempfile

import numpy as np

from .errors import CorruptDataError, UnsupportedFormatError

FEATURE_MAGIC = b"DFKF"

DESCRIPTOR_CODES = {
    "canny": b"CNNY",
    "prewitt": b"PRWT",
    "sobel": b"SOBL",
    "roberts": b"RBRT",
    "log": b"LOG_",
    "approxcanny": b"ACNY",
    "hpiv": b"HPIV",
    "hog8": b"HOG8",
    "hog10": b"HG10",
    "lbp8": b"LBP8",
    "lbp16": b"LB16",
    "lbp32": b"LB32",
}
_CODE_TO_DESCRIPTOR = {v: k for k, v in DESCRIPTOR_CODES.items()}


def atomic_write_bytes(path, data):
    """Write via a temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def format_float(x):
    return format(float(x), ".10g")


def write_feature_csv(path, ids, labels, matrix, header_prefix=("id", "label")):
    matrix = np.asarray(matrix, dtype=np.float64)
    n, p = matrix.shape
    lines = [",".join(list(header_prefix) + [f"f{j}" for j in range(p)])]
    for i in range(n):
        row = [str(ids[i]), str(int(labels[i]))]
        row.extend(format_float(v) for v in matrix[i])
        lines.append(",".join(row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_feature_csv(path):
    """Return (ids, labels, matrix) from a feature CSV."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["id", "label"]:
            raise CorruptDataError(f"{path}: not a feature CSV")
        ids, labels, rows = [], [], []
        for rec in reader:
            if not rec:
                continue
            ids.append(rec[0])
            labels.append(int(rec[1]))
            rows.append([float(v) for v in rec[2:]])
    return ids, np.array(labels, dtype=np.int64), np.array(rows, dtype=np.float64)


def write_feature_bin(path, matrix, descriptor):
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    n, p = matrix.shape
    code = DESCRIPTOR_CODES.get(descriptor)
    if code is None:
        raise ValueError(f"unknown descriptor tag {descriptor!r}")
    header = FEATURE_MAGIC + struct.pack("<II", n, p) + code
    assert len(header) == 16
    data = matrix.astype("<f8").tobytes()
    atomic_write_bytes(path, header + data)


def read_feature_bin(path):
    """Return (matrix, descriptor) from the binary container."""
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) < 16 or header[:4] != FEATURE_MAGIC:
            raise UnsupportedFormatError(f"{path}: not a feature container")
        n, p = struct.unpack("<II", header[4:12])
        code = header[12:16]
        descriptor = _CODE_TO_DESCRIPTOR.get(code)
        if descriptor is None:
            raise CorruptDataError(f"{path}: unknown descriptor code {code!r}")
        payload = fh.read(8 * n * p)
    if len(payload) != 8 * n * p:
        raise CorruptDataError(f"{path}: truncated payload")
    matrix = np.frombuffer(payload, dtype="<f8").reshape(n, p).copy()
    return matrix, descriptor


def write_scores_csv(path, ids, labels, scores):
    lines = ["id,label,score"]
    for i, lab, s in zip(ids, labels, scores):
        lines.append(f"{i},{int(lab)},{format_float(s)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_scores_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header != ["id", "label", "score"]:
            raise CorruptDataError(f"{path}: not a scores CSV")
        ids, labels, scores = [], [], []
        for rec in reader:
            if not rec:
                continue
            ids.append(rec[0])
            labels.append(int(rec[1]))
            scores.append(float(rec[2]))
    return ids, np.array(labels, dtype=np.int64), np.array(scores, dtype=np.float64)
