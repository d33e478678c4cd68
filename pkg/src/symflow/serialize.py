"""JSON encoding of kets and matrices: complex entries as ``[re, im]`` pairs."""
from __future__ import annotations

import json

import numpy as np


def encode_complex_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    pairs = np.stack([a.real, a.imag], axis=-1)
    return pairs.tolist()


def decode_complex_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be encoded as [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def ket_to_json(psi, d: int) -> dict:
    return {"d": int(d), "ket": encode_complex_array(psi)}


def matrix_to_json(m, d: int, **extra) -> dict:
    out = {"d": int(d), "matrix": encode_complex_array(m)}
    out.update(extra)
    return out


def ket_from_json(doc: dict) -> np.ndarray:
    psi = decode_complex_array(doc["ket"])
    if psi.shape != (doc["d"] ** 2,):
        raise ValueError(f"ket length {psi.shape} does not match d={doc['d']}")
    return psi


def matrix_from_json(doc: dict) -> np.ndarray:
    m = decode_complex_array(doc["matrix"])
    n = doc["d"] ** 2
    if m.shape != (n, n):
        raise ValueError(f"matrix shape {m.shape} does not match d={doc['d']}")
    return m


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)
