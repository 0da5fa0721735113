"""JSON scenario files.

A scenario looks like::

    {
      "seed": 7,
      "analog": {"users": 10, "power_dB": -10, "function": {"name": "sum"}},
      "digital": {"users": 1, "power_dB": 0, "message_bits": 2000,
                  "code_length": 2664, "column_weight": 3, "code_seed": 1},
      "partition": {"block_length": 10},
      "channel": {"complex": true, "noise_split": "half",
                  "noise": {"gaussian": {}}},
      "sweep": {"noise_power_dB": [-13, -12, -11]},
      "trials": {"batch": 100, "max_frames": 5000, "max_frame_errors": 200},
      "workers": 1
    }

Powers and squared amplitudes in dB are ``10 log10`` of the literal quantity.
With ``"complex": true`` the stated analog power and noise power refer to
complex channel uses, which are carried as pairs of real uses.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import jsonschema
import numpy as np

from .channel import GaussianNoise, MiddletonClassA
from .codes.base import LdpcQamCode
from .codes.ldpc import LdpcCode
from .codes.wrapping import BlockPartition, WrappedCode, beta_prime, partition_for_base_length
from .scheme import (SoccConfig, db_to_power, p_norm_function, sum_function,
                     weighted_sum_function)

_NUM = {"type": "number"}
_GRID = {"type": "array", "minItems": 1, "items": {"type": ["number", "null"]}}

SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "workers": {"type": "integer", "minimum": 1},
        "analog": {
            "type": "object",
            "properties": {
                "users": {"type": "integer", "minimum": 1},
                "power_dB": _NUM,
                "function": {
                    "type": "object",
                    "properties": {
                        "name": {"enum": ["sum", "p-norm", "weighted-sum"]},
                        "p": {"type": "number", "minimum": 1},
                        "weights": {"type": "array", "items": _NUM},
                    },
                    "required": ["name"],
                },
                "sources": {"enum": ["uniform-sum", "iid-uniform"]},
            },
        },
        "digital": {
            "type": "object",
            "properties": {
                "users": {"const": 1},
                "power_dB": _NUM,
                "message_bits": {"type": "integer", "minimum": 1},
                "code_length": {"type": "integer", "minimum": 8},
                "column_weight": {"type": "integer", "minimum": 2},
                "code_seed": {"type": "integer", "minimum": 0},
                "alist": {"type": "string"},
                "max_iter": {"type": "integer", "minimum": 1},
            },
        },
        "partition": {
            "type": "object",
            "properties": {
                "block_length": {"type": "integer", "minimum": 2},
                "beta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "channel": {
            "type": "object",
            "properties": {
                "complex": {"type": "boolean"},
                "noise_split": {"enum": ["half", "full"]},
                "noise": {
                    "type": "object",
                    "oneOf": [
                        {"required": ["gaussian"]},
                        {"required": ["middleton"]},
                    ],
                    "properties": {
                        "gaussian": {"type": "object",
                                     "properties": {"power_dB": _NUM}},
                        "middleton": {"type": "object",
                                      "properties": {"A": {"type": "number", "exclusiveMinimum": 0},
                                                     "gamma": {"type": "number",
                                                               "exclusiveMinimum": 0},
                                                     "power_dB": _NUM},
                                      "required": ["A", "gamma"]},
                    },
                },
            },
        },
        "sweep": {
            "type": "object",
            "properties": {"noise_power_dB": _GRID},
        },
        "trials": {
            "type": "object",
            "properties": {
                "batch": {"type": "integer", "minimum": 1},
                "max_frames": {"type": "integer", "minimum": 1},
                "max_frame_errors": {"type": "integer", "minimum": 1},
            },
        },
        "histogram": {
            "type": "object",
            "properties": {
                "codewords": {"type": "integer", "minimum": 1},
                "bin_width": {"type": "number", "exclusiveMinimum": 0},
                "batch": {"type": "integer", "minimum": 1},
            },
        },
        "bounds": {
            "type": "object",
            "properties": {
                "sweep": {"enum": ["K_d", "beta"]},
                "K_d": {"type": ["integer", "array"]},
                "beta": {"type": ["number", "array"]},
                "K_a": {"type": "integer", "minimum": 1},
                "power_dB": _NUM,
                "analog_amplitude_dB": _NUM,
                "noise_power_dB": _NUM,
                "amplitude_factor": {"type": "number", "exclusiveMinimum": 0},
                "grid_points": {"type": "integer", "minimum": 3},
            },
        },
    },
}

DEFAULTS = {
    "seed": 0,
    "workers": 1,
    "analog": {"users": 10, "power_dB": -10.0, "function": {"name": "sum"},
               "sources": "uniform-sum"},
    "digital": {"users": 1, "power_dB": 0.0, "message_bits": 2000, "code_length": 2664,
                "column_weight": 3, "code_seed": 1, "max_iter": 50},
    "partition": {"block_length": 10},
    "channel": {"complex": True, "noise_split": "half", "noise": {"gaussian": {}}},
    "sweep": {"noise_power_dB": [-13.0]},
    "trials": {"batch": 100, "max_frames": 5000, "max_frame_errors": 200},
    "histogram": {"codewords": 10000, "bin_width": 0.01, "batch": 1000},
    "bounds": {"sweep": "K_d", "K_d": list(range(1, 11)), "beta": 0.0999, "K_a": 10,
               "power_dB": 8.0, "analog_amplitude_dB": 2.5, "noise_power_dB": 0.0,
               "amplitude_factor": 2 * 2**0.5, "grid_points": 201},
}


_REPLACE = {"noise", "partition", "function"}


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in _REPLACE:
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(source) -> dict:
    """Validate a scenario (path, JSON string or dict) and fill in defaults."""
    if isinstance(source, dict):
        raw = source
    else:
        p = Path(source)
        raw = json.loads(p.read_text()) if p.exists() else json.loads(source)
    jsonschema.validate(raw, SCHEMA)
    return _merge(DEFAULTS, raw)


@lru_cache(maxsize=8)
def _ldpc(n: int, k: int, col_weight: int, seed: int, alist: str | None) -> LdpcCode:
    if alist:
        return LdpcCode.from_alist(alist)
    return LdpcCode.regular(n, k / n, col_weight, seed)


def build_digital_code(cfg: dict) -> WrappedCode:
    d = cfg["digital"]
    ldpc = _ldpc(d["code_length"], d["message_bits"], d["column_weight"], d["code_seed"],
                 d.get("alist"))
    if not d.get("alist") and ldpc.k != d["message_bits"]:
        raise ValueError(f"code carries {ldpc.k} message bits, expected {d['message_bits']}")
    base = LdpcQamCode(ldpc, symbol_power=float(db_to_power(d["power_dB"])),
                       max_iter=d["max_iter"])
    return WrappedCode(base, build_partition(cfg, base.n_code))


def build_partition(cfg: dict, n_base: int) -> BlockPartition:
    part = cfg["partition"]
    if "block_length" not in part:
        return partition_for_base_length(n_base, part["beta"])
    m = part["block_length"]
    if n_base % (m - 1):
        L = n_base // (m - 1) + 1
        return BlockPartition((m,) * (L - 1) + (n_base - (L - 1) * (m - 1) + 1,))
    return BlockPartition((m,) * (n_base // (m - 1)))


def nominal_beta(cfg: dict) -> float:
    part = cfg["partition"]
    if "block_length" not in part:
        return float(part["beta"])
    return float(beta_prime(1.0 / part["block_length"]))


def noise_model(cfg: dict, noise_power_dB):
    """Noise of one real channel use for a sweep point (``None`` means noiseless)."""
    ch = cfg["channel"]
    if noise_power_dB is None or noise_power_dB == -np.inf:
        return GaussianNoise(0.0)
    power = float(db_to_power(noise_power_dB))
    if ch["complex"] and ch["noise_split"] == "half":
        power /= 2.0
    model = ch["noise"]
    if "middleton" in model:
        m = model["middleton"]
        return MiddletonClassA(A=float(m["A"]), gamma=float(m["gamma"]), power=power)
    return GaussianNoise(power)


def analog_amplitude(cfg: dict) -> float:
    """Real-use analog amplitude: complex power splits evenly over the two parts."""
    a2 = float(db_to_power(cfg["analog"]["power_dB"]))
    return float(np.sqrt(a2 / 2.0 if cfg["channel"]["complex"] else a2))


def analog_function(cfg: dict):
    f = cfg["analog"]["function"]
    K = cfg["analog"]["users"]
    if f["name"] == "sum":
        return sum_function(K)
    if f["name"] == "p-norm":
        return p_norm_function(K, f.get("p", 2.0))
    w = f.get("weights")
    if w is None or len(w) != K:
        raise ValueError("weighted-sum needs one weight per analog user")
    return weighted_sum_function(w)


@dataclass
class Scenario:
    cfg: dict
    code: WrappedCode
    fn: object

    def socc_config(self, noise_power_dB) -> SoccConfig:
        return SoccConfig(K_a=self.cfg["analog"]["users"], A_a=analog_amplitude(self.cfg),
                          partition=self.code.partition,
                          noise=noise_model(self.cfg, noise_power_dB), code=self.code,
                          beta=nominal_beta(self.cfg))


def build_scenario(cfg: dict) -> Scenario:
    return Scenario(cfg=cfg, code=build_digital_code(cfg), fn=analog_function(cfg))
