"""Python bindings for the partbench C++ core."""

import json

from ._core import (
    Error,
    average_precision,
    carve,
    complete,
    compose,
    decode_segmap,
    default_config,
    encode_segmap,
    evaluate,
    gen,
    generate_asset,
    greedy_match,
    iou,
    normalize_config,
    rank_and_dedup,
    recall_at_k,
    render,
    render_stage,
    run_all,
    segment,
)


def config(**overrides):
    """Default configuration as a dict, with top-level keys replaced by ``overrides``."""
    cfg = json.loads(default_config())
    for key, value in overrides.items():
        if key not in cfg:
            raise KeyError(key)
        cfg[key] = value
    return cfg


def dumps(cfg):
    return json.dumps(cfg) if isinstance(cfg, dict) else cfg
