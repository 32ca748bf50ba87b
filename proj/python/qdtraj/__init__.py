"""Quality-diversity trajectory primitives for articulated objects.

Thin Python layer over the native ``_core`` module. Configurations are plain dicts using
the same keys as the command-line ``--config`` JSON file.
"""

import json as _json
import math as _math

from . import _core
from ._core import QdtrajError, bin_descriptor, content_hash, segment_box_chord

__all__ = [
    "QdtrajError",
    "bin_descriptor",
    "content_hash",
    "default_config",
    "evaluate",
    "experimental_box",
    "hinge_task",
    "matrix",
    "oracle_grid",
    "parse_urdf",
    "part_poses",
    "reserialize_archive",
    "run",
    "run_experiment",
    "segment_box_chord",
    "slider_task",
]


def default_config():
    return _json.loads(_core.default_config())


def hinge_task(**overrides):
    """Builtin box door, 90 degrees open to closed."""
    cfg = {"object": "builtin", "joint": "hinge0", "s_init": _math.pi / 2, "s_target": 0.0}
    cfg.update(overrides)
    return cfg


def slider_task(**overrides):
    """Builtin box tray, pulled out by 0.2 m."""
    cfg = {"object": "builtin", "joint": "slider0", "s_init": 0.0, "s_target": 0.2}
    cfg.update(overrides)
    return cfg


def experimental_box():
    return _json.loads(_core.experimental_box())


def parse_urdf(xml):
    """Returns (object model dict, list of warnings)."""
    text, warnings = _core.parse_urdf(xml)
    return _json.loads(text), list(warnings)


def part_poses(obj, joint_values):
    """World (position, [w, x, y, z]) per part for an object model dict."""
    return _core.part_poses(_json.dumps(obj), list(joint_values))


def evaluate(config, position, orientation, action_space="adaptive", primitive_gene=0, noise_seed=0, global_seed=0, obj=None):
    """Evaluates one starting frame under `config`; returns the result as a dict."""
    text = _core.evaluate(
        _json.dumps(config),
        "" if obj is None else _json.dumps(obj),
        action_space,
        list(position),
        list(orientation),
        primitive_gene,
        noise_seed,
        global_seed,
    )
    return _json.loads(text)


def run(config, seed=0):
    """Runs in memory. Returns (archive dict, archive.json text, metrics rows)."""
    archive_text, metrics = _core.run(_json.dumps(config), seed)
    return _json.loads(archive_text), archive_text, _json.loads(metrics)


def run_experiment(config):
    """Writes one run directory per seed; returns the directories."""
    return _core.run_experiment(_json.dumps(config))


def matrix(config):
    """Runs all nine strategy x action-space combinations; returns the report dict."""
    return _json.loads(_core.run_matrix(_json.dumps(config)))


def oracle_grid(config, grid_step=0.02, orientations="24-rotations", margin=-1.0):
    return _json.loads(_core.oracle_grid(_json.dumps(config), grid_step, orientations, margin))


def reserialize_archive(text):
    return _core.reserialize_archive(text)
