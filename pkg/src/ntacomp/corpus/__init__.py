"""Bundled models, verification plans and fixtures."""

from __future__ import annotations

import pathlib

ROOT = pathlib.Path(__file__).resolve().parent
MODELS = ROOT / "models"
PLANS = ROOT / "plans"
FIXTURES = ROOT / "fixtures"


def model_path(name: str) -> pathlib.Path:
    p = MODELS / name
    return p if p.suffix else p.with_suffix(".tanet")


def plan_path(name: str) -> pathlib.Path:
    p = PLANS / name
    return p if p.suffix else p.with_suffix(".cvplan")


def resolve(path: str) -> pathlib.Path:
    """``path`` itself if it exists, else the bundled file it names
    (``models/x.tanet``, ``plans/y.cvplan`` or a bare file name)."""
    p = pathlib.Path(path)
    if p.exists():
        return p
    parts = p.parts
    if len(parts) >= 2 and parts[-2] in ("models", "plans"):
        q = ROOT / parts[-2] / parts[-1]
        if q.exists():
            return q
    for d in (MODELS, PLANS):
        q = d / p.name
        if q.exists():
            return q
    return p
