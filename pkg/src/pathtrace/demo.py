"""Locations of the bundled demo application."""

from __future__ import annotations

from pathlib import Path


def demo_root() -> Path:
    return Path(__file__).resolve().parent / "demo_app"


def demo_config_path() -> Path:
    return demo_root() / "app.json"
