"""Bundled CSV fixtures (Iris; original Wisconsin breast cancer, NA rows removed)."""
