"""Exact and Monte Carlo Hilbert-Schmidt volumes of generalized Pauli channels."""

from ._core import (
    ChannelSpec,
    check_conjectures,
    class_volume,
    classify,
    mc_volume,
    verify_mubs,
    volume_ratio,
    vp_volume,
)

__all__ = [
    "ChannelSpec",
    "check_conjectures",
    "class_volume",
    "classify",
    "mc_volume",
    "verify_mubs",
    "volume_ratio",
    "vp_volume",
]
