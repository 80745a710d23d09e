"""Band construction from noise records and band file I/O."""

from bandtest.band.builder import BandWidthProfile, band_width_profile, build_band
from bandtest.band.io import load_band, load_sample, save_band, save_width_profile

__all__ = [
    "BandWidthProfile",
    "band_width_profile",
    "build_band",
    "load_band",
    "load_sample",
    "save_band",
    "save_width_profile",
]
