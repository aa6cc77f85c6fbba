"""Salient object detection in the color name space."""
from cns_saliency.combine import PRESETS, ParamSet, detect
from cns_saliency.colorname import fallback_table, load_table

__all__ = ["PRESETS", "ParamSet", "detect", "fallback_table", "load_table"]
__version__ = "0.1.0"
