from .engine import (
    FuzzyRule,
    LinguisticVariable,
    MamdaniSystem,
    MembershipFunction,
    eval_membership,
    infer,
    load_system,
    system_from_dict,
)
from .colors import (
    color_names,
    color_regions,
    default_system,
    detect_color,
    detect_colors,
    max_firing_strength,
)

__all__ = [
    "FuzzyRule", "LinguisticVariable", "MamdaniSystem", "MembershipFunction",
    "eval_membership", "infer", "load_system", "system_from_dict",
    "color_names", "color_regions", "default_system", "detect_color",
    "detect_colors", "max_firing_strength",
]
