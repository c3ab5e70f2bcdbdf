"""Real root counting for binary forms and real critical points of pencils."""
from .circle import AngleList, RootCount, RootOptions, count_roots_circle
from .critical import critical_angles, pencil_critical_count
from .eigen import eigen_real_count, eigen_roots
from .rp2 import Rp2Options, count_crit_rp2, solve_crit_rp2
from .sturm import sturm_count

__all__ = ["AngleList", "RootCount", "RootOptions", "count_roots_circle", "critical_angles",
           "pencil_critical_count", "eigen_real_count", "eigen_roots", "Rp2Options",
           "count_crit_rp2", "solve_crit_rp2", "sturm_count"]
