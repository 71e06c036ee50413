"""Brownian motion on the free reflection quantum groups H_N^{s+}.

Central characters and their fusion, the Levy semigroup on characters, the
free Meixner law ``nu_s`` with its tilts ``eta_c^s``, and the total-variation
cutoff profiles ``f_s``.
"""

from .characters import CharSum, Surd, Word, WordParseError, enumerate_type_classes, fuse, parse_word, x_n
from .measures import SpectralMeasure, eta_cs, finite_n_measure, moment, moments, nu_s
from .polynomials import VanishingFactorError, chebyshev_eval, q_ell_eval, q_poly_eval
from .profiles import (
    Region,
    f_inf,
    finite_n_tv,
    limit_profile,
    profile_point,
    profile_sweep,
    singular_closed_form,
    singular_threshold,
    tv_distance,
)
from .semigroup import ModelParams, cutoff_time, phi_char, phi_xn, phi_xn_bruteforce

__all__ = [
    "CharSum", "Surd", "Word", "WordParseError", "enumerate_type_classes", "fuse", "parse_word", "x_n",
    "SpectralMeasure", "eta_cs", "finite_n_measure", "moment", "moments", "nu_s",
    "VanishingFactorError", "chebyshev_eval", "q_ell_eval", "q_poly_eval",
    "Region", "f_inf", "finite_n_tv", "limit_profile", "profile_point", "profile_sweep",
    "singular_closed_form", "singular_threshold", "tv_distance",
    "ModelParams", "cutoff_time", "phi_char", "phi_xn", "phi_xn_bruteforce",
]
