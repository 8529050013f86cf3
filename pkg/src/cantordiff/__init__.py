"""Certificates for interior points in differences of random M-adic Cantor sets."""

__version__ = "0.1.0"

from .spectrum import (  # noqa: E402
    CantorSpec,
    correlations,
    expectation_matrix,
    gamma_at,
    higher_order,
    pf_eigenvalue,
    word_matrix,
)
from .decision import (  # noqa: E402
    Decision,
    Verdict,
    analyze,
    critical_bracket,
    decide_escalating,
    decide_order1,
    spectral_certificate,
)
from .determ import decide_deterministic  # noqa: E402
from .pairing import check_coloring, max_delta_pairs, three_color_pairing  # noqa: E402
from .simulate import run_experiment, sample  # noqa: E402

__all__ = [
    "CantorSpec",
    "Decision",
    "Verdict",
    "analyze",
    "check_coloring",
    "correlations",
    "critical_bracket",
    "decide_deterministic",
    "decide_escalating",
    "decide_order1",
    "expectation_matrix",
    "gamma_at",
    "higher_order",
    "max_delta_pairs",
    "pf_eigenvalue",
    "run_experiment",
    "sample",
    "spectral_certificate",
    "three_color_pairing",
    "word_matrix",
]
