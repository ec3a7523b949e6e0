"""Cesaro function and sequence spaces over exactly representable inputs.

Step functions and finite sequences go in; norms, Koethe dual norms and
checks of the duality results and Hardy-type inequalities come out.
"""

from .core import (Cesaro, ConcaveGauge, Domain, DomainMismatch, Lorentz, Lp, Marcinkiewicz, SeqCesaro,
                   SeqLp, SeqTilde, Sequence, SpecError, StepFunction, Tilde, Undecidable, UnsupportedSpec,
                   Weighted, nontriviality, parse_gauge, parse_space, parse_weight)
from .duality import (associate_norm, cesaro_dual_norm, down_norm, duality_report, holder_conjugate_space,
                      sinnamon_sup)
from .norms import NormValue, norm
from .operators import (cesaro, cesaro_seq, cesaro_twice, copson, decreasing_rearrangement, dilation,
                        majorant, substitution_T)

__version__ = "0.1.0"
