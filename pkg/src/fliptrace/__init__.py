"""fliptrace: trace invariants of projections in the rotation algebra
and its flip orbifold.

Layers, bottom to top:

* ``algebra``    -- Fourier polynomials, twisted product, parity traces,
                    canonical (anti-)automorphisms;
* ``kernels``    -- compiled/numpy convolution backends;
* ``bump``       -- the smooth step profiles behind projection fields;
* ``arithmetic`` -- continued fractions, convergent pairs, the standing
                    condition;
* ``fields``     -- projection fields, the K_0 basis, the approximately
                    central projection of a convergent pair;
* ``spectral``   -- truncated-representation norm estimates and the
                    spectral cutoff of compressions;
* ``bimodule``   -- the lattice bimodule, its two inner products, the
                    circle-algebra side and its parity traces;
* ``ktheory``    -- closed-form trace matrices of cutdowns and the
                    symmetry-group orbit;
* ``cli``        -- the ``fliptrace`` command.
"""

from .algebra import (
    ChernCharacter,
    FourierElement,
    LinearForm,
    ThetaValue,
    adjoint,
    all_phi_traces,
    apply_beta,
    apply_cubic,
    apply_eta_doubling,
    apply_flip,
    apply_fourier,
    apply_gamma,
    apply_xi,
    apply_zeta,
    canonical_trace,
    phi_trace,
    snap_half_integer,
    twisted_mul,
)
from .errors import (
    FliptraceError,
    GapError,
    IntegrityError,
    ParameterError,
    ResolutionError,
)

__version__ = "0.1.0"

__all__ = [
    "ChernCharacter",
    "FourierElement",
    "LinearForm",
    "ThetaValue",
    "adjoint",
    "all_phi_traces",
    "apply_beta",
    "apply_cubic",
    "apply_eta_doubling",
    "apply_flip",
    "apply_fourier",
    "apply_gamma",
    "apply_xi",
    "apply_zeta",
    "canonical_trace",
    "phi_trace",
    "snap_half_integer",
    "twisted_mul",
    "FliptraceError",
    "GapError",
    "IntegrityError",
    "ParameterError",
    "ResolutionError",
    "__version__",
]
