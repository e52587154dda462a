"""Reed-Muller gate optimisation of NEQR image circuits."""

from .bitplane import (
    GrayImage,
    ImagePlanes,
    extract_planes,
    parse_pgm,
    random_image,
    read_pgm,
    recombine,
)
from .circuit import (
    Circuit,
    CostModel,
    Form,
    ProductTerm,
    circuit_cost,
    export_qasm,
    parse_qasm,
    qc_gate,
    synthesize_esop,
    synthesize_pprm,
)
from .fit import Family, FitModel, FitResult, fit, model_eval
from .metrics import SweepRecord, compression_ratio, optimization_rate, sweep
from .rm_transform import Basis, CoefficientVector, pprm_forward, pprm_naive, term_literals
from .verify import equivalent, eval_plane, reconstruct_image

__version__ = "0.1.0"
