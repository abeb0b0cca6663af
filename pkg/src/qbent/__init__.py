"""q-transforms of Boolean functions over GL_n(F_2), almost q-bent search and PDS arithmetic."""

__version__ = "0.1.0"

from .boolfun import TruthTable, from_anf, parse_anf, to_anf, walsh_transform, weight  # noqa: F401
from .glnf2 import BitMatrix, gl_order  # noqa: F401
from .qtransform import q_bentness, q_coeff, q_spectrum  # noqa: F401
