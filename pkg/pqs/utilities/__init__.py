# -*- coding: utf-8 -*-
"""PQS utilities."""
from .rational import (as_rational, as_rational_tuple, rational_to_str,
                       rational_array, exact_matrix, exact_rank, exact_det)
from .random import make_rng, DEFAULT_SEED
from .parallel import CheckRunner
