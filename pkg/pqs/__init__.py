# -*- coding: utf-8 -*-
"""
Projective Quantum States (PQS)
"""

import os
import logging
from functools import partial, partialmethod
from pqs.geometry import (Point, TangentVector, Covector, OneForm,
                          VectorField, ScalarFunction, TensorSort,
                          ConfigField, MomentumField, DiscreteMeasure)
from pqs.dof import (ConfigDof, MomentumDof, MomentumOperator,
                     CylindricalFunction, pairing, poisson_oracle)
from pqs.frames import DiscreteFrame, KGamma, build_K_gamma
from pqs.systems import FiniteSystem, SystemRelation, join
from pqs.hilbert import FactorizedFamily, generate_family
from pqs.coupling import Graph, SurfaceSet, LQGSystem, CoupledSystem

__author__ = """PQS developers"""

PQS_DIR = os.path.dirname(os.path.realpath(__file__))
DATA_DIR = os.path.join(PQS_DIR, 'data')

logging.TRACE = 5
logging.addLevelName(logging.TRACE, 'TRACE')
logging.Logger.trace = partialmethod(logging.Logger.log, logging.TRACE)
logging.trace = partial(logging.log, logging.TRACE)
