"""Statevector simulation of quantum PAC learning with a state-preparation oracle."""

from qpac.concepts import (Classifier, ConceptClass, Distribution, LearningParams,
                           distance, is_shattered, junta_class, perturbed_delta,
                           sample, vc_dimension)
from qpac.eqlearn import (EqKind, EqResult, Transcript, halving_learner, ideal_eq,
                          imperfect_eq, learn_with_budget, pac_learn, wmv)
from qpac.grover import (GoodSubset, closed_form_ps, conditional_output_distribution,
                         exact_success_probability, grover_operator, grover_search)
from qpac.kernels import BACKEND
from qpac.sim import (RegisterLayout, SampleOracle, StateVector, apply,
                      build_sample_oracle, call_report, make_rng, measure)

__version__ = "0.1.0"
