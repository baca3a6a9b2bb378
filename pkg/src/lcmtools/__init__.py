"""Certificates of logarithmic complete monotonicity for rational transfer
functions, external-positivity tests and monotone-tracking controller
synthesis by convex pole placement."""

from .certify import (LcmCertificate, Method, Verdict, certify, certify_corollary1,
                      certify_theorem1, check_exact_polynomial, check_exact_sampled,
                      check_necessary)
from .exceptions import CoprimalityError, DomainError, InfeasibleError, SynthesisError
from .positivity import ExPos, ExPosVerdict, expos, expos_oracle
from .rational import Polynomial, RationalTF, impulse_response, step_response
from .synthesis import SynthesisProblem, SynthesisResult, synthesize

__version__ = "0.1.0"
