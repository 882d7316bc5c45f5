"""Gaps in the support of discretely infinitely divisible laws.

Tools for the additive semigroup generated by a jump support, compound
Poisson PMFs and their convolution roots, interval supports of finite Levy
measures, left extremities from Laplace transforms, and a seeded sampler
that checks the predicted supports empirically.
"""

from didgaps.errors import (
    ContainmentError,
    DomainError,
    LeftExtremityError,
    NumericInstabilityError,
    OutOfScopeError,
)
from didgaps.semigroup import (
    GapReport,
    NumericalSemigroup,
    gap_report,
    gap_runs,
    is_gap_free,
    jump_count_values,
    normalize,
    sieve,
)
from didgaps.series import (
    CompoundPoissonSpec,
    DidVerdict,
    compound_poisson_pmf,
    did_test,
    nth_root,
    series_exp,
    series_log,
    series_mul,
    series_pow,
    support_indices,
)

# the ``semigroup`` constructor is not re-exported: it would shadow the
# ``didgaps.semigroup`` module; use ``from didgaps.semigroup import semigroup``

__version__ = "0.1.0"
