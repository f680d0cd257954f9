"""Exact-arithmetic workbench for congruence quotients of Chevalley groups.

Layers, bottom up:

* :mod:`localzeta.rings`      -- finite truncated local rings and Z/n
* :mod:`localzeta.rootdata`   -- root systems and pairings
* :mod:`localzeta.laurent`    -- exact multivariate Laurent polynomials
* :mod:`localzeta.chevalley`  -- Chevalley bases and adjoint one-parameter
  subgroups over the rings above
* :mod:`localzeta.groups`     -- enumerated finite matrix groups, orbits,
  class counting, Hecke pair counting, depth statistics
* :mod:`localzeta.zeta`       -- truncated Dirichlet-type series and
  bivariate rational generating functions
* :mod:`localzeta.igusa`      -- brute-force local integrals of |f|^s
* :mod:`localzeta.presburger` -- linear-arithmetic definable sums as
  rational functions of (q, q^{-s})
* :mod:`localzeta.verify`     -- cross-check suites over all of the above
* :mod:`localzeta.cli`        -- the ``zeta`` command line tool
"""

__version__ = "0.1.0"

from .cache import table_for  # noqa: F401
from .chevalley import chevalley_group, verify_torus_conjugation  # noqa: F401
from .groups import Family, GroupTable, TooLarge  # noqa: F401
from .igusa import igusa_truncation, level_set_measures, parse_poly  # noqa: F401
from .laurent import Laurent  # noqa: F401
from .presburger import (  # noqa: F401
    Divergent,
    SummationSpec,
    brute_force_series,
    brute_force_sum,
    eliminate_quantifiers,
    sum_rational,
)
from .rings import Ring, make_ring, parse_ring  # noqa: F401
from .rootdata import root_system  # noqa: F401
from .verify import run_suite  # noqa: F401
from .zeta import (  # noqa: F401
    BivariateRational,
    ZetaSeries,
    cc_zeta,
    euler_multiplicativity,
    expand,
    hecke_zeta,
    transfer_report,
)
