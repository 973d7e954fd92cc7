"""Fourier coefficients of level-1 Hecke eigenforms at integers represented
by class-number-one binary quadratic forms.

Submodules:

- :mod:`heckeqf.arith`        Kronecker symbols, factor sieve, divisor sums
- :mod:`heckeqf.eigenform`    exact q-expansions and normalized coefficients
- :mod:`heckeqf.qform`        reduced forms, class numbers, representation counts
- :mod:`heckeqf.symmpower`    Satake angles, symmetric-power local coefficients
- :mod:`heckeqf.dirichlet`    truncated Dirichlet series and the R = L * U split
- :mod:`heckeqf.asymptotics`  partial sums, main-term fits, sign changes
- :mod:`heckeqf.cli`          command-line frontend
"""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
