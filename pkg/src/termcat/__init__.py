"""termcat: multisorted equational logic compiled to finite-product
categorical combinators, with deductions checked as arrow-equality
certificates."""

__version__ = "0.1.0"
