"""MinErl: a small Erlang-like language with a set-theoretic type checker.

The checker decides semantic subtyping over unions, intersections,
negations, products, arrows and recursive types, solves subtype
constraints with a tally procedure, and reports diagnostics per
definition. An interpreter and a finite-model oracle are included for
testing the type system against the dynamic semantics.
"""

__version__ = "0.1.0"
