"""vass-forge: counter programs, zero-test gadgets, formula compilation,
Turing-machine pipelines and a bounded reachability engine."""

__version__ = "0.1.0"
