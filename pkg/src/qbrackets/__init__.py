"""Exact q-brackets of partition functions and the modular objects they produce.

Submodules: ``partitions``, ``setpartitions``, ``algebra`` (exact series),
``invariants`` (functions on partitions), ``brackets``, ``qforms`` (closed
forms), ``numerics`` (transformation harness), ``checks`` and ``cli``.
"""

from .algebra import ParamContext, QSeries, USeries, dump_qseries, series_equal
from .brackets import (BracketContext, connected_q_bracket, connected_u_bracket, phi_inverse,
                       q_bracket, u_bracket)
from .partitions import Partition, gen_partitions

__version__ = "0.1.0"

__all__ = ["BracketContext", "ParamContext", "Partition", "QSeries", "USeries", "connected_q_bracket",
           "connected_u_bracket", "dump_qseries", "gen_partitions", "phi_inverse", "q_bracket",
           "series_equal", "u_bracket"]
