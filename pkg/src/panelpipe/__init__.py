"""panelpipe: pre/post-processing toolchain for panel-method aerodynamics.

Mesh ingestion, right-hand-rule network construction, abutment repair,
legacy deck generation, an embedded reference potential-flow solver plus a
process adapter for the legacy binary, result parsing, and
visualization-ready export.
"""

__version__ = "0.1.0"
