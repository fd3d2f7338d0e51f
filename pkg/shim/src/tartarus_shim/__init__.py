"""Reference descriptor provider for the benchmark harness.

Serves sascore, qed, logp, tpsa and alerts_pass over the line-delimited
wire protocol (``python -m tartarus_shim``).  The backend is self-contained:
scores are computed from published parameterizations re-implemented on top
of the harness's own graph layer, with the backend and alert-list revisions
recorded in every handshake.
"""

__version__ = "0.1.0"

BACKEND_VERSION = "builtin-0.1"
