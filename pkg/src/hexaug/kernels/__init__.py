"""Training-loop kernels: compiled extension with a NumPy fallback.

The minibatch SGD inner loop dominates experiment runtime, so it is
implemented twice with one contract:

``sgd_epochs(X, y, W, b, lr, l2, batch_size, order, loss_out) -> int``

* X (n, d) float64, y (n,) int64: the training set.
* W (k, d), b (k,) float64: parameters, updated in place.
* order (epochs, n) int64: precomputed shuffles, one row per epoch, so
  batch composition is identical across backends.
* loss_out (epochs,) float64: filled with the example-weighted mean
  minibatch objective per epoch.
* returns -1 on success, else the global batch step at which the loss
  first became non-finite (parameters are left as-is for diagnosis).

Backend selection happens once at import: the compiled kernel is used
when present unless HEXAUG_PURE=1 forces the NumPy path. Both backends
are deterministic; they agree to floating-point roundoff (not bit-for-
bit, since summation orders differ).
"""

import os

from . import pure

try:
    from . import _sgdkernel as _compiled
except ImportError:  # extension not built; NumPy path is fully supported
    _compiled = None

_force_pure = os.environ.get("HEXAUG_PURE", "").lower() in ("1", "true", "yes")

if _compiled is not None and not _force_pure:
    BACKEND = "compiled"
    sgd_epochs = _compiled.sgd_epochs
else:
    BACKEND = "python"
    sgd_epochs = pure.sgd_epochs


def implementations() -> dict:
    """All importable backends, keyed by name (for parity tests/benchmarks)."""
    out = {"python": pure.sgd_epochs}
    if _compiled is not None:
        out["compiled"] = _compiled.sgd_epochs
    return out
