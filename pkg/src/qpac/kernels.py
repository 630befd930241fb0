"""Backend selection for the Grover-iteration kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is. Setting ``QPAC_PURE_PYTHON=1`` forces the fallback.
"""

import os

from qpac import _kernels_py

if os.environ.get("QPAC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from qpac import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

KERNEL_NAMES = ("axis_grover_power", "dense_grover_power",
                "axis_good_mass_trajectory", "dense_good_mass_trajectory")

axis_grover_power = _impl.axis_grover_power
dense_grover_power = _impl.dense_grover_power
axis_good_mass_trajectory = _impl.axis_good_mass_trajectory
dense_good_mass_trajectory = _impl.dense_good_mass_trajectory

BACKENDS = {"python": _kernels_py}
try:
    from qpac import _kernels as _compiled
    BACKENDS["cython"] = _compiled
except ImportError:
    pass
