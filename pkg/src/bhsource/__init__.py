"""bhsource: multi-frequency point-source recovery for biharmonic waves.

Forward synthesis of scattered fields from point sources of the fourth-order
plate-wave operator, direct-sampling indicator imaging from sparse sensors,
and Prony-type recovery from harmonically spaced frequencies.
"""

import os as _os

# Pick numba's always-available threading layer unless the user chose one;
# the TBB/OMP probes warn noisily when those libraries are stale.  Must be
# set before numba is first imported anywhere in the process.
_os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

__version__ = "0.1.0"
