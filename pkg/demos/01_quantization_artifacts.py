"""Where pre-quantization errors come from and what they look like."""

import numpy as np

from qinterp import ErrorBound, dequantize, quantize, resolve_eps
from qinterp.mitigate import get_boundary_and_sign_map
from qinterp.synthetic import separable_waves

# %% a smooth 3D field
data = separable_waves((64, 64, 64))
eps = resolve_eps(ErrorBound.relative(1e-2), data)
print(f"value range {np.ptp(data):.3f}, eps = {eps:.4g}")

# %% quantize and reconstruct
q = quantize(data, eps)
decomp = dequantize(q)
err = data - decomp
print("max |error| / eps:", np.abs(err).max() / eps)

# %% along one line the error is a sawtooth: it ramps across each cell
# and jumps from about +eps to -eps where the index changes
line = err[:, 16, 16] / eps
idx = q.indices[:, 16, 16]
for x in range(8, 24):
    mark = "|" if idx[x] != idx[x - 1] else " "
    print(f"x={x:2d} q={idx[x]:3d} {mark} err/eps={line[x]:+.2f}")

# %% the quantization boundary and the sign seeded there
art = get_boundary_and_sign_map(q)
print("boundary voxels:", art.boundary.mean().round(3), "of the domain")
signs, counts = np.unique(art.boundary_signs[art.boundary], return_counts=True)
print(dict(zip(signs.tolist(), counts.tolist())))
# sign 0 marks fast-varying voxels where neighbor indices differ by 2 or more

# %% error sign agrees with the seeded sign on most signed boundary voxels
signed = art.boundary & (art.boundary_signs != 0)
agree = np.sign(err[signed]) == art.boundary_signs[signed]
print("sign agreement on signed boundary voxels:", agree.mean().round(3))
