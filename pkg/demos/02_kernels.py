"""Compare the aggregation kernels, the learned MLP, and its lookup table.

Run: python3 demos/02_kernels.py
"""
import numpy as np

import evtgrid as eg

u = np.linspace(-3, 1.5, 10)
print("offset u:", np.round(u, 2))
print("trilinear:", np.round(eg.eval_trilinear(u), 3))
print("delta:    ", np.round(eg.eval_delta(u), 3))
print("exp t=1:  ", np.round(eg.eval_exponential(u, 1.0), 3))
print("alpha t=1:", np.round(eg.eval_alpha(u, 1.0), 3))

# The packaged learned kernel reproduces the trilinear hat exactly; it is
# the initialization point for end-to-end training.
weights = eg.default_mlp_weights()
probe = np.linspace(-8, 8, 10_001)
err = np.abs(eg.mlp_forward(weights, probe) - eg.eval_trilinear(probe)).max()
print(f"\nMLP vs trilinear, max abs error over [-8, 8]: {err:.2e}")

# At inference time the MLP can be swapped for an interpolated table.
table = eg.build_lookup(eg.Mlp(weights=weights), -10, 10, 1001)
err = np.abs(eg.lookup_eval(table, probe)
             - eg.mlp_forward(weights, probe)).max()
print(f"lookup table vs MLP, max abs error:          {err:.2e}")
