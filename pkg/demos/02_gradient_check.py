"""Compare backpropagation-through-time against central finite differences."""

import numpy as np

from thermocast.rnn import bptt, finite_difference_grad, forward, init_params, relative_error

rng = np.random.default_rng(0)
for hidden, steps in [(2, 2), (4, 4), (8, 6)]:
    params = init_params(hidden, hidden)
    params.b_h = rng.normal(0, 0.1, hidden)
    x, target = rng.uniform(0, 1, steps), rng.uniform(0, 1, steps)

    analytic = bptt(params, forward(params, x), target)
    numeric = finite_difference_grad(params, x, target, epsilon=1e-5)
    err = relative_error(analytic.to_vector(), numeric.to_vector()).max()
    print(f"H={hidden} T={steps}: {analytic.to_vector().size} parameters, "
          f"max relative error {err:.2e}")

# a single step has no recurrent path, so the w_hh gradient vanishes
params = init_params(1, 4)
g = bptt(params, forward(params, [0.3]), [0.9])
print("T=1 w_hh gradient is zero:", not g.w_hh.any())
