# %% [markdown]
# # Random projections
#
# A projection matrix maps a p-dimensional vector to q dimensions.  The
# entries are stored unscaled and the 1/sqrt(q) factor is applied when
# projecting, so squared norms are preserved on average.

# %%
import numpy as np

from rpnb import ProjectionScheme, down_dim, generate_matrix, project

p = 1000
q = down_dim(p)
print("p =", p, "-> q =", q)

# %%
for scheme in ProjectionScheme:
    R = generate_matrix(p, q, scheme, seed=0)
    print(f"{scheme.value:>10}: mean {R.entries.mean():+.3f}  var {R.entries.var():.3f}  "
          f"zeros {np.mean(R.entries == 0):.3f}")

# %% [markdown]
# Norm ratio ||z||^2 / ||x||^2 over many independent matrices.

# %%
x = np.random.default_rng(1).normal(size=p)
ratios = [np.sum(project(generate_matrix(p, q, seed=s), x) ** 2) / np.sum(x**2) for s in range(500)]
print(f"mean ratio {np.mean(ratios):.3f}, spread {np.std(ratios):.3f}")
