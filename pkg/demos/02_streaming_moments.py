# %% [markdown]
# # Streaming class statistics
#
# Each Gaussian Naive Bayes base keeps a running mean and population
# variance per class and coordinate.  Merging a batch gives the same
# numbers as recomputing over everything seen so far.

# %%
import numpy as np

from rpnb import GnbModel
from rpnb.gnb import merge_moments

rng = np.random.default_rng(0)
column = rng.normal(5.0, 2.0, size=(1000, 1))

mu, s2, count = np.zeros(1), np.ones(1), 0
for chunk in np.array_split(column, [3, 10, 400, 401]):
    mu, s2 = merge_moments(mu, s2, count, chunk)
    count += len(chunk)
print("streamed :", mu[0], s2[0])
print("from data:", column.mean(), column.var())

# %% [markdown]
# The same update through the model API, one observation at a time.

# %%
model = GnbModel(n_classes=2, dim=1)
for value in column:
    model.update_one(0, value)
print(model.mu[0], model.sigma2[0], model.class_counts)
print(model.log_posteriors(np.array([5.0])))
