# %% [markdown]
# # The ensemble on Iris
#
# Test-then-train over one shuffled pass.  The model only changes when it
# gets an observation wrong.

# %%
from rpnb import RpnbConfig, RpnbModel, load_builtin, permutation, prequential_run

iris = load_builtin("iris")
print(iris.n, "rows,", iris.p, "features,", iris.label_names)

model = RpnbModel(RpnbConfig(k=200), iris.p, iris.n_classes)
run = prequential_run(model, iris, permutation(iris.n, 0))
print(f"error {run.error_rate:.3f}  macro-F1 {run.macro_f1:.3f}  updates {run.update_count}")

# %% [markdown]
# Majority vote instead of summing log posteriors, and mini-batches of 10.

# %%
for cfg in (RpnbConfig(k=200, combiner="vote"), RpnbConfig(k=200, mode="minibatch", batch_size=10)):
    run = prequential_run(RpnbModel(cfg, iris.p, iris.n_classes), iris, permutation(iris.n, 0))
    print(f"{cfg.combiner.value:>4} {cfg.mode.value:>9}: error {run.error_rate:.3f}, updates {run.update_count}")
