# %% [markdown]
# # Against linear online learners
#
# Mean error over 10 permutations on the three bundled datasets, then a
# paired Wilcoxon test on the per-permutation error rates.

# %%
from rpnb import LinearModel, RpnbConfig, RpnbModel, averaged_eval, load_builtin, wilcoxon_signed_rank

factories = {
    "rpnb": lambda d: RpnbModel(RpnbConfig(k=200), d.p, d.n_classes),
    "perceptron": lambda d: LinearModel(d.p, d.n_classes, "perceptron"),
    "pa": lambda d: LinearModel(d.p, d.n_classes, "pa"),
    "ogd": lambda d: LinearModel(d.p, d.n_classes, "ogd"),
}

results = {}
for name in ("iris", "breast_cancer", "gm"):
    ds = load_builtin(name)
    results[name] = {algo: averaged_eval(f, ds, n_perms=10) for algo, f in factories.items()}
    row = "  ".join(f"{a} {r.error_rate.mean:.3f}" for a, r in results[name].items())
    print(f"{name:>13}: {row}")

# %%
for name, res in results.items():
    a = [r.error_rate for r in res["rpnb"].runs]
    b = [r.error_rate for r in res["pa"].runs]
    test = wilcoxon_signed_rank(a, b)
    print(f"{name:>13}: rpnb vs pa p = {test.p_value:.4f} ({test.method})")
