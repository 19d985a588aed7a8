"""Reference values for the stats tests.

Produces the frozen expectations used by tests/test_stats.cpp and the
acceptance suite. Requires numpy, scipy and statsmodels. Run:

    python3 tests/oracle/stats_reference.py
"""
import numpy as np
import pandas as pd
from scipy import stats
import statsmodels.formula.api as smf
from statsmodels.stats.anova import anova_lm


def two_way(rows):
    df = pd.DataFrame(rows, columns=["case", "model", "group", "value"])
    fit = smf.ols("value ~ C(model) * C(group)", data=df).fit()
    table = anova_lm(fit, typ=2)
    print(table.to_string(float_format=lambda v: f"{v:.17g}"))
    return df, table


def tukey_pooled(df, mse, df_error):
    means = df.groupby("model", sort=False)["value"].mean()
    n = df.groupby("model", sort=False)["value"].size().iloc[0]
    k = len(means)
    se = np.sqrt(mse / n)
    names = list(means.index)
    for i in range(k):
        for j in range(i + 1, k):
            diff = means.iloc[i] - means.iloc[j]
            q = abs(diff) / se
            p = stats.studentized_range.sf(q, k, df_error)
            print(f"{names[i]} {names[j]} diff={diff:.17g} se={se:.17g} q={q:.17g} p={p:.17g}")


print("== 2x2, n=3")
rows = []
vals = {("A", "s"): [1.0, 2.0, 3.0], ("A", "b"): [2.0, 4.0, 3.5],
        ("B", "s"): [4.0, 5.5, 5.0], ("B", "b"): [3.0, 2.5, 4.5]}
for (m, g), vs in vals.items():
    for c, v in enumerate(vs):
        rows.append((f"c{c}", m, g, v))
df, t = two_way(rows)

print("== 3x2, n=4")
vals = {("M1", "surgical"): [0.91, 0.95, 0.93, 0.96],
        ("M1", "btcv"): [0.88, 0.90, 0.85, 0.91],
        ("M2", "surgical"): [0.94, 0.97, 0.95, 0.96],
        ("M2", "btcv"): [0.89, 0.93, 0.90, 0.92],
        ("M3", "surgical"): [0.70, 0.74, 0.69, 0.75],
        ("M3", "btcv"): [0.60, 0.66, 0.58, 0.65]}
rows = []
for (m, g), vs in vals.items():
    for c, v in enumerate(vs):
        rows.append((f"c{c}", m, g, v))
df, t = two_way(rows)
mse = t.loc["Residual", "sum_sq"] / t.loc["Residual", "df"]
print("mse", f"{mse:.17g}", "df", t.loc["Residual", "df"])
tukey_pooled(df, mse, t.loc["Residual", "df"])

print("== one-way tukey, 3 groups n=5 (scipy.stats.tukey_hsd)")
g1 = [24.5, 23.5, 26.4, 27.1, 29.9]
g2 = [28.4, 34.2, 29.5, 32.2, 30.1]
g3 = [26.1, 28.3, 24.3, 26.2, 27.8]
res = stats.tukey_hsd(g1, g2, g3)
print(res.pvalue)
groups = [g1, g2, g3]
n = 5
mse = sum(((np.array(g) - np.mean(g)) ** 2).sum() for g in groups) / (15 - 3)
print("mse", f"{mse:.17g}")
for i in range(3):
    for j in range(i + 1, 3):
        print(i, j, f"{res.pvalue[i, j]:.17g}")

print("== f cdf")
for x, d1, d2 in [(4.96, 1, 10), (1.0, 7, 7), (2.5, 3, 20), (0.3, 6, 174), (12.0, 2, 5), (1e-3, 4, 4)]:
    print(x, d1, d2, f"{stats.f.cdf(x, d1, d2):.17g}")

print("== studentized range cdf")
for q, k, nu in [(3.88, 3, 10), (3.5, 4, 20), (2.0, 7, 58), (5.0, 5, 3), (1.2, 2, 1), (4.17, 7, 406), (0.5, 3, 2)]:
    print(q, k, nu, f"{stats.studentized_range.cdf(q, k, nu):.17g}")
