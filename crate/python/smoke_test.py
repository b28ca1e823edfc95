"""Smoke test for the `sqgt` extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`.
"""

import sqgt

th = sqgt.Thresholds([0, 2, 5, 6, 10, 13, 15, 16, 18, 21])
seq = sqgt.greedy_generate(th, 3, 3, "sqlo-s")
assert seq.values == [2, 5, 11], seq
assert sqgt.check_sequence([2, 5, 11], th, 3, "sqlo-s") == (True, None)
assert seq.solve(3, 13) == [0, 2]

step3 = sqgt.Thresholds.uniform(3, 15)
code = sqgt.Code.build(sqgt.BaseCode.identity(2), sqgt.Sequence([3, 6, 12], "sqlo-s", 3, step3), 2)
assert code.decode([3, 0]) == [0, 2]
assert code.syndrome([1, 4]) == code.inject(code.syndrome([1, 4]))
assert code.verify_separable()
summary = code.simulate()
assert summary["cases"] == 21 and summary["failures"] == 0, summary

wide = sqgt.Thresholds([0, 2, 5, 6, 10, 13, 15, 16, 18, 21, 25, 28, 30, 34, 37, 40])
ks = sqgt.BaseCode.kautz_singleton(5, 2, 2)
assert (ks.d, ks.e) == (2, 1)
code = sqgt.Code.build(ks, sqgt.Sequence([2, 5], "sqlo-s", 2, wide), 2)
noisy = code.inject(code.syndrome([3, 40]), changes=[(0, 7)])
assert code.decode(noisy) == [3, 40]

try:
    code.decode([14] * code.m)
except sqgt.DecodingFailure:
    pass
else:
    raise AssertionError("expected a decoding failure")

assert abs(sqgt.gamma_bound(2) - (1 + 5 ** 0.5) / 2) < 1e-9
report = sqgt.feasibility(1000, 10, 1, 1, 2, sqgt.Thresholds.uniform(1, 4))
assert abs(report["counting_bound"] - 33.2) < 0.1
again = sqgt.Code.from_parts(code.matrix_text(), code.sidecar_json())
assert again.rows() == code.rows()
print("smoke test passed")
