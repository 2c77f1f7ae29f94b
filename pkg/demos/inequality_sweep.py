"""
Randomized inequality sweeps
============================

Every suite draws reproducible trials from ``seed + i`` and reports the
worst lhs/rhs ratio, with a witness for the extremal trial.
"""

from gevrey_ns.inequalities import SUITES, run_suite, smoothing_exponents, smoothing_fixture
from gevrey_ns.params import GevreyParams

for name in SUITES:
    s = run_suite(name, 8, 200, seed=0)
    extra = s.as_dict().get("empirical_constant")
    print(f"{name:18s} max ratio {s.max_ratio:.6f}  {'pass' if s.passed else 'FAIL'}"
          + (f"  empirical constant {extra:.4f}" if extra is not None else ""))

# T-scaling of the Duhamel operator on a heat-dominated fixture (about 10 s at N=128)
fit = smoothing_exponents(smoothing_fixture(128, seed=0), GevreyParams(a=0.01, sigma=1.5, nu=0.2))
print(f"fitted exponents: Hdot^1_(a,sigma) {fit['h1_exponent']:.3f}, L2 {fit['l2_exponent']:.3f}")
