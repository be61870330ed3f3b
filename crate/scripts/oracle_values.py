"""Prints frozen reference values used by the Rust test suites.

t-test: scipy.stats.ttest_rel (two-sided) on fixed vector pairs.
SSIM: skimage structural_similarity on a 32x32 pair from a 64-bit LCG.
"""
import numpy as np
from scipy import stats
from skimage.metrics import structural_similarity

M64 = (1 << 64) - 1


class Lcg:
    def __init__(self, seed):
        self.state = seed & M64

    def next_f64(self):
        self.state = (self.state * 6364136223846793005 + 1442695040888963407) & M64
        return (self.state >> 11) / float(1 << 53)


PAIRS = [
    ([1.2, 3.4, 2.2, 5.1, 4.4, 3.3, 2.9, 4.0, 3.8, 2.5],
     [1.0, 3.1, 2.5, 4.6, 4.0, 3.4, 2.2, 3.5, 3.9, 2.0]),
    ([10.0, 11.5, 9.8, 12.1, 10.7],
     [10.4, 11.9, 10.5, 12.0, 11.3]),
    ([0.31, 0.27, 0.45, 0.38],
     [0.30, 0.29, 0.41, 0.33]),
    ([25.1, 26.3, 24.8, 27.0, 25.5, 26.1, 24.9, 25.7, 26.4, 25.0, 26.8, 25.3],
     [25.0, 26.4, 24.6, 26.7, 25.6, 25.8, 24.9, 25.4, 26.0, 25.1, 26.5, 25.0]),
    ([1.0, 2.0, 3.0],
     [1.5, 2.1, 4.2]),
]


def lcg_pair(seed, n):
    g = Lcg(seed)
    a = np.array([g.next_f64() for _ in range(n * n)]).reshape(n, n)
    c = np.array([g.next_f64() for _ in range(n * n)]).reshape(n, n)
    b = 0.8 * a + 0.2 * c
    return a, b


if __name__ == "__main__":
    for xs, ys in PAIRS:
        r = stats.ttest_rel(xs, ys)
        print(f"t={r.statistic!r} p={r.pvalue!r}")
    a, b = lcg_pair(42, 32)
    s = structural_similarity(a, b, gaussian_weights=True, sigma=1.5,
                              use_sample_covariance=False, data_range=1.0)
    print(f"ssim={s!r}")
