#pragma once
#include <cmath>
#include <cstddef>
#include <vector>

namespace lab {

// pairwise reduction over a fixed index order: bit-identical for any worker count
inline double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

struct MeanErr {
    double mean = 0, stderr_ = 0;
    std::size_t count = 0;
};

// mean and standard error from per-sample values, deterministic reduction
inline MeanErr mean_stderr(const std::vector<double>& x) {
    MeanErr r;
    r.count = x.size();
    if (x.empty()) return r;
    double s = pairwise_sum(x);
    r.mean = s / (double)x.size();
    if (x.size() < 2) return r;
    std::vector<double> d2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - r.mean;
        d2[i] = d * d;
    }
    double var = pairwise_sum(d2) / (double)(x.size() - 1);
    r.stderr_ = std::sqrt(var / (double)x.size());
    return r;
}

// Kahan accumulator for long in-path running sums
struct Kahan {
    double s = 0, c = 0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

} // namespace lab
