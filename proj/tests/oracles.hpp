#pragma once

// Independent reference computations used to check the library. They follow
// the textbook definitions as literally as possible and ignore performance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "echoq/grid.hpp"

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x, double mean, double std)
{
    const double z = (x - mean) / std;
    return std::exp(-0.5 * z * z) / (std * std::sqrt(2.0 * std::numbers::pi));
}

/// Gaussian quantile by bisection on the erfc-based CDF.
inline double normal_quantile(double p, double mean, double std)
{
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return mean + std * 0.5 * (lo + hi);
}

/// 1 - integral of min(pdf1, pdf2), by Simpson's rule on a wide interval.
inline double gaussian_gcnr(double m1, double s1, double m2, double s2)
{
    const double lo = std::min(m1 - 12 * s1, m2 - 12 * s2);
    const double hi = std::max(m1 + 12 * s1, m2 + 12 * s2);
    const int n = 200000;
    const double h = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + i * h;
        const double f = std::min(normal_pdf(x, m1, s1), normal_pdf(x, m2, s2));
        sum += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return 1.0 - sum * h / 3.0;
}

/// Overlap oracle on raw bin counts.
inline double gcnr(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b)
{
    double ta = 0.0, tb = 0.0;
    for (auto v : a) ta += static_cast<double>(v);
    for (auto v : b) tb += static_cast<double>(v);
    double overlap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        overlap += std::min(static_cast<double>(a[i]) / ta, static_cast<double>(b[i]) / tb);
    return 1.0 - overlap;
}

/// rank(x_i) = 1 + #{x_j < x_i} + (#{x_j == x_i} - 1) / 2
inline std::vector<double> ranks(const std::vector<double>& x)
{
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0.0, equal = 0.0;
        for (double v : x) {
            less += v < x[i];
            equal += v == x[i];
        }
        r[i] = 1.0 + less + (equal - 1.0) / 2.0;
    }
    return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y)
{
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    return pearson(ranks(x), ranks(y));
}

/// Normal equations [n Sx; Sx Sxx][b; a] = [Sy; Sxy] solved by Cramer's rule.
inline std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y)
{
    long double n = x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        sxy += static_cast<long double>(x[i]) * y[i];
    }
    const long double det = n * sxx - sx * sx;
    const long double slope = (n * sxy - sx * sy) / det;
    const long double intercept = (sy * sxx - sx * sxy) / det;
    return {static_cast<double>(slope), static_cast<double>(intercept)};
}

/// Two-sided exact signed-rank p-value by enumerating all 2^n sign patterns:
/// the fraction of patterns whose min(W+, W-) is at most the observed one.
inline double wilcoxon_enumerated(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) d.push_back(a[i] - b[i]);
    std::vector<double> mag(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
    const auto r = ranks(mag);
    double wp = 0.0, total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        total += r[i];
        if (d[i] > 0) wp += r[i];
    }
    const double observed = std::min(wp, total - wp);
    const std::uint64_t patterns = 1ULL << d.size();
    std::uint64_t hits = 0;
    for (std::uint64_t m = 0; m < patterns; ++m) {
        double w = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (m >> i & 1ULL) w += r[i];
        if (std::min(w, total - w) <= observed + 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(patterns);
}

/// SSIM by explicit 11x11 windows at every pixel with mirrored indices.
inline double ssim(const echoq::Grid<double>& x, const echoq::Grid<double>& y)
{
    const int w = x.width(), h = x.height();
    double k[11], ks = 0.0;
    for (int i = 0; i < 11; ++i) {
        k[i] = std::exp(-((i - 5.0) * (i - 5.0)) / (2.0 * 1.5 * 1.5));
        ks += k[i];
    }
    auto mirror = [](int i, int n) {
        while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
        return i;
    };
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = -5; i <= 5; ++i) {
                for (int j = -5; j <= 5; ++j) {
                    const double wt = k[i + 5] * k[j + 5] / (ks * ks);
                    const double a = x(mirror(r + i, h), mirror(c + j, w));
                    const double b = y(mirror(r + i, h), mirror(c + j, w));
                    mx += wt * a;
                    my += wt * b;
                    sxx += wt * a * a;
                    syy += wt * b * b;
                    sxy += wt * a * b;
                }
            }
            const double vx = sxx - mx * mx, vy = syy - my * my, cov = sxy - mx * my;
            total += (2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
    }
    return total / (w * h);
}

} // namespace oracle

namespace gen {

// Hand-rolled generators for property tests (independent of the library RNG).
using Engine = std::mt19937_64;

inline std::vector<double> reals(Engine& e, std::size_t n, double lo, double hi)
{
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = d(e);
    return out;
}

/// Integers in [lo, hi] as doubles, so ties are frequent.
inline std::vector<double> tied(Engine& e, std::size_t n, int lo, int hi)
{
    std::uniform_int_distribution<int> d(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = d(e);
    return out;
}

inline echoq::Grid<double> image(Engine& e, int w, int h, double lo, double hi, bool integral)
{
    echoq::Grid<double> g(w, h);
    std::uniform_real_distribution<double> d(lo, hi);
    for (auto& v : g.values()) v = integral ? std::floor(d(e)) : d(e);
    return g;
}

} // namespace gen
