#include "sfflab/numeric.hpp"

#include <array>

#include "sfflab/error.hpp"

namespace sfflab {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    require(n >= 2, "linspace needs at least two points");
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    require(lo > 0.0 && hi > lo, "logspace needs 0 < lo < hi");
    auto out = linspace(std::log(lo), std::log(hi), n);
    for (auto& v : out) v = std::exp(v);
    out.front() = lo;
    out.back() = hi;
    return out;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "trapezoid: size mismatch");
    CompensatedSum acc;
    for (std::size_t i = 1; i < x.size(); ++i) acc.add(0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]));
    return acc.value();
}

namespace {

GaussLegendre compute_gauss_legendre(int order) {
    GaussLegendre gl;
    gl.nodes.resize(order);
    gl.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = order * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        gl.nodes[i] = -z;
        gl.nodes[order - 1 - i] = z;
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        gl.weights[i] = w;
        gl.weights[order - 1 - i] = w;
    }
    return gl;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
    static const auto table = [] {
        std::array<GaussLegendre, 65> t;
        for (int n = 1; n <= 64; ++n) t[n] = compute_gauss_legendre(n);
        return t;
    }();
    require(order >= 1 && order <= 64, "gauss_legendre: order must be in [1, 64]");
    return table[order];
}

}  // namespace sfflab
