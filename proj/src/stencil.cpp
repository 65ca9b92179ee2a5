#include "fbma/stencil.hpp"

#include "fbma/error.hpp"

#include <algorithm>
#include <string>

namespace fbma {

std::vector<double> fornberg_weights(double x0, std::span<const double> nodes, int deriv)
{
    const int n = static_cast<int>(nodes.size());
    if (n == 0 || deriv < 0 || deriv >= n) {
        throw ConfigError("fornberg_weights: need more nodes than the derivative order");
    }
    // c[j][k]: weight of node j for derivative k.
    std::vector<std::vector<double>> c(n, std::vector<double>(deriv + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, deriv);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) w[j] = c[j][deriv];
    return w;
}

namespace {

std::vector<double> scaled_weights(int first, int width, int at, int deriv, double h)
{
    std::vector<double> nodes(width);
    for (int m = 0; m < width; ++m) nodes[m] = static_cast<double>(first + m);
    auto w = fornberg_weights(static_cast<double>(at), nodes, deriv);
    double scale = 1.0;
    for (int d = 0; d < deriv; ++d) scale *= h;
    for (double& x : w) x /= scale;
    return w;
}

}  // namespace

Stencil1D::Stencil1D(int count, double h, int deriv, int order, int period)
    : count_(count), deriv_(deriv), order_(order), period_(period)
{
    if (deriv < 1 || deriv > 2) throw ConfigError("Stencil1D: derivative order must be 1 or 2");
    if (order < 2 || order % 2 != 0) throw ConfigError("Stencil1D: accuracy order must be even and >= 2");
    const int half = order / 2;
    const int centered_width = order + 1;
    const int one_sided_width = order + deriv;
    if (period > 0) {
        if (period < centered_width) throw ConfigError("Stencil1D: period shorter than stencil");
    } else if (count < one_sided_width) {
        throw ConfigError("Stencil1D: line has " + std::to_string(count) + " nodes, stencil needs " +
                          std::to_string(one_sided_width));
    }

    interior_.offset = -half;
    interior_.weights = scaled_weights(-half, centered_width, 0, deriv, h);

    if (period > 0) return;
    for (int k = 0; k < half; ++k) {
        Entry e;
        e.offset = -k;
        e.weights = scaled_weights(0, one_sided_width, k, deriv, h);
        left_.push_back(std::move(e));
    }
    for (int k = 0; k < half; ++k) {
        // Node count-1-k, window ending at count-1.
        Entry e;
        e.offset = k - (one_sided_width - 1);
        e.weights = scaled_weights(-(one_sided_width - 1), one_sided_width, -k, deriv, h);
        right_.push_back(std::move(e));
    }
}

std::vector<Stencil1D::Tap> Stencil1D::taps(int k) const
{
    const Entry& e = entry(k);
    std::vector<Tap> out;
    out.reserve(e.weights.size());
    for (std::size_t m = 0; m < e.weights.size(); ++m) {
        int idx = k + e.offset + static_cast<int>(m);
        if (period_ > 0) idx = wrap(idx);
        out.push_back({idx, e.weights[m]});
    }
    return out;
}

}  // namespace fbma
