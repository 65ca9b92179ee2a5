#include "fbma/quadrature.hpp"

#include "fbma/error.hpp"

namespace fbma {

std::vector<double> gregory_weights(int count, double h)
{
    if (count < 2) throw InputError("quadrature: need at least two nodes");
    std::vector<double> w(count, h);
    if (count >= 8) {
        const double end[4] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0, 1.0};
        for (int k = 0; k < 4; ++k) {
            w[k] = end[k] * h;
            w[count - 1 - k] = end[k] * h;
        }
    } else if (count % 2 == 1) {
        for (int k = 0; k < count; ++k) w[k] = (k == 0 || k == count - 1 ? 1.0 : (k % 2 ? 4.0 : 2.0)) * h / 3.0;
    } else {
        w.front() = w.back() = 0.5 * h;
    }
    return w;
}

double integrate_line(std::span<const double> values, double h)
{
    const auto w = gregory_weights(static_cast<int>(values.size()), h);
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) s += w[k] * values[k];
    return s;
}

double integrate_periodic(std::span<const double> values, double h)
{
    double s = 0.0;
    for (double v : values) s += v;
    return s * h;
}

double integrate_chart(const RealField& f)
{
    const Chart& c = f.chart();
    const auto wr = gregory_weights(c.rows(), c.row_step());
    std::vector<double> wc;
    if (c.col_periodic()) {
        wc.assign(c.cols(), 0.0);
        for (int j = 0; j < c.col_period(); ++j) wc[j] = c.col_step();
    } else {
        wc = gregory_weights(c.cols(), c.col_step());
    }
    double s = 0.0;
    for (int i = 0; i < c.rows(); ++i) {
        double row = 0.0;
        for (int j = 0; j < c.cols(); ++j) row += wc[j] * f(i, j);
        s += wr[i] * row;
    }
    return s;
}

}  // namespace fbma
