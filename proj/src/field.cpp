#include "fbma/field.hpp"

#include "fbma/error.hpp"
#include "fbma/stencil.hpp"

#include <algorithm>
#include <cmath>

namespace fbma {

template <class T>
GridField<T>::GridField(Chart chart, std::vector<T> values) : chart_(std::move(chart)), values_(std::move(values))
{
    if (values_.size() != chart_.size()) throw InputError("field: value count does not match chart");
}

template <class T>
GridField<T> GridField<T>::generate(const Chart& chart, const std::function<T(int, int)>& f)
{
    GridField<T> out(chart);
    for (int i = 0; i < chart.rows(); ++i) {
        for (int j = 0; j < chart.cols(); ++j) out(i, j) = f(i, j);
    }
    return out;
}

template class GridField<double>;
template class GridField<Complex>;

ComplexField sample(const Chart& chart, const std::function<Complex(Complex)>& f)
{
    return ComplexField::generate(chart, [&](int i, int j) { return f(chart.coordinate(i, j)); });
}

RealField sample_real(const Chart& chart, const std::function<double(double, double)>& f)
{
    return RealField::generate(chart, [&](int i, int j) { return f(chart.row_coord(i), chart.col_coord(j)); });
}

namespace {

template <class T>
GridField<T> along_rows(const GridField<T>& f, int deriv, int order)
{
    const Chart& c = f.chart();
    Stencil1D st(c.rows(), c.row_step(), deriv, order);
    GridField<T> out(c);
    const auto stride = static_cast<std::ptrdiff_t>(c.cols());
    for (int j = 0; j < c.cols(); ++j) {
        st.apply(&f(0, j), stride, &out(0, j), stride);
    }
    return out;
}

template <class T>
GridField<T> along_cols(const GridField<T>& f, int deriv, int order)
{
    const Chart& c = f.chart();
    Stencil1D st(c.cols(), c.col_step(), deriv, order, c.col_period());
    GridField<T> out(c);
    for (int i = 0; i < c.rows(); ++i) {
        st.apply(&f(i, 0), 1, &out(i, 0), 1);
    }
    return out;
}

}  // namespace

template <class T>
GridField<T> d_row(const GridField<T>& f, int order)
{
    return along_rows(f, 1, order);
}
template <class T>
GridField<T> d_col(const GridField<T>& f, int order)
{
    return along_cols(f, 1, order);
}
template <class T>
GridField<T> d_row2(const GridField<T>& f, int order)
{
    return along_rows(f, 2, order);
}
template <class T>
GridField<T> d_col2(const GridField<T>& f, int order)
{
    return along_cols(f, 2, order);
}

template GridField<double> d_row(const GridField<double>&, int);
template GridField<double> d_col(const GridField<double>&, int);
template GridField<double> d_row2(const GridField<double>&, int);
template GridField<double> d_col2(const GridField<double>&, int);
template GridField<Complex> d_row(const GridField<Complex>&, int);
template GridField<Complex> d_col(const GridField<Complex>&, int);
template GridField<Complex> d_row2(const GridField<Complex>&, int);
template GridField<Complex> d_col2(const GridField<Complex>&, int);

namespace {

// Flat chart coordinate w = x + i y with x the "real" axis:
// annulus zeta = t + i theta (x = row, y = col); slab xi = Re + i Im (x = col, y = row).
ComplexField flat_wirtinger(const ComplexField& f, int order, bool conjugate)
{
    const Chart& c = f.chart();
    const ComplexField fr = d_row(f, order);
    const ComplexField fc = d_col(f, order);
    const Complex I(0.0, 1.0);
    const double s = conjugate ? 1.0 : -1.0;
    ComplexField out(c);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Complex fx = c.is_annulus() ? fr[k] : fc[k];
        const Complex fy = c.is_annulus() ? fc[k] : fr[k];
        out[k] = 0.5 * (fx + s * I * fy);
    }
    return out;
}

}  // namespace

ComplexField d_dzeta(const ComplexField& f, int order) { return flat_wirtinger(f, order, false); }
ComplexField d_dzetabar(const ComplexField& f, int order) { return flat_wirtinger(f, order, true); }

ComplexField d_dz(const ComplexField& f, int order)
{
    ComplexField out = d_dzeta(f, order);
    const Chart& c = f.chart();
    if (c.is_annulus()) {
        for (int i = 0; i < c.rows(); ++i) {
            for (int j = 0; j < c.cols(); ++j) out(i, j) /= c.coordinate(i, j);
        }
    }
    return out;
}

ComplexField d_dzbar(const ComplexField& f, int order)
{
    ComplexField out = d_dzetabar(f, order);
    const Chart& c = f.chart();
    if (c.is_annulus()) {
        for (int i = 0; i < c.rows(); ++i) {
            for (int j = 0; j < c.cols(); ++j) out(i, j) /= std::conj(c.coordinate(i, j));
        }
    }
    return out;
}

RealField laplacian(const RealField& v, int order)
{
    RealField a = d_row2(v, order);
    const RealField b = d_col2(v, order);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
    return a;
}

RealField plane_laplacian(const RealField& v, int order)
{
    RealField out = laplacian(v, order);
    const Chart& c = v.chart();
    if (c.is_annulus()) {
        for (int i = 0; i < c.rows(); ++i) {
            const double w = std::exp(-2.0 * c.row_coord(i));
            for (int j = 0; j < c.cols(); ++j) out(i, j) *= w;
        }
    }
    return out;
}

ComplexField to_complex(const RealField& f)
{
    ComplexField out(f.chart());
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k];
    return out;
}

RealField real_part(const ComplexField& f)
{
    RealField out(f.chart());
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k].real();
    return out;
}

RealField imag_part(const ComplexField& f)
{
    RealField out(f.chart());
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k].imag();
    return out;
}

double max_abs(std::span<const double> values)
{
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
}

double max_abs(std::span<const Complex> values)
{
    double m = 0.0;
    for (const Complex& x : values) m = std::max(m, std::abs(x));
    return m;
}

namespace {

template <class T>
double interior_max(const GridField<T>& f, int margin)
{
    const Chart& c = f.chart();
    double m = 0.0;
    for (int i = margin; i < c.rows() - margin; ++i) {
        for (int j = 0; j < c.cols(); ++j) m = std::max(m, std::abs(f(i, j)));
    }
    return m;
}

}  // namespace

double max_abs_interior(const ComplexField& f, int margin) { return interior_max(f, margin); }
double max_abs_interior(const RealField& f, int margin) { return interior_max(f, margin); }

}  // namespace fbma
