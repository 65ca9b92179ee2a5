#pragma once

#include "fbma/grid.hpp"

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace fbma {

using Complex = std::complex<double>;

/// Sampled function on a chart, one value per node (row-major).
template <class T>
class GridField {
public:
    GridField() = default;
    explicit GridField(Chart chart, T fill = T{}) : chart_(std::move(chart)), values_(chart_.size(), fill) {}
    GridField(Chart chart, std::vector<T> values);

    /// Samples f(i, j) at every node.
    static GridField generate(const Chart& chart, const std::function<T(int, int)>& f);

    const Chart& chart() const { return chart_; }
    std::size_t size() const { return values_.size(); }

    T& operator()(int i, int j) { return values_[chart_.index(i, j)]; }
    const T& operator()(int i, int j) const { return values_[chart_.index(i, j)]; }
    T& operator[](std::size_t k) { return values_[k]; }
    const T& operator[](std::size_t k) const { return values_[k]; }

    std::span<T> values() { return values_; }
    std::span<const T> values() const { return values_; }

private:
    Chart chart_;
    std::vector<T> values_;
};

using RealField = GridField<double>;
using ComplexField = GridField<Complex>;

/// Samples a function of the native complex coordinate (z on the annulus, xi on the slab).
ComplexField sample(const Chart& chart, const std::function<Complex(Complex)>& f);
RealField sample_real(const Chart& chart, const std::function<double(double row, double col)>& f);

// Partial derivatives along the chart axes. `order` is the formal accuracy
// (2 by default; 4 is used where the downstream tolerance needs it). Columns
// wrap on periodic charts; rows always use one-sided closures at the edges.
template <class T>
GridField<T> d_row(const GridField<T>& f, int order = 2);
template <class T>
GridField<T> d_col(const GridField<T>& f, int order = 2);
template <class T>
GridField<T> d_row2(const GridField<T>& f, int order = 2);
template <class T>
GridField<T> d_col2(const GridField<T>& f, int order = 2);

/// Wirtinger derivatives with respect to the chart's native coordinate.
/// On the annulus the chain rule z = exp(t + i theta) is applied.
ComplexField d_dz(const ComplexField& f, int order = 2);
ComplexField d_dzbar(const ComplexField& f, int order = 2);

/// Wirtinger derivatives in the flat chart coordinate (zeta = t + i theta on
/// the annulus, xi on the slab), without the chain-rule factor.
ComplexField d_dzeta(const ComplexField& f, int order = 2);
ComplexField d_dzetabar(const ComplexField& f, int order = 2);

/// v_tt + v_thetatheta (annulus) or v_xx + v_yy (slab). The flat-plane
/// Laplacian on the annulus is exp(-2t) times this.
RealField laplacian(const RealField& v, int order = 2);
RealField plane_laplacian(const RealField& v, int order = 2);

ComplexField to_complex(const RealField& f);
RealField real_part(const ComplexField& f);
RealField imag_part(const ComplexField& f);

double max_abs(std::span<const double> values);
double max_abs(std::span<const Complex> values);

/// Max-norm over rows [margin, rows - margin).
double max_abs_interior(const ComplexField& f, int margin);
double max_abs_interior(const RealField& f, int margin);

}  // namespace fbma
