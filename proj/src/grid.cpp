#include "fbma/grid.hpp"

#include "fbma/error.hpp"

#include <cmath>
#include <numbers>

namespace fbma {

void AnnulusSpec::validate() const
{
    if (!(R > 1.0) || !std::isfinite(R)) throw ConfigError("annulus: R must be a finite number > 1");
    if (epsilon != 0.0) throw ConfigError("annulus: only epsilon = 0 is discretized");
    if (n_r < 3) throw ConfigError("annulus: n_r must be >= 3");
    if (n_theta < 4) throw ConfigError("annulus: n_theta must be >= 4");
}

void SlabSpec::validate() const
{
    if (!(R > 1.0) || !std::isfinite(R)) throw ConfigError("slab: R must be a finite number > 1");
    if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("slab: delta must lie in [0, 1)");
    if (n_im < 3) throw ConfigError("slab: n_im must be >= 3");
    if (n_re < 5) throw ConfigError("slab: n_re must be >= 5");
    if (copies < 1) throw ConfigError("slab: copies must be >= 1");
}

Chart Chart::annulus(const AnnulusSpec& spec)
{
    spec.validate();
    Chart c;
    c.kind_ = ChartKind::annulus;
    c.R_ = spec.R;
    c.margin_ = spec.epsilon;
    c.rows_ = spec.n_r;
    c.cols_ = spec.n_theta;
    c.row_origin_ = 0.0;
    c.row_step_ = std::log(spec.R) / (spec.n_r - 1);
    c.col_step_ = 2.0 * std::numbers::pi / spec.n_theta;
    c.col_period_ = spec.n_theta;
    c.cols_per_turn_ = spec.n_theta;
    c.copies_ = 1;
    return c;
}

Chart Chart::slab(const SlabSpec& spec)
{
    spec.validate();
    Chart c;
    c.kind_ = ChartKind::slab;
    c.R_ = spec.R;
    c.margin_ = spec.delta;
    c.rows_ = spec.n_im;
    c.cols_per_turn_ = spec.n_re - 1;
    c.copies_ = spec.copies;
    c.cols_ = spec.copies * c.cols_per_turn_ + 1;
    c.row_origin_ = std::log(1.0 - spec.delta);
    c.row_step_ = (std::log(spec.R + spec.delta) - c.row_origin_) / (spec.n_im - 1);
    c.col_step_ = 2.0 * std::numbers::pi / c.cols_per_turn_;
    c.col_period_ = spec.periodic ? spec.copies * c.cols_per_turn_ : 0;
    return c;
}

std::complex<double> Chart::coordinate(int i, int j) const
{
    const double a = row_coord(i);
    const double b = col_coord(j);
    if (is_annulus()) return std::exp(std::complex<double>(a, b));
    return {b, a};
}

std::vector<std::size_t> Chart::inner_boundary() const
{
    std::vector<std::size_t> out(cols_);
    for (int j = 0; j < cols_; ++j) out[j] = index(0, j);
    return out;
}

std::vector<std::size_t> Chart::outer_boundary() const
{
    std::vector<std::size_t> out(cols_);
    for (int j = 0; j < cols_; ++j) out[j] = index(rows_ - 1, j);
    return out;
}

AnnulusSpec Chart::annulus_spec() const
{
    if (!is_annulus()) throw InputError("chart is not an annulus");
    return {R_, margin_, rows_, cols_};
}

SlabSpec Chart::slab_spec() const
{
    if (is_annulus()) throw InputError("chart is not a slab");
    return {R_, margin_, rows_, cols_per_turn_ + 1, copies_, col_period_ > 0};
}

bool Chart::same_shape(const Chart& other) const
{
    return kind_ == other.kind_ && rows_ == other.rows_ && cols_ == other.cols_ &&
           row_step_ == other.row_step_ && col_step_ == other.col_step_ &&
           row_origin_ == other.row_origin_ && col_origin_ == other.col_origin_;
}

Chart Chart::column_block(int j0, int j1) const
{
    if (is_annulus()) throw InputError("column_block: chart is not a slab");
    if (j0 < 0 || j1 >= cols_ || j1 - j0 < 2) throw InputError("column_block: bad column range");
    Chart c = *this;
    c.cols_ = j1 - j0 + 1;
    c.col_origin_ = col_coord(j0);
    c.col_period_ = 0;
    return c;
}

Chart make_annulus_grid(const AnnulusSpec& spec) { return Chart::annulus(spec); }
Chart make_slab_grid(const SlabSpec& spec) { return Chart::slab(spec); }

}  // namespace fbma
