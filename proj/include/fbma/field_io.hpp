#pragma once

#include "fbma/field.hpp"

#include <iosfwd>
#include <string>

namespace fbma {

// CSV layout: header `t,theta,value` (real) or `t,theta,re,im` (complex) on
// annulus charts, `im_xi,re_xi,...` on slab charts; one row per node in
// row-major order; 17 significant digits.

void write_csv(std::ostream& os, const RealField& f);
void write_csv(std::ostream& os, const ComplexField& f);
void write_csv(const std::string& path, const RealField& f);
void write_csv(const std::string& path, const ComplexField& f);

/// Reads a real field and reconstructs its chart from the coordinate columns.
RealField read_real_csv(std::istream& is);
RealField read_real_csv(const std::string& path);
ComplexField read_complex_csv(std::istream& is);
ComplexField read_complex_csv(const std::string& path);

/// "%.17g" formatting shared by every text exporter.
std::string format_double(double x);

}  // namespace fbma
