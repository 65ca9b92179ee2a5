#include "fbma/field_io.hpp"

#include "fbma/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace fbma {

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

template <class T, class Emit>
void write_rows(std::ostream& os, const GridField<T>& f, const std::string& value_header, Emit emit)
{
    const Chart& c = f.chart();
    os << c.row_name() << ',' << c.col_name() << ',' << value_header << '\n';
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = 0; j < c.cols(); ++j) {
            os << format_double(c.row_coord(i)) << ',' << format_double(c.col_coord(j)) << ',';
            emit(f(i, j));
            os << '\n';
        }
    }
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        out.push_back(cell);
    }
    return out;
}

struct Table {
    bool annulus = true;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& is, std::size_t value_columns)
{
    Table t;
    std::string line;
    if (!std::getline(is, line)) throw InputError("csv: empty input");
    t.header = split(line);
    if (t.header.size() != 2 + value_columns) throw InputError("csv: unexpected header '" + line + "'");
    if (t.header[0] == "t" && t.header[1] == "theta") {
        t.annulus = true;
    } else if (t.header[0] == "im_xi" && t.header[1] == "re_xi") {
        t.annulus = false;
    } else {
        throw InputError("csv: unknown coordinate columns in '" + line + "'");
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size()) throw InputError("csv: ragged row '" + line + "'");
        std::vector<double> row;
        for (const auto& c : cells) {
            try {
                row.push_back(std::stod(c));
            } catch (const std::exception&) {
                throw InputError("csv: bad number '" + c + "'");
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (t.rows.empty()) throw InputError("csv: no data rows");
    return t;
}

Chart chart_from_table(const Table& t)
{
    // Row-major: the column coordinate restarts when the row coordinate advances.
    int cols = 1;
    while (cols < static_cast<int>(t.rows.size()) && t.rows[cols][0] == t.rows[0][0]) ++cols;
    if (t.rows.size() % cols != 0) throw InputError("csv: node count is not rows x cols");
    const int rows = static_cast<int>(t.rows.size()) / cols;
    const double row_max = t.rows.back()[0];
    if (t.annulus) {
        AnnulusSpec spec{std::exp(row_max), 0.0, rows, cols};
        return Chart::annulus(spec);
    }
    const double col_max = t.rows[cols - 1][1];
    const int copies = std::max(1, static_cast<int>(std::lround(col_max / (2.0 * std::numbers::pi))));
    const double row_min = t.rows.front()[0];
    SlabSpec spec;
    spec.delta = 1.0 - std::exp(row_min);
    spec.R = std::exp(row_max) - spec.delta;
    spec.n_im = rows;
    spec.copies = copies;
    spec.n_re = (cols - 1) / copies + 1;
    return Chart::slab(spec);
}

void check_coordinates(const Chart& c, const Table& t)
{
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = 0; j < c.cols(); ++j) {
            const auto& r = t.rows[c.index(i, j)];
            if (std::abs(r[0] - c.row_coord(i)) > 1e-9 * (1.0 + std::abs(r[0])) ||
                std::abs(r[1] - c.col_coord(j)) > 1e-9 * (1.0 + std::abs(r[1]))) {
                throw InputError("csv: coordinates are not a uniform chart grid");
            }
        }
    }
}

}  // namespace

void write_csv(std::ostream& os, const RealField& f)
{
    write_rows(os, f, "value", [&](double v) { os << format_double(v); });
}

void write_csv(std::ostream& os, const ComplexField& f)
{
    write_rows(os, f, "re,im", [&](const Complex& v) { os << format_double(v.real()) << ',' << format_double(v.imag()); });
}

void write_csv(const std::string& path, const RealField& f)
{
    std::ofstream os(path);
    if (!os) throw InputError("cannot open " + path);
    write_csv(os, f);
}

void write_csv(const std::string& path, const ComplexField& f)
{
    std::ofstream os(path);
    if (!os) throw InputError("cannot open " + path);
    write_csv(os, f);
}

RealField read_real_csv(std::istream& is)
{
    const Table t = read_table(is, 1);
    const Chart c = chart_from_table(t);
    check_coordinates(c, t);
    RealField f(c);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = t.rows[k][2];
    return f;
}

ComplexField read_complex_csv(std::istream& is)
{
    const Table t = read_table(is, 2);
    const Chart c = chart_from_table(t);
    check_coordinates(c, t);
    ComplexField f(c);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = {t.rows[k][2], t.rows[k][3]};
    return f;
}

RealField read_real_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw InputError("cannot open " + path);
    return read_real_csv(is);
}

ComplexField read_complex_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw InputError("cannot open " + path);
    return read_complex_csv(is);
}

}  // namespace fbma
