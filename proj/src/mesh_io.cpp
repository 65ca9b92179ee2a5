#include "fbma/mesh_io.hpp"

#include "fbma/error.hpp"
#include "fbma/field_io.hpp"

#include <fstream>
#include <sstream>

namespace fbma {

namespace {

void write_vec(std::ostream& os, const char* tag, const Vec3& v)
{
    os << tag << ' ' << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
}

}  // namespace

void write_obj(std::ostream& os, const SurfacePatch& patch)
{
    const Chart& c = patch.chart;
    if (patch.positions.size() != c.size()) throw InputError("write_obj: positions do not match the chart");
    const bool with_normals = patch.normals.size() == c.size();
    for (const auto& p : patch.positions) write_vec(os, "v", p);
    if (with_normals) {
        for (const auto& n : patch.normals) write_vec(os, "vn", n);
    }
    const bool wrap = c.is_annulus();
    const int last_col = wrap ? c.cols() : c.cols() - 1;
    auto id = [&](int i, int j) { return c.index(i, j % c.cols()) + 1; };
    auto corner = [&](std::size_t k) {
        os << ' ' << k;
        if (with_normals) os << "//" << k;
    };
    for (int i = 0; i + 1 < c.rows(); ++i) {
        for (int j = 0; j < last_col; ++j) {
            os << 'f';
            // Counterclockwise in the flat coordinate (t, theta) or (Re xi, Im xi).
            if (c.is_annulus()) {
                corner(id(i, j));
                corner(id(i + 1, j));
                corner(id(i + 1, j + 1));
                corner(id(i, j + 1));
            } else {
                corner(id(i, j));
                corner(id(i, j + 1));
                corner(id(i + 1, j + 1));
                corner(id(i + 1, j));
            }
            os << '\n';
        }
    }
}

void write_obj(const std::string& path, const SurfacePatch& patch)
{
    std::ofstream os(path);
    if (!os) throw InputError("cannot open " + path);
    write_obj(os, patch);
}

ObjMesh read_obj(std::istream& is)
{
    ObjMesh mesh;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v" || tag == "vn") {
            Vec3 v;
            if (!(ss >> v.x() >> v.y() >> v.z())) throw InputError("obj: bad vector line '" + line + "'");
            (tag == "v" ? mesh.vertices : mesh.normals).push_back(v);
        } else if (tag == "f") {
            std::vector<int> face;
            std::string corner;
            while (ss >> corner) {
                try {
                    face.push_back(std::stoi(corner.substr(0, corner.find('/'))) - 1);
                } catch (const std::exception&) {
                    throw InputError("obj: bad face corner '" + corner + "'");
                }
            }
            mesh.faces.push_back(std::move(face));
        }
    }
    for (const auto& f : mesh.faces) {
        for (int k : f) {
            if (k < 0 || k >= static_cast<int>(mesh.vertices.size())) throw InputError("obj: face index out of range");
        }
    }
    return mesh;
}

ObjMesh read_obj(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw InputError("cannot open " + path);
    return read_obj(is);
}

void write_patch(const std::string& stem, const SurfacePatch& patch)
{
    write_obj(stem + ".obj", patch);
    RealField lambda(patch.chart, patch.lambda);
    write_csv(stem + "_lambda.csv", lambda);
}

SurfacePatch read_patch(const std::string& obj_path, const std::string& csv_path)
{
    const ObjMesh mesh = read_obj(obj_path);
    const RealField lambda = read_real_csv(csv_path);
    if (mesh.vertices.size() != lambda.size()) throw InputError("read_patch: OBJ vertex count does not match the CSV chart");
    SurfacePatch p;
    p.chart = lambda.chart();
    p.positions = mesh.vertices;
    p.lambda.assign(lambda.values().begin(), lambda.values().end());
    if (mesh.normals.size() == mesh.vertices.size()) {
        p.normals = mesh.normals;
    } else {
        throw InputError("read_patch: OBJ file carries no per-vertex normals");
    }
    return p;
}

}  // namespace fbma
