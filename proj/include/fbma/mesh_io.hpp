#pragma once

#include "fbma/weierstrass.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fbma {

// Wavefront OBJ: `v x y z` and `vn x y z` per node (17 significant digits),
// one quad face per grid cell, wound so that the face normal agrees with the
// stored normals. Annulus charts close up in theta.

void write_obj(std::ostream& os, const SurfacePatch& patch);
void write_obj(const std::string& path, const SurfacePatch& patch);

struct ObjMesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> normals;
    std::vector<std::vector<int>> faces;  // zero-based vertex indices
};

ObjMesh read_obj(std::istream& is);
ObjMesh read_obj(const std::string& path);

/// Writes `<stem>.obj` and `<stem>_lambda.csv` (the metric factor on the chart).
void write_patch(const std::string& stem, const SurfacePatch& patch);

/// Rebuilds a patch from an OBJ file and a real CSV field on its chart. The
/// CSV supplies the chart and lambda; vertex count must match the node count.
SurfacePatch read_patch(const std::string& obj_path, const std::string& csv_path);

}  // namespace fbma
