#pragma once

#include "fbma/curvelab.hpp"
#include "fbma/diagnostics.hpp"
#include "fbma/liouville.hpp"
#include "fbma/rebuild.hpp"

#include <json.hpp>
#include <string>

namespace fbma {

using Json = nlohmann::ordered_json;

Json to_json(const Vec3& v);
Json to_json(const RigidMotion& T);
Json to_json(const LiouvilleProblem& p);
Json to_json(const LiouvilleSolution& s);  // summary only, no field values
Json to_json(const AreaCheck& a);
Json to_json(const SphereCertificate& c);
Json to_json(const SphereFinding& f);
Json to_json(const FundamentalDecomposition& d);  // piece mesh omitted
Json to_json(const FluxReport& r);
Json to_json(const FrameField& f);                // diagnostics only
Json to_json(const PatchResiduals& r);
Json to_json(const HopfData& h);                  // summary only
Json to_json(const InjectivityReport& r);         // summary; points via write_winding_csv
Json to_json(const GaussMapKappa& r);            // summary; nodes via write_kappa_csv

/// Two-space indented JSON with a trailing newline; identical input gives identical bytes.
void write_json(const std::string& path, const Json& j);

void write_winding_csv(const std::string& path, const InjectivityReport& r);
void write_kappa_csv(const std::string& path, const GaussMapKappa& r);

}  // namespace fbma
