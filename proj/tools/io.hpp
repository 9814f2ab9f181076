#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcktk/conformal.hpp"
#include "lcktk/psh.hpp"

namespace lcktk::io {

using json = nlohmann::json;

/// File contents plus its FNV-1a digest.
struct Loaded {
  std::filesystem::path path;
  json doc;
  std::string digest;
};

/// Reads and parses a JSON file. Throws InvalidInput naming the file and
/// byte offset on syntax errors.
Loaded load(const std::filesystem::path& path);
std::string fnv1a_hex(const std::string& bytes);

ComplexPtr complex_from_json(const json& j);
json complex_to_json(const SimplicialComplex& k);
/// "star", or {"charts": [...]} where a chart is a vertex list (induced),
/// {"star": v}, or {"vertices": [...], "edges": [[u, v], ...], "triangles": [...]}.
Cover cover_from_json(const ComplexPtr& k, const json& j);
json cover_to_json(const Cover& c);
EdgePath path_from_text(const std::string& text);

enum class ScalarMode { exact, floating };
ScalarMode scalar_mode(const json& doc);

template <class S>
S scalar_from_json(const json& j);
template <class S>
json scalar_to_json(const S& v);

template <class S>
ClosedOneForm<S> form_from_json(const json& doc);
template <class S>
json form_to_json(const ClosedOneForm<S>& theta);

template <class S>
LCKData<S> lck_from_json(const json& doc);
template <class S>
json lck_to_json(const LCKData<S>& d);

psh::GridDomain domain_from_json(const json& j);
json domain_to_json(const psh::GridDomain& d);
psh::GridFunction grid_from_json(const json& j);
json grid_to_json(const psh::GridFunction& g);
psh::HolomorphicMap map_from_json(const json& j);
psh::Region region_from_json(const json& j);
/// Relative grid references are resolved against `base_dir`.
psh::FieldPtr field_from_json(const json& j, const std::filesystem::path& base_dir, std::vector<std::string>* digests);
psh::WellRelatedSpec spec_from_json(const json& j, const std::filesystem::path& base_dir,
                                    std::vector<std::string>* digests = nullptr);
json point_to_json(const psh::Point& p);
psh::Point point_from_text(const std::string& text);

}  // namespace lcktk::io
