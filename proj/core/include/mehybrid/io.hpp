#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "mehybrid/estimator.hpp"
#include "mehybrid/randomspace.hpp"
#include "mehybrid/refine.hpp"
#include "mehybrid/surrogate.hpp"

namespace mehybrid {

using nlohmann::json;

json element_to_json(const Element& e);
/// Reads lower/upper/prob as stored; no legality check.
Element element_from_json(const json& j);

json decomposition_to_json(const Decomposition& d);
Decomposition decomposition_from_json(const json& j);

/// A surrogate plus free-form metadata (problem, order, refinement settings).
struct SurrogateCache {
  MultiElementSurrogate surrogate;
  json meta = json::object();
};

json surrogate_to_json(const MultiElementSurrogate& s, const json& meta = json::object());

/// Throws std::invalid_argument on a malformed document. The mesh itself is
/// not checked; call decomposition().check() for that.
SurrogateCache surrogate_from_json(const json& j);

void save_surrogate(const std::filesystem::path& path, const MultiElementSurrogate& s,
                    const json& meta = json::object());
SurrogateCache load_surrogate(const std::filesystem::path& path);

json estimate_to_json(const Estimate& e);
json trace_to_json(const HybridTrace& t);
json events_to_json(const std::vector<RefinementEvent>& events);

/// Reads a whole file; throws std::runtime_error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes text, creating parent directories as needed.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mehybrid
