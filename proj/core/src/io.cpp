#include "mehybrid/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mehybrid {

namespace {

constexpr const char* kSurrogateFormat = "mehybrid-surrogate";
constexpr int kSurrogateVersion = 1;

template <class T>
T field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string(what) + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string(what) + ": bad '" + key + "': " + e.what());
  }
}

}  // namespace

json element_to_json(const Element& e) { return {{"lower", e.lower}, {"upper", e.upper}, {"prob", e.prob}}; }

Element element_from_json(const json& j) {
  Element e;
  e.lower = field<std::vector<double>>(j, "lower", "element");
  e.upper = field<std::vector<double>>(j, "upper", "element");
  e.prob = field<double>(j, "prob", "element");
  if (e.lower.size() != e.upper.size() || e.lower.empty())
    throw std::invalid_argument("element: lower and upper must have the same nonzero length");
  return e;
}

json decomposition_to_json(const Decomposition& d) {
  json out = json::array();
  for (const auto& e : d.elements()) out.push_back(element_to_json(e));
  return out;
}

Decomposition decomposition_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("decomposition: expected an array of elements");
  std::vector<Element> elements;
  for (const auto& e : j) elements.push_back(element_from_json(e));
  return Decomposition(std::move(elements));
}

json surrogate_to_json(const MultiElementSurrogate& s, const json& meta) {
  json elements = json::array();
  for (const auto& exp : s.expansions()) {
    auto e = element_to_json(exp.element());
    e["order"] = exp.order();
    e["coeffs"] = std::vector<double>(exp.coeffs().begin(), exp.coeffs().end());
    elements.push_back(std::move(e));
  }
  return {{"format", kSurrogateFormat},
          {"version", kSurrogateVersion},
          {"dimension", s.dimension()},
          {"meta", meta},
          {"elements", std::move(elements)}};
}

SurrogateCache surrogate_from_json(const json& j) {
  if (field<std::string>(j, "format", "surrogate cache") != kSurrogateFormat)
    throw std::invalid_argument("surrogate cache: unknown format");
  if (field<int>(j, "version", "surrogate cache") != kSurrogateVersion)
    throw std::invalid_argument("surrogate cache: unsupported version");
  const auto dim = field<std::size_t>(j, "dimension", "surrogate cache");
  if (!j.contains("elements")) throw std::invalid_argument("surrogate cache: missing 'elements'");
  const auto& items = j.at("elements");
  if (!items.is_array() || items.empty()) throw std::invalid_argument("surrogate cache: no elements");
  std::vector<Element> elements;
  std::vector<GpcExpansion> expansions;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& item = items[k];
    Element e = element_from_json(item);
    if (e.dimension() != dim)
      throw std::invalid_argument("surrogate cache: element " + std::to_string(k) + " has the wrong dimension");
    const int order = field<int>(item, "order", "surrogate cache element");
    auto coeffs = field<std::vector<double>>(item, "coeffs", "surrogate cache element");
    if (order < 0 || coeffs.size() != multi_index_count(dim, order))
      throw std::invalid_argument("surrogate cache: element " + std::to_string(k) +
                                  " has a coefficient count that does not match its order");
    expansions.emplace_back(e, order, std::move(coeffs));
    elements.push_back(std::move(e));
  }
  SurrogateCache out;
  out.surrogate = MultiElementSurrogate(Decomposition(std::move(elements)), std::move(expansions));
  if (j.contains("meta")) out.meta = j.at("meta");
  return out;
}

void save_surrogate(const std::filesystem::path& path, const MultiElementSurrogate& s, const json& meta) {
  write_file(path, surrogate_to_json(s, meta).dump(2) + "\n");
}

SurrogateCache load_surrogate(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return surrogate_from_json(j);
}

json estimate_to_json(const Estimate& e) {
  return {{"p_f", e.p_f},         {"failures", e.failures},       {"m", e.m},
          {"n_exact", e.n_exact}, {"n_surrogate", e.n_surrogate}, {"stddev", e.stddev}};
}

json trace_to_json(const HybridTrace& t) {
  json out = json::array();
  for (const auto& r : t.records)
    out.push_back({{"iteration", r.iteration}, {"estimate", r.estimate}, {"n_exact", r.n_exact}, {"element", r.element}});
  return out;
}

json events_to_json(const std::vector<RefinementEvent>& events) {
  json out = json::array();
  for (const auto& e : events)
    out.push_back({{"time", e.time}, {"element", e.element_id}, {"indicator", e.indicator}, {"dims", e.dims}});
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace mehybrid
