#pragma once

// JSON group specifications. A document names a finite group, a tree oracle or a tower
// by `kind`; product and quotient kinds nest further documents. Validation collects
// every problem before anything is built.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "rootset/builders.hpp"
#include "rootset/constructions.hpp"
#include "rootset/table_io.hpp"

namespace rootset {

using Json = nlohmann::json;

/// Thrown with every collected problem; what() joins them one per line.
class SpecError : public Error {
 public:
  SpecError(Errc code, std::vector<std::string> problems)
      : Error(code, join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& ps) {
    std::string s;
    for (const auto& p : ps) s += (s.empty() ? "" : "\n") + p;
    return s;
  }
  std::vector<std::string> problems_;
};

struct GroupSpecDocument {
  Json json;
  std::filesystem::path base_dir;  // relative table paths resolve against this
  std::optional<std::string> label;

  std::string kind() const { return json.at("kind").get<std::string>(); }
};

inline const std::vector<std::string>& spec_kinds() {
  static const std::vector<std::string> kinds{
      "table",      "cyclic",        "direct_product", "heisenberg",       "cocycle_extension", "tree_vw",
      "quotient",   "prufer_tower",  "t1_tower",       "t2_tower",         "quaternion_tower",  "quotient_tower",
      "dihedral",   "generalized_quaternion",          "symmetric",        "tree_vw_tower"};
  return kinds;
}

inline bool is_tower_kind(const std::string& k) { return k.ends_with("_tower"); }

namespace detail {

class SpecValidator {
 public:
  explicit SpecValidator(std::filesystem::path base) : base_(std::move(base)) {}

  void check(const Json& j, const std::string& at) {
    if (!j.is_object()) return problem(at, "document must be a JSON object");
    if (!j.contains("kind") || !j["kind"].is_string()) return problem(at, "missing string field 'kind'");
    const auto kind = j["kind"].get<std::string>();
    const auto& ks = spec_kinds();
    if (std::find(ks.begin(), ks.end(), kind) == ks.end()) return problem(at + "/kind", "unknown kind '" + kind + "'");
    if (j.contains("label") && !j["label"].is_string()) problem(at + "/label", "must be a string");

    if (kind == "table") {
      if (auto s = str(j, at, "path")) {
        auto p = resolve(*s);
        if (!std::filesystem::exists(p)) problem(at + "/path", "file not found: " + p.string());
      }
    } else if (kind == "cyclic") {
      natural(j, at, "n", 1, 1u << 20);
    } else if (kind == "dihedral") {
      natural(j, at, "n", 1, 1u << 19);
    } else if (kind == "generalized_quaternion") {
      if (auto n = natural(j, at, "order", 8, 1u << 20)) {
        auto pp = math::as_prime_power(*n);
        if (!pp || pp->p != 2) problem(at + "/order", "must be a power of 2");
      }
    } else if (kind == "symmetric") {
      natural(j, at, "n", 1, 6);
    } else if (kind == "direct_product") {
      if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].size() < 2) {
        problem(at + "/factors", "must be an array of at least two group documents");
      } else {
        for (std::size_t i = 0; i < j["factors"].size(); ++i) finite(j["factors"][i], at + "/factors/" + std::to_string(i));
      }
    } else if (kind == "heisenberg") {
      if (auto p = prime(j, at, "p"))
        if (*p == 2) problem(at + "/p", "p must be odd");
    } else if (kind == "cocycle_extension") {
      sub(j, at, "base", &SpecValidator::finite);
      prime(j, at, "p");
      if (!j.contains("w") || !j["w"].is_array()) {
        problem(at + "/w", "must be a square array of integers");
      } else {
        for (const auto& row : j["w"])
          if (!row.is_array() || !std::all_of(row.begin(), row.end(), [](const Json& v) { return v.is_number_unsigned(); })) {
            problem(at + "/w", "must be a square array of non-negative integers");
            break;
          }
      }
    } else if (kind == "tree_vw") {
      natural(j, at, "depth", 1, TreeVWSpec::kMaxDepth);
    } else if (kind == "quotient") {
      sub(j, at, "group", &SpecValidator::finite);
      names(j, at, "normal");
    } else if (kind == "prufer_tower") {
      prime(j, at, "p");
    } else if (kind == "t1_tower") {
      sub(j, at, "H", &SpecValidator::finite);
      prime(j, at, "p");
      str(j, at, "a_gen");
      natural(j, at, "n", 0, 20);
    } else if (kind == "t2_tower") {
      if (sub(j, at, "base", &SpecValidator::check)) {
        const auto& b = j["base"];
        if (b.is_object() && b.contains("kind") && b["kind"] != "t1_tower" && b["kind"] != "prufer_tower")
          problem(at + "/base/kind", "t2 base must be a t1_tower or prufer_tower");
        if (b.is_object() && b.contains("p") && b["p"] != 2) problem(at + "/base/p", "t2 base needs p = 2");
      }
      str(j, at, "y");
      natural(j, at, "m", 1, 1u << 20);
      if (j.contains("alpha")) {
        const auto& a = j["alpha"];
        if (!a.is_object() || !a.contains("kind") || !a["kind"].is_string()) {
          problem(at + "/alpha", "must be an object with a string 'kind'");
        } else {
          const auto ak = a["kind"].get<std::string>();
          if (ak != "inversion" && ak != "identity" && ak != "invert_c")
            problem(at + "/alpha/kind", "must be inversion, identity or invert_c");
          if (a.contains("images")) {
            if (ak != "invert_c") problem(at + "/alpha/images", "only invert_c takes images");
            if (!a["images"].is_object() ||
                !std::all_of(a["images"].begin(), a["images"].end(), [](const Json& v) { return v.is_string(); }))
              problem(at + "/alpha/images", "must map H element names to tower element names");
          }
        }
      }
    } else if (kind == "quotient_tower") {
      sub(j, at, "tower", &SpecValidator::tower);
      names(j, at, "normal");
    }
  }

  std::vector<std::string> problems;

 private:
  void finite(const Json& j, const std::string& at) {
    check(j, at);
    if (j.is_object() && j.contains("kind") && j["kind"].is_string() && is_tower_kind(j["kind"].get<std::string>()))
      problem(at + "/kind", "a finite group is required here");
  }
  void tower(const Json& j, const std::string& at) {
    check(j, at);
    if (j.is_object() && j.contains("kind") && j["kind"].is_string() && !is_tower_kind(j["kind"].get<std::string>()))
      problem(at + "/kind", "a tower is required here");
  }

  bool sub(const Json& j, const std::string& at, const char* key, void (SpecValidator::*fn)(const Json&, const std::string&)) {
    if (!j.contains(key)) {
      problem(at + "/" + key, "missing nested group document");
      return false;
    }
    (this->*fn)(j[key], at + "/" + key);
    return true;
  }

  std::optional<std::string> str(const Json& j, const std::string& at, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
      problem(at + "/" + key, "missing string field");
      return std::nullopt;
    }
    return j[key].get<std::string>();
  }

  std::optional<std::uint64_t> natural(const Json& j, const std::string& at, const char* key, std::uint64_t lo,
                                       std::uint64_t hi) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
      problem(at + "/" + key, "missing integer field");
      return std::nullopt;
    }
    const auto v = j[key].get<std::int64_t>();
    if (v < static_cast<std::int64_t>(lo) || v > static_cast<std::int64_t>(hi)) {
      problem(at + "/" + key, "must be in " + std::to_string(lo) + ".." + std::to_string(hi));
      return std::nullopt;
    }
    return static_cast<std::uint64_t>(v);
  }

  std::optional<std::uint64_t> prime(const Json& j, const std::string& at, const char* key) {
    auto v = natural(j, at, key, 2, 1u << 16);
    if (v && !math::is_prime(*v)) {
      problem(at + "/" + key, std::to_string(*v) + " is not prime");
      return std::nullopt;
    }
    return v;
  }

  void names(const Json& j, const std::string& at, const char* key) {
    if (!j.contains(key) || !j[key].is_array() ||
        !std::all_of(j[key].begin(), j[key].end(), [](const Json& v) { return v.is_string(); }))
      problem(at + "/" + key, "must be an array of element names");
  }

  std::filesystem::path resolve(const std::string& p) const {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_ / path;
  }

  void problem(const std::string& at, const std::string& what) { problems.push_back((at.empty() ? "/" : at) + ": " + what); }

  std::filesystem::path base_;
};

}  // namespace detail

/// Parses and validates; throws SpecError(parse_error) with line and column on bad JSON
/// and SpecError(precondition) listing every parameter problem.
inline GroupSpecDocument parse_spec(std::string_view text, std::filesystem::path base_dir = ".") {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SpecError(Errc::parse_error, {"syntax error at line " + std::to_string(line) + ", column " + std::to_string(col)});
  }
  detail::SpecValidator v(base_dir);
  v.check(j, "");
  if (!v.problems.empty()) throw SpecError(Errc::precondition, std::move(v.problems));
  GroupSpecDocument doc{std::move(j), std::move(base_dir), std::nullopt};
  if (doc.json.contains("label")) doc.label = doc.json["label"].get<std::string>();
  return doc;
}

inline GroupSpecDocument parse_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(Errc::parse_error, {"cannot open " + path.string()});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

/// A built document: a Cayley table, a tree-group oracle (depth >= 3) or a tower.
using BuiltGroup = std::variant<FiniteGroupTable, TreeVWGroup, TowerPtr>;

namespace detail {

inline ElementId element(const FiniteGroupTable& g, const Json& name, const std::string& at) {
  auto e = g.find(name.get<std::string>());
  if (!e) throw Error(Errc::unknown_element, at + ": no element named '" + name.get<std::string>() + "'");
  return *e;
}

inline FiniteGroupTable build_finite(const Json& j, const std::filesystem::path& base, const std::string& at);

inline TowerPtr build_tower(const Json& j, const std::filesystem::path& base, const std::string& at) {
  const auto kind = j["kind"].get<std::string>();
  if (kind == "prufer_tower") return prufer_tower(j["p"].get<std::uint64_t>());
  if (kind == "quaternion_tower") return quaternion_tower();
  if (kind == "tree_vw_tower") return tree_vw_tower();
  if (kind == "t1_tower") {
    auto h = build_finite(j["H"], base, at + "/H");
    const auto a = element(h, j["a_gen"], at + "/a_gen");
    return t1_tower(std::move(h), j["p"].get<std::uint64_t>(), a, j["n"].get<unsigned>());
  }
  if (kind == "t2_tower") {
    auto b = build_tower(j["base"], base, at + "/base");
    AlphaRecipe alpha;
    if (j.contains("alpha")) {
      const auto ak = j["alpha"]["kind"].get<std::string>();
      alpha.kind = ak == "identity" ? AlphaRecipe::Kind::identity
                   : ak == "invert_c" ? AlphaRecipe::Kind::invert_c
                                      : AlphaRecipe::Kind::inversion;
      if (j["alpha"].contains("images"))
        for (const auto& [k, v] : j["alpha"]["images"].items()) alpha.h_images.emplace_back(k, v.get<std::string>());
    }
    return t2_tower(std::move(b), j["y"].get<std::string>(), j["m"].get<unsigned>(), std::move(alpha));
  }
  if (kind == "quotient_tower")
    return quotient_tower(build_tower(j["tower"], base, at + "/tower"), j["normal"].get<std::vector<std::string>>());
  throw Error(Errc::precondition, at + ": '" + kind + "' is not a tower");
}

inline FiniteGroupTable build_finite(const Json& j, const std::filesystem::path& base, const std::string& at) {
  const auto kind = j["kind"].get<std::string>();
  if (kind == "table") {
    std::filesystem::path p(j["path"].get<std::string>());
    return read_table_file(p.is_absolute() ? p : base / p);
  }
  if (kind == "cyclic") return cyclic(j["n"].get<std::size_t>());
  if (kind == "dihedral") return dihedral(j["n"].get<std::size_t>());
  if (kind == "generalized_quaternion") return generalized_quaternion(j["order"].get<std::size_t>());
  if (kind == "symmetric") return symmetric(j["n"].get<std::size_t>());
  if (kind == "heisenberg") return heisenberg(j["p"].get<std::uint64_t>());
  if (kind == "direct_product") {
    auto acc = build_finite(j["factors"][0], base, at + "/factors/0");
    for (std::size_t i = 1; i < j["factors"].size(); ++i)
      acc = direct_product(acc, build_finite(j["factors"][i], base, at + "/factors/" + std::to_string(i)));
    return acc;
  }
  if (kind == "cocycle_extension") {
    CocycleTable c{build_finite(j["base"], base, at + "/base"), j["p"].get<std::uint64_t>(),
                   j["w"].get<std::vector<std::vector<std::uint32_t>>>()};
    return central_extension(c);
  }
  if (kind == "tree_vw") {
    const auto d = j["depth"].get<unsigned>();
    if (d > 2) throw Error(Errc::precondition, at + ": tree_vw depth " + std::to_string(d) + " is only available as an oracle");
    return *tree_vw_group(d).table;
  }
  if (kind == "quotient") {
    auto g = build_finite(j["group"], base, at + "/group");
    std::vector<ElementId> gens;
    for (const auto& n : j["normal"]) gens.push_back(element(g, n, at + "/normal"));
    return quotient(g, closure(g, gens)).group;
  }
  throw Error(Errc::precondition, at + ": '" + kind + "' is not a finite group");
}

}  // namespace detail

inline BuiltGroup build(const GroupSpecDocument& doc) {
  const auto kind = doc.kind();
  if (is_tower_kind(kind)) return detail::build_tower(doc.json, doc.base_dir, "");
  if (kind == "tree_vw" && doc.json["depth"].get<unsigned>() > 2) return TreeVWGroup(doc.json["depth"].get<unsigned>());
  return detail::build_finite(doc.json, doc.base_dir, "");
}

}  // namespace rootset
