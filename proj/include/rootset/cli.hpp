#pragma once

// Batch commands over group specification documents. Every command returns a report
// {spec, command, result, assertions, metadata}; the body is deterministic and timing
// lives only in metadata.

#include <chrono>

#include "rootset/spec_document.hpp"

namespace rootset {

inline constexpr const char* kVersion = "0.3.0";

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitDisagreement = 2 };

struct CommandOptions {
  std::string command;
  std::optional<std::string> element;
  unsigned max_level = 8;
  unsigned window = 2;
  unsigned birth_cap = 4;
  std::optional<std::string> suite;
  std::optional<std::uint64_t> p;
  std::optional<unsigned> level;
  std::optional<unsigned> depth;
  std::optional<std::string> out;
  bool canonical = false;  // omit timing so reports compare byte for byte
};

struct CommandOutcome {
  Json report;
  int exit_code = kExitOk;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"eta", "k-estimate", "lemmas", "reduce-t2", "omega1-census", "emit-table"};
  return names;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline Json to_json(const CheckResult& c) {
  Json j{{"name", c.name}, {"status", to_string(c.status)}, {"checked", c.checked}};
  if (c.witness) j["witness"] = *c.witness;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

inline Json to_json(const LemmaReport& r) {
  Json clauses = Json::array();
  for (const auto& c : r.clauses) clauses.push_back(to_json(c));
  return {{"lemma", r.lemma}, {"passed", r.passed()}, {"clauses", clauses}};
}

inline Json to_json(const EtaReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    Json lj{{"level", l.level}, {"level_order", l.level_order}, {"size", l.size}};
    if (l.members) lj["members"] = *l.members;
    levels.push_back(lj);
  }
  Json j{{"element", r.element},
         {"birth_level", r.birth_level},
         {"max_level", r.max_level},
         {"stabilized", r.stabilized},
         {"growing", r.growing},
         {"certificate", {{"level", r.certificate_level}, {"window", r.window}, {"agreeing_levels", r.agreeing_levels}}},
         {"coherence_checks", r.coherence_checks},
         {"levels", levels}};
  if (r.stable_set) j["stable_set"] = *r.stable_set;
  return j;
}

inline Json to_json(const KReport& r) {
  Json elements = Json::array();
  for (const auto& e : r.elements) {
    Json sizes = Json::array();
    for (const auto& l : e.levels) sizes.push_back(l.size);
    elements.push_back({{"element", e.element},
                        {"birth_level", e.birth_level},
                        {"stabilized", e.stabilized},
                        {"certificate_level", e.certificate_level},
                        {"sizes", sizes}});
  }
  Json j{{"tower", r.tower_kind},   {"max_level", r.max_level}, {"window", r.window},
         {"birth_cap", r.birth_cap}, {"estimate", r.estimate},   {"estimate_is_subgroup", r.estimate_is_subgroup},
         {"growing", r.growing},     {"undetermined", r.undetermined}, {"elements", elements}};
  if (r.theory)
    j["theory"] = {{"description", r.theory->description},
                   {"expected", r.theory->expected},
                   {"agrees", r.theory->agrees},
                   {"missing", r.theory->missing},
                   {"unexpected", r.theory->unexpected}};
  return j;
}

inline Json to_json(const ReductionTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    Json sj{{"m", s.m}, {"branch", to_string(s.branch)}, {"a2", s.a2}, {"z", s.z}, {"section_order", s.section_order}};
    if (s.normal) sj["normal_subgroup"] = *s.normal;
    steps.push_back(sj);
  }
  Json profile = Json::object();
  for (auto [o, c] : t.final_profile) profile[std::to_string(o)] = c;
  return {{"level", t.level},
          {"steps", steps},
          {"final_order", t.final_order},
          {"final_profile", profile},
          {"recognized", t.recognition.passed()},
          {"recognition",
           {{"two_group", t.recognition.two_group},
            {"unique_involution", t.recognition.unique_involution},
            {"cyclic_index_two", t.recognition.cyclic_index_two},
            {"non_cyclic", t.recognition.non_cyclic}}},
          {"eta_a_trivial", t.eta_a_trivial}};
}

inline Json to_json(const Omega1Census& c) {
  return {{"depth", c.depth},
          {"group_order", c.group_order},
          {"involutions", c.involutions},
          {"omega1_order", c.omega1_order},
          {"w_order", c.w_order},
          {"omega1_equals_w", c.omega1_equals_w},
          {"involutions_in_w", c.involutions_in_w}};
}

namespace detail {

class ReportBuilder {
 public:
  void assertion(std::string name, bool ok, std::optional<std::string> witness = std::nullopt) {
    assertion(std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, std::move(witness));
  }
  void assertion(std::string name, CheckStatus s, std::optional<std::string> witness = std::nullopt) {
    Json a{{"name", std::move(name)}, {"status", to_string(s)}};
    if (witness) a["witness"] = *witness;
    if (s == CheckStatus::fail) failed_ = true;
    assertions_.push_back(std::move(a));
  }
  Json assertions() const { return assertions_; }
  bool failed() const { return failed_; }

 private:
  Json assertions_ = Json::array();
  bool failed_ = false;
};

template <FiniteGroup G>
ElementId require_element(const G& g, const std::string& name) {
  auto e = g.find(name);
  if (!e) throw Error(Errc::unknown_element, "no element named '" + name + "'");
  return *e;
}

inline std::vector<std::string> sorted_names(const auto& g, const Subset& s) {
  std::vector<std::string> out;
  for (auto e : s) out.emplace_back(g.name(e));
  std::sort(out.begin(), out.end());
  return out;
}

/// Finite view of a built group for the finite-group commands; towers use `level`.
inline std::shared_ptr<const LevelGroup> finite_view(const BuiltGroup& g, std::optional<unsigned> level) {
  if (auto* t = std::get_if<FiniteGroupTable>(&g)) return std::make_shared<levels::Adapted<FiniteGroupTable>>(*t);
  if (auto* o = std::get_if<TreeVWGroup>(&g)) return std::make_shared<levels::Adapted<TreeVWGroup>>(*o);
  const auto& tower = std::get<TowerPtr>(g);
  return tower->level(level.value_or(tower->min_level()));
}

inline std::string theory_witness(const EtaReport& r) {
  return r.element + (r.stabilized ? " stabilized" : " did not stabilize") + " by level " + std::to_string(r.max_level);
}

inline Json run_eta(const CommandOptions& o, const BuiltGroup& g, ReportBuilder& rb) {
  if (!o.element) throw Error(Errc::precondition, "eta needs --element");
  if (auto* tp = std::get_if<TowerPtr>(&g)) {
    const Tower& t = **tp;
    const auto rep = eta_stabilized(t, *o.element, o.max_level, o.window);
    rb.assertion("coherence", CheckStatus::pass);
    auto lv = t.level(rep.birth_level);
    if (auto expect = t.theory_contains(rep.birth_level, *lv->find(rep.element))) {
      // Non-stabilization is never evidence against membership, only stabilization is checked.
      const bool ok = *expect ? rep.stabilized : !rep.stabilized;
      rb.assertion("theory-agreement", ok, ok ? std::nullopt : std::optional(theory_witness(rep)));
    }
    return to_json(rep);
  }
  auto view = finite_view(g, std::nullopt);
  const auto e = require_element(*view, *o.element);
  const auto set = eta(*view, e).members;
  return {{"element", view->name(e)}, {"group_order", view->order()}, {"size", set.size()}, {"members", sorted_names(*view, set)}};
}

inline Json run_k_estimate(const CommandOptions& o, const BuiltGroup& g, ReportBuilder& rb) {
  if (auto* tp = std::get_if<TowerPtr>(&g)) {
    const auto rep = k_estimate(**tp, o.max_level, o.window, o.birth_cap);
    if (rep.theory) {
      std::optional<std::string> w;
      if (!rep.theory->missing.empty()) w = "missing " + rep.theory->missing.front();
      if (!rep.theory->unexpected.empty()) w = "unexpected " + rep.theory->unexpected.front();
      rb.assertion("theory-agreement", rep.theory->agrees, w);
    }
    rb.assertion("estimate-is-subgroup", rep.estimate_is_subgroup);
    rb.assertion("all-elements-classified", rep.undetermined.empty(),
                 rep.undetermined.empty() ? std::nullopt : std::optional(rep.undetermined.front()));
    return to_json(rep);
  }
  auto view = finite_view(g, std::nullopt);
  const auto k = k_finite(*view);
  const auto d = d_finite(*view);
  rb.assertion("k-is-whole-group", k.set.size() == view->order());
  return {{"group_order", view->order()},
          {"k", sorted_names(*view, k.set)},
          {"d", sorted_names(*view, d.set)},
          {"warning", k.warning}};
}

inline std::vector<LemmaReport> lemma_suite(const LevelGroup& g, const std::string& suite, std::optional<std::uint64_t> p) {
  std::vector<LemmaReport> out;
  auto primes = p ? std::vector<std::uint64_t>{*p} : math::prime_divisors(g.order());
  const bool all = suite == "all";
  if (all || suite == "3.1") out.push_back(check_lemma31(g));
  if (all || suite == "3.2") out.push_back(check_lemma32(g));
  if (all || suite == "3.3") out.push_back(check_lemma33(g));
  if (all || suite == "3.8") out.push_back(check_lemma38(g, p));
  if (all || suite == "3.9")
    for (auto q : primes) out.push_back(check_lemma39(g, q));
  return out;
}

inline std::string group_label(const GroupSpecDocument& d, std::size_t i) {
  return d.label.value_or(d.kind() + "#" + std::to_string(i));
}

inline Json run_lemmas(const CommandOptions& o, const std::vector<GroupSpecDocument>& docs, ReportBuilder& rb) {
  static const std::vector<std::string> suites{"3.1", "3.2", "3.3", "3.8", "3.9", "all"};
  const auto suite = o.suite.value_or("all");
  if (std::find(suites.begin(), suites.end(), suite) == suites.end())
    throw Error(Errc::precondition, "unknown suite '" + suite + "' (3.1, 3.2, 3.3, 3.8, 3.9, all)");
  if (o.p && !math::is_prime(*o.p)) throw Error(Errc::precondition, "--p " + std::to_string(*o.p) + " is not prime");
  Json groups = Json::array();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto label = group_label(docs[i], i);
    auto view = finite_view(build(docs[i]), o.level);
    if (view->order() > 4096)
      throw Error(Errc::precondition, label + ": order " + std::to_string(view->order()) + " is too large for the lemma suite");
    Json reports = Json::array();
    for (const auto& r : lemma_suite(*view, suite, o.p)) {
      for (const auto& c : r.clauses) rb.assertion(label + ": " + c.name, c.status, c.witness);
      reports.push_back(to_json(r));
    }
    groups.push_back({{"group", label}, {"order", view->order()}, {"reports", reports}});
  }
  return {{"suite", suite}, {"groups", groups}};
}

inline Json run_reduce(const CommandOptions& o, const BuiltGroup& g, ReportBuilder& rb) {
  auto* tp = std::get_if<TowerPtr>(&g);
  if (!tp) throw Error(Errc::precondition, "reduce-t2 needs a t2 or quaternion tower");
  const unsigned level = o.level.value_or(std::max((*tp)->min_level(), 4u));
  const auto r = quaternion_reduce(**tp, level);
  const auto* t2 = dynamic_cast<const InvertingExtensionTower*>(tp->get());
  std::size_t expected_len = 1;
  for (auto m = t2->m(); m % 2 == 0; m /= 2) ++expected_len;
  rb.assertion("generalized-quaternion", r.trace.recognition.passed());
  rb.assertion("eta-a-trivial", r.trace.eta_a_trivial);
  rb.assertion("trace-length", r.trace.steps.size() == expected_len,
               "expected " + std::to_string(expected_len) + ", got " + std::to_string(r.trace.steps.size()));
  rb.assertion("level-independent", r.level_independent);
  return {{"trace", to_json(r.trace)}, {"rerun", to_json(r.rerun)}, {"level_independent", r.level_independent}};
}

inline Json run_census(const CommandOptions& o, const std::vector<GroupSpecDocument>& docs, ReportBuilder& rb) {
  std::optional<unsigned> depth = o.depth;
  if (!docs.empty()) {
    const auto& d = docs.front();
    if (d.kind() != "tree_vw") throw Error(Errc::precondition, "omega1-census needs a tree_vw document");
    const auto dd = d.json["depth"].get<unsigned>();
    if (depth && *depth != dd) throw Error(Errc::precondition, "--depth disagrees with the document's depth");
    depth = dd;
  }
  if (!depth) throw Error(Errc::precondition, "omega1-census needs --depth or a tree_vw document");
  const auto c = omega1_census(*depth);
  rb.assertion("omega1-equals-w", c.omega1_equals_w);
  rb.assertion("involutions-in-w", c.involutions_in_w);
  return to_json(c);
}

inline Json run_emit(const CommandOptions& o, const BuiltGroup& g, ReportBuilder& rb) {
  if (!o.out) throw Error(Errc::precondition, "emit-table needs --out");
  FiniteGroupTable table = [&] {
    if (auto* t = std::get_if<FiniteGroupTable>(&g)) return *t;
    if (std::holds_alternative<TreeVWGroup>(g)) throw Error(Errc::precondition, "tree groups of depth >= 3 have no table form");
    const auto& tower = std::get<TowerPtr>(g);
    if (!o.level) throw Error(Errc::precondition, "emit-table on a tower needs --level");
    auto lv = tower->level(*o.level);
    if (lv->order() > 4096) throw Error(Errc::precondition, "level order " + std::to_string(lv->order()) + " is too large to emit");
    return materialize(*lv);
  }();
  std::ofstream out(*o.out);
  if (!out) throw Error(Errc::precondition, "cannot write " + *o.out);
  write_table(out, table);
  (void)rb;
  return {{"path", *o.out}, {"order", table.order()}, {"profile", [&] {
             Json p = Json::object();
             for (auto [k, v] : order_profile(table)) p[std::to_string(k)] = v;
             return p;
           }()}};
}

}  // namespace detail

/// Runs one command. Input problems (bad documents, unknown elements, levels out of
/// range, failed preconditions) give exit code 1 and an error report; theory
/// disagreements and failed checks give exit code 2.
inline CommandOutcome run_command(const CommandOptions& o, const std::vector<GroupSpecDocument>& docs) {
  const auto start = std::chrono::steady_clock::now();
  Json cmd{{"name", o.command}};
  {
    Json flags = Json::object();
    if (o.element) flags["element"] = *o.element;
    if (o.suite) flags["suite"] = *o.suite;
    if (o.p) flags["p"] = *o.p;
    if (o.level) flags["level"] = *o.level;
    if (o.depth) flags["depth"] = *o.depth;
    if (o.out) flags["out"] = *o.out;
    if (o.command == "eta" || o.command == "k-estimate") {
      flags["max_level"] = o.max_level;
      flags["window"] = o.window;
    }
    if (o.command == "k-estimate") flags["birth_cap"] = o.birth_cap;
    cmd["flags"] = flags;
  }
  Json spec = Json::array();
  for (const auto& d : docs) spec.push_back(d.json);
  CommandOutcome outcome;
  outcome.report = {{"spec", docs.size() == 1 ? docs.front().json : spec}, {"command", cmd}};

  try {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), o.command) == names.end())
      throw Error(Errc::precondition, "unknown command '" + o.command + "'");
    const bool multi = o.command == "lemmas";
    const bool optional_spec = o.command == "omega1-census";
    if (docs.empty() && !optional_spec) throw Error(Errc::precondition, o.command + " needs a group specification");
    if (docs.size() > 1 && !multi) throw Error(Errc::precondition, o.command + " takes a single group specification");

    detail::ReportBuilder rb;
    Json result;
    if (o.command == "lemmas") {
      result = detail::run_lemmas(o, docs, rb);
    } else if (o.command == "omega1-census") {
      result = detail::run_census(o, docs, rb);
    } else {
      const auto g = build(docs.front());
      if (o.command == "eta") result = detail::run_eta(o, g, rb);
      else if (o.command == "k-estimate") result = detail::run_k_estimate(o, g, rb);
      else if (o.command == "reduce-t2") result = detail::run_reduce(o, g, rb);
      else result = detail::run_emit(o, g, rb);
    }
    outcome.report["result"] = std::move(result);
    outcome.report["assertions"] = rb.assertions();
    outcome.exit_code = rb.failed() ? kExitDisagreement : kExitOk;
  } catch (const SpecError& e) {
    outcome.report["error"] = {{"code", to_string(e.code())}, {"messages", e.problems()}};
    outcome.exit_code = kExitInputError;
  } catch (const Error& e) {
    if (e.code() == Errc::coherence_violation) {
      outcome.report["assertions"] = Json::array({{{"name", "coherence"}, {"status", "fail"}, {"witness", e.what()}}});
      outcome.exit_code = kExitDisagreement;
    } else {
      outcome.report["error"] = {{"code", to_string(e.code())}, {"messages", {e.what()}}};
      outcome.exit_code = kExitInputError;
    }
  }

  Json meta{{"version", kVersion}};
  if (!o.canonical) {
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    meta["timing"] = {{"elapsed_ms", ms}};
  }
  outcome.report["metadata"] = meta;
  return outcome;
}

/// Documents for a path: a single JSON file, or every *.json file of a directory in
/// name order (for corpus runs).
inline std::vector<GroupSpecDocument> load_specs(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw SpecError(Errc::parse_error, {"no such file or directory: " + path.string()});
  if (!std::filesystem::is_directory(path)) return {parse_spec_file(path)};
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(path))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<GroupSpecDocument> docs;
  std::vector<std::string> problems;
  for (const auto& f : files) {
    try {
      docs.push_back(parse_spec_file(f));
      if (!docs.back().label) docs.back().label = f.stem().string();
    } catch (const SpecError& e) {
      for (const auto& p : e.problems()) problems.push_back(f.filename().string() + p);
    }
  }
  if (!problems.empty()) throw SpecError(Errc::precondition, std::move(problems));
  return docs;
}

}  // namespace rootset
