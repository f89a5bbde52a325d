// rootset: batch front end for root-set computations on finite groups and towers.
//
//   rootset eta spec.json --element a --max-level 8 --window 2
//   rootset lemmas corpus/ --suite 3.8
//   rootset omega1-census --depth 3

#include <iostream>

#include <CLI11.hpp>

#include "rootset/cli.hpp"

int main(int argc, char** argv) {
  using namespace rootset;
  CLI::App app{"Root sets and the Scott subgroup in finite groups and towers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommandOptions opts;
  std::string spec_path;
  int indent = 2;

  auto add_common = [&](CLI::App* sub, bool spec_required) {
    auto* s = sub->add_option("spec", spec_path, "group specification (JSON file; lemmas also accepts a directory)");
    if (spec_required) s->required();
    sub->add_flag("--canonical", opts.canonical, "omit timing from the report");
    sub->add_option("--indent", indent, "JSON indentation (-1 for one line)");
  };

  auto* eta = app.add_subcommand("eta", "eta(g), level by level for towers");
  add_common(eta, true);
  eta->add_option("--element", opts.element, "element name")->required();
  eta->add_option("--max-level", opts.max_level, "highest tower level")->capture_default_str();
  eta->add_option("--window", opts.window, "agreeing levels needed to declare stabilization")->capture_default_str();

  auto* kest = app.add_subcommand("k-estimate", "estimate K by eta stabilization");
  add_common(kest, true);
  kest->add_option("--max-level", opts.max_level, "highest tower level")->capture_default_str();
  kest->add_option("--window", opts.window, "agreeing levels needed to declare stabilization")->capture_default_str();
  kest->add_option("--birth-cap", opts.birth_cap, "enumerate elements born up to this level")->capture_default_str();

  auto* lemmas = app.add_subcommand("lemmas", "exhaustive lemma checks");
  add_common(lemmas, true);
  lemmas->add_option("--suite", opts.suite, "3.1, 3.2, 3.3, 3.8, 3.9 or all");
  lemmas->add_option("--p", opts.p, "prime for 3.8 and 3.9 (default: every prime divisor)");
  lemmas->add_option("--level", opts.level, "tower level to check");

  auto* reduce = app.add_subcommand("reduce-t2", "reduce a T2 tower to a generalized quaternion section");
  add_common(reduce, true);
  reduce->add_option("--level", opts.level, "tower level");

  auto* census = app.add_subcommand("omega1-census", "Omega_1 of the tree group");
  add_common(census, false);
  census->add_option("--depth", opts.depth, "tree depth (1..4)");

  auto* emit = app.add_subcommand("emit-table", "write a Cayley table file");
  add_common(emit, true);
  emit->add_option("--out", opts.out, "output path")->required();
  emit->add_option("--level", opts.level, "tower level");

  CLI11_PARSE(app, argc, argv);
  opts.command = app.get_subcommands().front()->get_name();

  CommandOutcome outcome;
  try {
    std::vector<GroupSpecDocument> docs;
    if (!spec_path.empty()) docs = load_specs(spec_path);
    outcome = run_command(opts, docs);
  } catch (const SpecError& e) {
    outcome.report = {{"command", {{"name", opts.command}}},
                      {"error", {{"code", to_string(e.code())}, {"messages", e.problems()}}},
                      {"metadata", {{"version", kVersion}}}};
    outcome.exit_code = kExitInputError;
  }
  std::cout << outcome.report.dump(indent) << '\n';
  if (outcome.report.contains("error"))
    for (const auto& m : outcome.report["error"]["messages"]) std::cerr << "rootset: " << m.get<std::string>() << '\n';
  return outcome.exit_code;
}
