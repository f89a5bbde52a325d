#include <gtest/gtest.h>

#include <cstdio>
#include <sys/wait.h>

#include "rootset/cli.hpp"

using namespace rootset;

namespace {

const std::filesystem::path kData = ROOTSET_TEST_DATA;

CommandOutcome run(const std::string& command, const std::filesystem::path& spec, CommandOptions o = {}) {
  o.command = command;
  o.canonical = true;
  return run_command(o, spec.empty() ? std::vector<GroupSpecDocument>{} : load_specs(spec));
}

std::vector<std::string> problems_of(std::string_view text) {
  try {
    parse_spec(text, kData);
  } catch (const SpecError& e) {
    return e.problems();
  }
  return {};
}

struct Process {
  int exit_code;
  std::string out;
};

Process run_binary(const std::string& args) {
  const std::string cmd = std::string(ROOTSET_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST(ParseSpec, ValidDocuments) {
  EXPECT_TRUE(problems_of(R"({"kind":"prufer_tower","p":2})").empty());
  EXPECT_TRUE(problems_of(R"({"kind":"t1_tower","H":{"kind":"table","path":"h27.tbl"},"p":3,"a_gen":"c","n":1})").empty());
  const auto doc = parse_spec(R"({"kind":"t1_tower","H":{"kind":"table","path":"h27.tbl"},"p":3,"a_gen":"c","n":1})", kData);
  const auto built = build(doc);
  const auto& t = std::get<TowerPtr>(built);
  EXPECT_EQ(t->level(1)->order(), 27u);
  EXPECT_EQ(t->kind(), "t1");
}

TEST(ParseSpec, ParameterViolations) {
  const auto p = problems_of(R"({"kind":"heisenberg","p":2})");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_NE(p[0].find("odd"), std::string::npos);
  EXPECT_EQ(problems_of(R"({"kind":"prufer_tower","p":4})").size(), 1u);
  EXPECT_NE(problems_of(R"({"kind":"sporadic"})").at(0).find("unknown kind"), std::string::npos);
}

TEST(ParseSpec, CollectsEveryProblem) {
  const auto p = problems_of(
      R"({"kind":"t1_tower","H":{"kind":"table","path":"missing.tbl"},"p":6,"n":-1,"extra":true})");
  EXPECT_EQ(p.size(), 4u);  // missing file, p not prime, no a_gen, n out of range
  const auto q = problems_of(R"({"kind":"direct_product","factors":[{"kind":"cyclic","n":0},{"kind":"heisenberg","p":2}]})");
  EXPECT_EQ(q.size(), 2u);
  EXPECT_NE(q[0].find("/factors/0/n"), std::string::npos);
}

TEST(ParseSpec, SyntaxErrorReportsPosition) {
  try {
    parse_spec("{\n  \"kind\": \"cyclic\",\n  \"n\": ]\n}");
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_EQ(e.code(), Errc::parse_error);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseSpec, TowersAndFinitePlacement) {
  EXPECT_FALSE(problems_of(R"({"kind":"quotient_tower","tower":{"kind":"cyclic","n":3},"normal":[]})").empty());
  EXPECT_FALSE(problems_of(R"({"kind":"t1_tower","H":{"kind":"prufer_tower","p":2},"p":2,"a_gen":"0","n":0})").empty());
  EXPECT_FALSE(problems_of(R"({"kind":"t2_tower","base":{"kind":"prufer_tower","p":3},"y":"1/3","m":1})").empty());
}

TEST(ParseSpec, UnknownElementIsReportedAtBuild) {
  const auto doc = parse_spec(R"({"kind":"t1_tower","H":{"kind":"table","path":"h27.tbl"},"p":3,"a_gen":"zz","n":1})", kData);
  try {
    build(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_element);
    EXPECT_NE(std::string(e.what()).find("/a_gen"), std::string::npos);
  }
}

TEST(RunCommand, EtaOnQuaternionTower) {
  CommandOptions o;
  o.element = "a";
  const auto r = run("eta", kData / "towers/quaternion.json", o);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_TRUE(r.report["result"]["stabilized"].get<bool>());
  EXPECT_EQ(r.report["result"]["stable_set"].size(), 1u);
  EXPECT_EQ(r.report["result"]["certificate"]["level"], 2);
}

TEST(RunCommand, EtaOnFiniteGroup) {
  CommandOptions o;
  o.element = "c";
  const auto r = run("eta", kData / "corpus/heis27.json", o);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report["result"]["size"], 25);  // all but c and c^2 (exponent 3)
}

TEST(RunCommand, LemmaSuitesOnCorpus) {
  for (const char* suite : {"3.1", "3.2", "3.3", "3.8", "3.9"}) {
    CommandOptions o;
    o.suite = suite;
    const auto r = run("lemmas", kData / "corpus", o);
    EXPECT_EQ(r.exit_code, kExitOk) << suite;
    EXPECT_GE(r.report["result"]["groups"].size(), 12u);
  }
}

TEST(RunCommand, KEstimateOnAmalgamFixture) {
  const auto r = run("k-estimate", kData / "towers/t1_heis27.json");
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_TRUE(r.report["result"]["theory"]["agrees"].get<bool>());
  for (const auto& e : r.report["result"]["estimate"]) EXPECT_TRUE(e.get<std::string>().starts_with("e|"));
}

TEST(RunCommand, TheoryDisagreementExitsWithTwo) {
  CommandOptions o;
  o.window = 1;  // every element "stabilizes" at birth
  o.max_level = 3;
  const auto r = run("k-estimate", kData / "towers/quaternion.json", o);
  EXPECT_EQ(r.exit_code, kExitDisagreement);
}

TEST(RunCommand, KEstimateOnFiniteGroupReportsDegeneracy) {
  const auto r = run("k-estimate", kData / "corpus/q8.json");
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report["result"]["k"].size(), 8u);
  EXPECT_NE(r.report["result"]["warning"].get<std::string>().find("degenerate"), std::string::npos);
}

TEST(RunCommand, ReduceAndCensus) {
  CommandOptions o;
  o.level = 5;
  const auto r = run("reduce-t2", kData / "towers/t2_m2.json", o);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report["result"]["trace"]["steps"].size(), 2u);
  CommandOptions c;
  c.depth = 3;
  const auto census = run("omega1-census", {}, c);
  EXPECT_EQ(census.exit_code, kExitOk);
  EXPECT_EQ(census.report["result"]["omega1_order"], 128);
}

TEST(RunCommand, EmitTableRoundTrips) {
  const auto out = std::filesystem::temp_directory_path() / "rootset_emit_q16.tbl";
  CommandOptions o;
  o.out = out.string();
  o.level = 3;
  const auto r = run("emit-table", kData / "towers/quaternion.json", o);
  ASSERT_EQ(r.exit_code, kExitOk);
  const auto t = read_table_file(out.string());
  EXPECT_EQ(t.order(), 16u);
  EXPECT_TRUE(t.find("x*1/8"));
  std::filesystem::remove(out);
}

TEST(RunCommand, InputErrorsExitWithOne) {
  CommandOptions o;
  o.element = "nonsense";
  const auto r = run("eta", kData / "towers/quaternion.json", o);
  EXPECT_EQ(r.exit_code, kExitInputError);
  EXPECT_EQ(r.report["error"]["code"], "unknown-element");
  CommandOptions l;
  l.level = 1;
  EXPECT_EQ(run("reduce-t2", kData / "towers/quaternion.json", l).exit_code, kExitInputError);
  EXPECT_EQ(run("reduce-t2", kData / "corpus/q8.json").exit_code, kExitInputError);
  EXPECT_EQ(run("omega1-census", {}).exit_code, kExitInputError);
}

TEST(RunCommand, ReportsAreDeterministic) {
  CommandOptions o;
  o.element = "x|0";
  const auto a = run("eta", kData / "towers/t1_heis27.json", o).report.dump();
  const auto b = run("eta", kData / "towers/t1_heis27.json", o).report.dump();
  EXPECT_EQ(a, b);
  const auto r = run("eta", kData / "towers/t1_heis27.json", o).report;
  EXPECT_TRUE(r.contains("spec"));
  EXPECT_EQ(r["metadata"]["version"], kVersion);
  EXPECT_FALSE(r["metadata"].contains("timing"));
}

TEST(Binary, ExitCodes) {
  const auto ok = run_binary("eta " + (kData / "towers/quaternion.json").string() + " --element a --canonical");
  EXPECT_EQ(ok.exit_code, 0);
  EXPECT_EQ(Json::parse(ok.out)["result"]["stabilized"], true);
  const auto disagree = run_binary("k-estimate " + (kData / "towers/quaternion.json").string() + " --window 1 --max-level 3");
  EXPECT_EQ(disagree.exit_code, 2);
  const auto bad = run_binary("eta " + (kData / "nope.json").string() + " --element a");
  EXPECT_EQ(bad.exit_code, 1);
  EXPECT_EQ(Json::parse(bad.out)["error"]["code"], "parse-error");
  const auto census = run_binary("omega1-census --depth 2 --canonical --indent -1");
  EXPECT_EQ(census.exit_code, 0);
  EXPECT_EQ(census.out, run_binary("omega1-census --depth 2 --canonical --indent -1").out);
}
