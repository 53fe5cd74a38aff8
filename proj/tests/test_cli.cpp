#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixedfair/cli.hpp"
#include "support.hpp"

using namespace mixedfair;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mixedfair_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content = "") const {
    fs::path p = path / name;
    if (!content.empty()) {
      std::ofstream f(p);
      f << content;
    }
    return p.string();
  }
};

const char* kIntroInstance = R"({
  "agents": 3,
  "goods": [["1/4", "1/4"], ["1/4", "1/4"], ["1/4", "1/4"]],
  "cake": {"breakpoints": ["0", "1"], "densities": [["1/2"], ["1/2"], ["1/2"]]}
})";

const char* kIntroEfm = R"({
  "bundles": [
    {"goods": [], "piece": [["0", "1/2"]]},
    {"goods": [], "piece": [["1/2", "1"]]},
    {"goods": [0, 1], "piece": []}
  ]
})";

}  // namespace

TEST_CASE("cli check: the intro example") {
  TempDir dir;
  std::string inst = dir.file("intro.json", kIntroInstance);
  std::string alloc = dir.file("efm.json", kIntroEfm);

  Run efa = run_cli({"check", "--instance", inst, "--allocation", alloc,
                     "--criterion", "efalpha"});
  CHECK(efa.code == 1);
  json j = json::parse(efa.out);
  CHECK(j["verdict"] == "violated");
  bool found = false;
  for (const auto& w : j["witnesses"])
    if (w["satisfied"] == false && w["agent"] == 0 && w["against"] == 2) {
      found = true;
      CHECK(w["lhs"] == "1/4");
      CHECK(w["rhs"] == "3/8");
    }
  CHECK(found);

  Run efm = run_cli({"check", "--instance", inst, "--allocation", alloc,
                     "--criterion", "efm"});
  CHECK(efm.code == 0);
  CHECK(json::parse(efm.out)["verdict"] == "satisfied");
}

TEST_CASE("cli allocate feeds back through check") {
  TempDir dir;
  testsupport::Rng rng(5050);
  Instance inst = testsupport::random_instance(
      rng, {.n_min = 3, .n_max = 3, .m_min = 4, .m_max = 6, .seg_min = 1, .seg_max = 2});
  std::string inst_path = dir.file("inst.json", serialize_instance(inst));
  std::string out_path = dir.file("alloc.json");
  std::string trace_path = dir.file("trace.json");

  Run alloc = run_cli({"allocate", "--algorithm", "alg1", "--instance", inst_path,
                       "--out", out_path, "--trace", trace_path});
  REQUIRE(alloc.code == 0);
  json aj = json::parse(alloc.out);
  CHECK(aj["queries"]["cut"].get<int>() <= inst.n * inst.n);

  Run chk = run_cli({"check", "--instance", inst_path, "--allocation", out_path,
                     "--criterion", "propalpha"});
  CHECK(chk.code == 0);

  // The emitted allocation re-validates and re-checks to the same verdict.
  std::ifstream back(out_path);
  std::stringstream buf;
  buf << back.rdbuf();
  Allocation parsed = parse_allocation(buf.str(), inst);
  CHECK(validate_allocation(inst, parsed).empty());
  CHECK(check(inst, parsed, Criterion::propalpha()).satisfied);

  std::ifstream tr(trace_path);
  CHECK(tr.good());
  json tj = json::parse(tr);
  CHECK(tj.contains("rounds"));
}

TEST_CASE("cli counterexample exit codes") {
  Run t3 = run_cli({"counterexample", "--template", "t3", "--n", "3", "--c", "1"});
  CHECK(t3.code == 1);
  json j = json::parse(t3.out);
  CHECK(j["satisfiable"] == false);
  CHECK(j["exact"] == true);
  CHECK(j["best_slack"] == "-1/18");

  Run boundary = run_cli({"counterexample", "--template", "t3", "--n", "3", "--c", "9/8"});
  CHECK(boundary.code == 0);

  Run t9 = run_cli({"counterexample", "--template", "t9", "--n", "3", "--eps", "3/10"});
  CHECK(t9.code == 0);
  CHECK(json::parse(t9.out)["ok"] == true);
}

TEST_CASE("cli mnw and mms") {
  TempDir dir;
  std::string inst_path = dir.file("intro.json", kIntroInstance);

  Run mms = run_cli({"mms", "--instance", inst_path, "--agent", "0"});
  CHECK(mms.code == 0);
  // Goods {1/4, 1/4} in separate bundles plus the 1/2 cake water-filled
  // over all three: every bundle reaches 1/3.
  CHECK(json::parse(mms.out)["mms"] == "1/3");

  std::string out_path = dir.file("mnw.json");
  Run mnw = run_cli({"mnw", "--instance", inst_path, "--out", out_path});
  CHECK(mnw.code == 0);
  std::ifstream back(out_path);
  CHECK(back.good());
}

TEST_CASE("cli report renders fractions and decimals") {
  TempDir dir;
  std::string inst = dir.file("intro.json", kIntroInstance);
  std::string alloc = dir.file("efm.json", kIntroEfm);
  Run rep = run_cli({"report", "--instance", inst, "--allocation", alloc,
                     "--criteria", "efm,efalpha"});
  CHECK(rep.code == 1);  // efalpha violated
  CHECK(rep.out.find("VIOLATED") != std::string::npos);
  CHECK(rep.out.find("3/8") != std::string::npos);
  CHECK(rep.out.find("0.375000") != std::string::npos);
  CHECK(rep.out.find("alpha = 1/2") != std::string::npos);
}

TEST_CASE("cli output is byte-identical across runs") {
  TempDir dir;
  std::string inst = dir.file("intro.json", kIntroInstance);
  std::string alloc = dir.file("efm.json", kIntroEfm);
  std::vector<std::string> args = {"check", "--instance", inst, "--allocation", alloc,
                                   "--criterion", "efm"};
  Run first = run_cli(args);
  Run second = run_cli(args);
  CHECK(first.out == second.out);
  CHECK(first.code == second.code);

  Run cx1 = run_cli({"counterexample", "--template", "pm1"});
  Run cx2 = run_cli({"counterexample", "--template", "pm1"});
  CHECK(cx1.out == cx2.out);
}

TEST_CASE("cli usage and validation errors exit with 2") {
  TempDir dir;
  std::string inst = dir.file("intro.json", kIntroInstance);
  std::string alloc = dir.file("efm.json", kIntroEfm);

  CHECK(run_cli({"check", "--instance", inst, "--allocation", alloc,
                 "--criterion", "bogus"}).code == 2);
  CHECK(run_cli({"check", "--instance", dir.file("missing.json"), "--allocation", alloc,
                 "--criterion", "ef"}).code == 2);
  CHECK(run_cli({"allocate", "--algorithm", "nope", "--instance", inst,
                 "--out", dir.file("x.json")}).code == 2);
  CHECK(run_cli({"bogus-subcommand"}).code == 2);

  std::string bad = dir.file("bad.json", R"({"agents": 1, "goods": [["x"]]})");
  Run r = run_cli({"check", "--instance", bad, "--allocation", alloc, "--criterion", "ef"});
  CHECK(r.code == 2);
  CHECK(r.err.find("goods[0][0]") != std::string::npos);
}

TEST_CASE("cli propmm literal flag switches the PM1 verdict") {
  TempDir dir;
  TemplateInstance pm1 = gen_instance(Template::PM1, {});
  std::string inst = dir.file("pm1.json", serialize_instance(pm1.instance));
  Allocation alloc;
  alloc.bundles = {Bundle{{}, PieceSet::full()}, make_bundle({0, 1, 2})};
  std::string alloc_path = dir.file("pm1_alloc.json", serialize_allocation(alloc));

  CHECK(run_cli({"check", "--instance", inst, "--allocation", alloc_path,
                 "--criterion", "propmm"}).code == 0);
  CHECK(run_cli({"check", "--instance", inst, "--allocation", alloc_path,
                 "--criterion", "propmm", "--propmm-literal"}).code == 1);
}
