#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "facthist/distributions.hpp"
#include "facthist/io.hpp"

namespace fs = std::filesystem;
using facthist::Json;

namespace {

struct Run {
  int status = -1;
  std::string out;
  Json json() const { return Json::parse(out); }
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + FACTHIST_CLI + std::string(" ") + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

// Scratch directory holding the canonical XOR space and three small DAGs.
struct Files {
  fs::path dir;
  Files() {
    dir = fs::temp_directory_path() / ("facthist_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    write("xor.json", R"({"factors":[{"name":"u0","domain":["0","1"]},{"name":"u1","domain":["0","1"]}],
                          "variables":{"XOR":{"codomain":["0","1"],"table":[0,1,1,0]},
                                       "K":{"codomain":["k"],"table":[0,0,0,0]}}})");
    write("chain.json", R"({"nodes":[{"name":"A","domain":2},{"name":"B","domain":2},{"name":"C","domain":2}],
                            "edges":[["A","B"],["B","C"]]})");
    write("collider.json", R"({"nodes":[{"name":"A","domain":2},{"name":"B","domain":2},{"name":"C","domain":2}],
                               "edges":[["A","C"],["B","C"]]})");
    write("single.json", R"({"nodes":[{"name":"A","domain":2}],"edges":[]})");
    write("broken.json", R"({"factors": [)");
  }
  ~Files() { fs::remove_all(dir); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("cli history") {
  Files f;
  auto r = run("history " + f("xor.json") + " --var u0 --unconditional");
  CHECK(r.status == 0);
  CHECK(r.json() == Json::parse(R"({"*":["u0"]})"));

  r = run("history " + f("xor.json") + " --var u0 --given XOR");
  CHECK(r.status == 0);
  CHECK(r.json() == Json::parse(R"({"0":["u0","u1"],"1":["u0","u1"]})"));

  r = run("history " + f("xor.json") + " --var K --given XOR");
  CHECK(r.json() == Json::parse(R"({"0":[],"1":[]})"));

  r = run("history " + f("xor.json") + " --var XOR --unconditional");
  CHECK(r.json() == Json::parse(R"({"*":["u0","u1"]})"));

  CHECK(run("history " + f("xor.json") + " --var u0").status == 2);
  CHECK(run("history " + f("xor.json") + " --var nope --unconditional").status == 2);
  CHECK(run("history " + f("broken.json") + " --var u0 --unconditional").status == 2);
  CHECK(run("history " + f("missing.json") + " --var u0 --unconditional").status == 2);
  CHECK(run("history " + f("xor.json") + " --var u0 --unconditional", "FACTHIST_MAX_OUTCOMES=3").status == 3);
}

TEST_CASE("cli indep") {
  Files f;
  auto r = run("indep " + f("xor.json") + " u0 u1");
  CHECK(r.status == 0);
  CHECK(r.json()["independent"] == true);

  r = run("indep " + f("xor.json") + " u0 u1 --given XOR");
  CHECK(r.status == 1);
  CHECK(r.json()["overlaps"] == Json::parse(R"({"0":["u0","u1"],"1":["u0","u1"]})"));

  CHECK(run("indep " + f("xor.json") + " K K").status == 0);
  CHECK(run("indep " + f("xor.json") + " u0 XOR").status == 1);
}

TEST_CASE("cli dsep") {
  Files f;
  CHECK(run("dsep " + f("chain.json") + " A C --given B").status == 0);
  CHECK(run("dsep " + f("chain.json") + " A C").status == 1);
  CHECK(run("dsep " + f("collider.json") + " A B --given C").status == 1);
  const auto r = run("dsep " + f("collider.json") + " A B");
  CHECK(r.status == 0);
  CHECK(r.json()["d_separated"] == true);
  CHECK(run("dsep " + f("collider.json") + " A Q").status == 2);
  CHECK(run("dsep " + f("collider.json") + " A B --given A").status == 2);
}

TEST_CASE("cli embed round-trips and matches dsep") {
  Files f;
  auto r = run("embed " + f("single.json") + " -o " + f("single_space.json"));
  CHECK(r.status == 0);
  CHECK(r.json()["factors"] == 1);
  CHECK(r.json()["variables"] == 1);

  r = run("embed " + f("collider.json") + " -o " + f("col_space.json"));
  CHECK(r.status == 0);
  CHECK(r.json()["outcomes"] == 64);
  const auto model = facthist::space_from_json(facthist::read_json_file(f("col_space.json")));
  CHECK(model.space.outcome_count() == 64);
  CHECK(facthist::space_from_json(facthist::space_to_json(model)) == model);

  // indep on the embedding agrees with dsep on the graph
  const std::array<std::array<const char*, 3>, 4> queries{{{"A", "B", ""}, {"A", "B", "C"}, {"A", "C", ""}, {"B", "C", "A"}}};
  for (const auto& [x, y, z] : queries) {
    const std::string given = *z ? std::string(" --given ") + z : "";
    const std::string given_x = *z ? std::string(" --given X_") + z : "";
    const int d = run("dsep " + f("collider.json") + " " + x + " " + y + given).status;
    const int s = run("indep " + f("col_space.json") + " X_" + x + " X_" + y + given_x).status;
    CHECK(d == s);
  }

  CHECK(run("embed " + f("collider.json") + " -o " + f("tiny.json"), "FACTHIST_MAX_OUTCOMES=10").status == 3);
}

TEST_CASE("cli verify and witness") {
  Files f;
  auto r = run("verify " + f("xor.json") + " u0 u1 --samples 50");
  CHECK(r.status == 0);
  CHECK(r.json()["mode"] == "soundness");
  CHECK(r.json()["holds"] == 50);

  r = run("verify " + f("xor.json") + " u0 u1 --samples 0");
  CHECK(r.status == 0);
  CHECK(r.json()["samples"] == 0);
  CHECK(r.json()["passed"] == true);

  r = run("verify " + f("xor.json") + " u0 XOR");
  CHECK(r.status == 0);
  CHECK(r.json()["mode"] == "witness");
  const auto w = facthist::distribution_from_json(r.json()["witness"]);
  CHECK(w.is_positive());
  const auto v = r.json()["violation"];
  CHECK(v["joint"] != v["product"]);

  r = run("witness " + f("xor.json") + " u0 u1 --given XOR -o " + f("w.json"));
  CHECK(r.status == 0);
  CHECK(r.json()["found"] == true);
  CHECK(facthist::distribution_from_json(facthist::read_json_file(f("w.json"))) ==
        facthist::distribution_from_json(r.json()["distribution"]));

  CHECK(run("witness " + f("xor.json") + " u0 u1").status == 2);
  CHECK(run("verify " + f("xor.json") + " u0 u1 --samples nope").status == 2);
}

TEST_CASE("cli axioms") {
  auto r = run("axioms --iters 0");
  CHECK(r.status == 0);
  CHECK(r.json()["failures"] == 0);
  CHECK(r.json()["laws"].empty());

  r = run("axioms --iters 10 --seed 4 --dag");
  CHECK(r.status == 0);
  CHECK(r.json()["failures"] == 0);
  CHECK(r.json()["laws"].contains("dsep_equivalence"));
  CHECK(run("axioms --iters 10 --seed 4 --dag").out == r.out);
  CHECK(run("axioms --max-factors 1").status == 2);
}

TEST_CASE("cli atoms and pretty output") {
  Files f;
  auto r = run("atoms " + f("xor.json") + " --given XOR");
  CHECK(r.status == 0);
  CHECK(r.json()["0"]["atoms"] == Json::parse(R"([["u0","u1"]])"));
  r = run("atoms " + f("xor.json"));
  CHECK(r.json()["*"]["atoms"] == Json::parse(R"([["u0"],["u1"]])"));

  const auto pretty = run("--pretty history " + f("xor.json") + " --var u0 --unconditional");
  CHECK(pretty.status == 0);
  CHECK(pretty.out.find('\n') < pretty.out.size() - 1);
  CHECK(pretty.json() == Json::parse(R"({"*":["u0"]})"));
}
