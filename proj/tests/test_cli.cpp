#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "plumbcalc/cli.hpp"
#include "plumbcalc/cubecx.hpp"

using namespace plumbcalc;
using njson = nlohmann::json;
using nlohmann::literals::operator""_json;

namespace {

struct CliResult {
  int rc = -1;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliResult r;
  r.rc = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

njson parse(const CliResult& r) { return njson::parse(r.out); }

// scoped override of the cell budget variable
struct EnvGuard {
  EnvGuard(const char* k, const char* v) : key(k) { setenv(k, v, 1); }
  ~EnvGuard() { unsetenv(key); }
  const char* key;
};

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("invariants report on the trefoil") {
  CliResult r = run({"invariants", "trefoil"});
  REQUIRE(r.rc == 0);
  CHECK(r.err.empty());
  njson j = parse(r);
  CHECK(j["input"] == "trefoil");
  CHECK(j["command"] == "invariants");
  REQUIRE(j["classes"].size() == 1);
  const njson& c = j["classes"][0];
  CHECK(c["class"] == 0);
  CHECK(c["rep"] == njson({-3, 0, 1}));
  CHECK(c["label"] == "Υ_{K,s}(t)");
  CHECK(c["upsilon"] == R"([["0","0"],["1","-1"],["2","0"]])"_json);
  CHECK(c["tau"] == "1");
  CHECK(c["d"] == "0");
  const njson& z = c["zemke_audit"];
  CHECK(z["window_radius"] == 2);
  CHECK(z["vectors_checked"] == 375);
  CHECK(z["equality_everywhere"] == true);
  REQUIRE(z["breakpoints"].size() == 3);
  for (const auto& bp : z["breakpoints"]) CHECK(bp["equality"] == true);
  CHECK(j["provenance"]["engine"] == version_string());
  CHECK(j["provenance"]["cell_budget"] == max_cells());
  CHECK(j["provenance"]["zemke_window_radius"] == 2);
}

TEST_CASE("invariants report on the unknot") {
  CliResult r = run({"invariants", "unknot"});
  REQUIRE(r.rc == 0);
  njson c = parse(r)["classes"][0];
  CHECK(c["upsilon"] == R"([["0","0"],["2","0"]])"_json);
  CHECK(c["tau"] == "0");
  CHECK(c["d"] == "0");
  CHECK(c["zemke_audit"]["vectors_checked"] == 10);
}

TEST_CASE("class selection") {
  CliResult all = run({"invariants", "rp3"});
  REQUIRE(all.rc == 0);
  njson j = parse(all);
  REQUIRE(j["classes"].size() == 2);
  CHECK(j["classes"][0]["rep"] == njson({-2}));
  CHECK(j["classes"][0]["d"] == "-1/4");
  CHECK(j["classes"][1]["rep"] == njson({0}));
  CHECK(j["classes"][1]["d"] == "1/4");

  CliResult one = run({"invariants", "rp3", "--spinc", "1"});
  REQUIRE(one.rc == 0);
  njson k = parse(one);
  REQUIRE(k["classes"].size() == 1);
  CHECK(k["classes"][0]["class"] == 1);
  CHECK(k["classes"][0]["upsilon"] == R"([["0","1/4"],["2","-1/4"]])"_json);

  CHECK(run({"invariants", "rp3", "--spinc", "5"}).rc == 2);
  CHECK(run({"invariants", "rp3", "--spinc", "x"}).rc == 2);
}

TEST_CASE("invariants rows in csv form") {
  CliResult r = run({"invariants", "trefoil", "--format", "csv"});
  REQUIRE(r.rc == 0);
  CHECK(r.out ==
        "class,t,upsilon,tau,d,t_exact,upsilon_exact\n"
        "0,0,0,1,0,0,0\n"
        "0,1,-1,1,0,1,-1\n"
        "0,2,0,1,0,2,0\n");
}

TEST_CASE("homology report on the trefoil") {
  CliResult r = run({"homology", "trefoil", "--t", "1"});
  REQUIRE(r.rc == 0);
  njson c = parse(r)["classes"][0];
  CHECK(c["stabilized_box"] == 2);
  CHECK(c["upsilon_from_barcode"] == "-1");
  CHECK(!c.contains("note"));
  REQUIRE(c["barcode"].size() == 1);
  CHECK(c["barcode"][0] ==
        R"([{"birth":"-2","length":"inf"},{"birth":"-2","length":"1"}])"_json);
  CHECK(c["reduced"][0] == R"([{"birth":"-2","length":"1"}])"_json);
  CHECK(parse(r)["t"] == "1");
}

TEST_CASE("barcode rows in csv form") {
  CliResult r = run({"homology", "trefoil", "--t", "1", "--format", "csv"});
  REQUIRE(r.rc == 0);
  CHECK(r.out ==
        "class,degree,infinite,birth,length,birth_exact,length_exact\n"
        "0,0,1,-2,,-2,\n"
        "0,0,0,-2,1,-2,1\n");
}

TEST_CASE("an empty starting box is raised to hold the free generator") {
  CliResult r = run({"homology", "unknot", "--t", "1", "--box", "0"});
  REQUIRE(r.rc == 0);
  njson c = parse(r)["classes"][0];
  CHECK(c["note"] == "box 0 holds no edges; raised to 1");
  CHECK(c["stabilized_box"] >= 1);
  CHECK(c["upsilon_from_barcode"] == "0");
}

TEST_CASE("plot merges breakpoints into the sample grid") {
  CliResult tre = run({"plot", "trefoil", "--t-grid", "2"});
  REQUIRE(tre.rc == 0);
  CHECK(tre.out ==
        "t,upsilon,class,t_exact,upsilon_exact\n"
        "0,0,0,0,0\n"
        "0.5,-0.5,0,1/2,-1/2\n"
        "1,-1,0,1,-1\n"
        "1.5,-0.5,0,3/2,-1/2\n"
        "2,0,0,2,0\n");

  // the t34 corners at 2/3 and 4/3 are off the grid and still show up
  CliResult t34 = run({"plot", "t34", "--t-grid", "2"});
  REQUIRE(t34.rc == 0);
  std::istringstream lines(t34.out);
  std::string line;
  std::vector<std::string> exact;
  while (std::getline(lines, line)) {
    size_t comma = line.rfind(',', line.rfind(',') - 1);
    exact.push_back(line.substr(comma + 1));
  }
  REQUIRE(exact.size() == 8);
  CHECK(exact[0] == "t_exact,upsilon_exact");
  CHECK(exact[2] == "1/2,-3/2");
  CHECK(exact[3] == "2/3,-2");
  CHECK(exact[5] == "4/3,-2");
  CHECK(exact[7] == "2,0");

  CHECK(run({"plot", "trefoil", "--t-grid", "0"}).rc == 2);
}

TEST_CASE("surgery verification over the command line") {
  CliResult pass = run({"verify", "chain22", "--vertex", "v", "--t", "2/3", "--window", "8",
                        "--qmax", "10"});
  REQUIRE(pass.rc == 0);
  njson j = parse(pass);
  CHECK(j["fixture"] == "chain22");
  CHECK(j["window"] == 8);
  REQUIRE(j["checks"].size() == 9);
  for (const auto& c : j["checks"]) CHECK(c["pass"] == true);

  CliResult csv = run({"verify", "chain22", "--vertex", "v", "--t", "2/3", "--window", "8",
                       "--qmax", "10", "--format", "csv"});
  REQUIRE(csv.rc == 0);
  CHECK(csv.out.rfind("check,pass,detail\n", 0) == 0);

  // a window too thin for the cube cross-check is a failed check, not a crash
  CliResult thin = run({"verify", "chain22", "--vertex", "v", "--t", "2/3", "--window", "6",
                        "--qmax", "10"});
  CHECK(thin.rc == 5);
  njson tj = parse(thin);
  bool failed_one = false;
  for (const auto& c : tj["checks"])
    if (c["pass"] == false) failed_one = true;
  CHECK(failed_one);

  CHECK(run({"verify", "rp3", "--vertex", "v", "--t", "0"}).rc == 2);
  CHECK(run({"verify", "trefoil", "--vertex", "zz", "--t", "0"}).rc == 2);
  CHECK(run({"verify", "trefoil", "--vertex", "a"}).rc == 2);  // --t is required
}

TEST_CASE("the fixture pack lists itself") {
  CliResult r = run({"fixtures", "list"});
  REQUIRE(r.rc == 0);
  int lines = 0;
  std::istringstream is(r.out);
  std::string line;
  bool trefoil = false, twobad = false;
  while (std::getline(is, line)) {
    ++lines;
    if (line.rfind("trefoil ", 0) == 0) trefoil = true;
    if (line.rfind("twobad ", 0) == 0) twobad = true;
  }
  CHECK(lines == 9);
  CHECK(trefoil);
  CHECK(twobad);
  CHECK(run({"fixtures", "badaction"}).rc == 2);
}

TEST_CASE("bad input and bad parameters exit with two") {
  CliResult r = run({"invariants", "nosuch"});
  CHECK(r.rc == 2);
  CHECK(r.err.find("no such file or fixture") != std::string::npos);
  CHECK(run({"homology", "trefoil", "--t", "5/2"}).rc == 2);
  CHECK(run({"homology", "trefoil"}).rc == 2);  // --t is required
  CHECK(run({"nonsense"}).rc == 2);
}

TEST_CASE("an indefinite form exits with three") {
  std::filesystem::path p = temp_file("plumbcalc_posdef.plumb");
  std::ofstream(p) << "a 1\nv0 *\nedges:\nv0 a\n";
  CliResult r = run({"invariants", p.string()});
  CHECK(r.rc == 3);
  CHECK(r.err.find("not negative definite") != std::string::npos);
  std::filesystem::remove(p);
}

TEST_CASE("a tiny cell budget exits with four") {
  EnvGuard guard("PLUMBCALC_MAX_CELLS", "50");
  CliResult r = run({"homology", "trefoil", "--t", "1"});
  CHECK(r.rc == 4);
  CHECK(r.err.find("PLUMBCALC_MAX_CELLS") != std::string::npos);
}

TEST_CASE("reports are byte identical across runs") {
  CHECK(run({"invariants", "t34"}).out == run({"invariants", "t34"}).out);
  CHECK(run({"homology", "chain222", "--t", "2/3"}).out ==
        run({"homology", "chain222", "--t", "2/3"}).out);
  CHECK(run({"plot", "doublecover"}).out == run({"plot", "doublecover"}).out);
}

TEST_CASE("a report file carries the same bytes as stdout") {
  std::filesystem::path p = temp_file("plumbcalc_out.json");
  CliResult direct = run({"invariants", "rp3"});
  CliResult filed = run({"invariants", "rp3", "--out", p.string()});
  REQUIRE(filed.rc == 0);
  CHECK(filed.out.empty());
  std::ifstream in(p, std::ios::binary);
  std::stringstream body;
  body << in.rdbuf();
  CHECK(body.str() == direct.out);
  std::filesystem::remove(p);
}
