#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fof/codec.hpp"
#include "fof/geometry.hpp"
#include "test_support.hpp"

#include <cstdlib>
#include <sys/wait.h>

namespace {

struct Run {
  int status = -1;
  std::string out, err;
};

Run run_cli(const std::string& args) {
  static int n = 0;
  const auto out = testing::scratch("cli_out" + std::to_string(n));
  const auto err = testing::scratch("cli_err" + std::to_string(n++));
  const std::string command =
      std::string(FOF_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(command.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, testing::read_bytes(out), testing::read_bytes(err)};
}

std::string path(const char* name) { return testing::scratch(name).string(); }

void check_one_line_error(const Run& r) {
  CHECK(r.status != 0);
  CHECK_FALSE(r.err.empty());
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

}  // namespace

TEST_CASE("encode, decode and metrics from the command line") {
  auto r = run_cli("encode --shape sphere:r=0.6,level=4 --grid 64x64 -N 7 -o " + path("c.fof"));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("warnings") != std::string::npos);
  CHECK(fof::read_fof(path("c.fof")).channels() == 15);

  r = run_cli("decode -i " + path("c.fof") + " -K 64 -o " + path("c.obj"));
  REQUIRE(r.status == 0);
  CHECK_FALSE(fof::load_mesh(path("c.obj")).empty());

  r = run_cli("metrics --pred " + path("c.obj") + " --gt " + path("c.obj") + " --samples 2000 -o " + path("m.csv"));
  REQUIRE(r.status == 0);
  const auto csv = testing::read_bytes(path("m.csv"));
  REQUIRE(csv.rfind("chamfer,p2s,normal_error,sample_count,seed\n0,", 0) == 0);
  CHECK(std::stod(csv.substr(csv.find("\n0,") + 3)) <= 1e-15);
  CHECK(csv.find(",0,2000,0\n") != std::string::npos);
}

TEST_CASE("sweeps and curves write CSV files") {
  const auto dir = testing::scratch("cli_sweeps");
  std::filesystem::create_directories(dir);
  const std::string common = " --shape sphere:r=0.6,level=3 --grid 32x32 -K 32 --samples 2000 --out " + dir.string();
  CHECK(run_cli("ablate-n --orders 3,7" + common).status == 0);
  CHECK(std::filesystem::exists(dir / "ablate_n.csv"));
  CHECK(run_cli("noise-sweep -N 7 --levels 0,0.1" + common).status == 0);
  CHECK(std::filesystem::exists(dir / "noise_sweep.csv"));
  CHECK(run_cli("bench --shape box --grid 32x32 -K 32 --orders 3,7 --repeats 1 --out " + dir.string()).status == 0);
  CHECK(std::filesystem::exists(dir / "bench.csv"));
  CHECK(run_cli("curves --intervals -0.5:0.5 --orders 7,15 --samples 64 -o " + (dir / "c.csv").string()).status == 0);
  CHECK(testing::read_bytes(dir / "c.csv").rfind("z,f_exact,fhat_7,fhat_15\n", 0) == 0);
}

TEST_CASE("error paths exit nonzero with one line on stderr") {
  SUBCASE("missing input file") { check_one_line_error(run_cli("decode -i " + path("absent.fof") + " -o " + path("x.obj"))); }
  SUBCASE("corrupt FOF") {
    testing::write_text(path("bad.fof"), "FOF1 garbage");
    check_one_line_error(run_cli("decode -i " + path("bad.fof") + " -o " + path("x.obj")));
  }
  SUBCASE("empty mesh") {
    testing::write_text(path("empty.obj"), "# nothing\n");
    check_one_line_error(run_cli("encode -i " + path("empty.obj") + " -o " + path("x.fof")));
  }
  SUBCASE("bad grid") { check_one_line_error(run_cli("encode --shape box --grid 1x1 -o " + path("x.fof"))); }
  SUBCASE("bad order") { check_one_line_error(run_cli("encode --shape box -N 0 -o " + path("x.fof"))); }
  SUBCASE("descending orders") {
    check_one_line_error(run_cli("ablate-n --shape box --orders 7,3 --grid 16x16"));
  }
  SUBCASE("unknown shape") { check_one_line_error(run_cli("encode --shape blob -o " + path("x.fof"))); }
  SUBCASE("both mesh and shape") {
    check_one_line_error(run_cli("encode --shape box -i " + path("empty.obj") + " -o " + path("x.fof")));
  }
  SUBCASE("bad intervals") {
    check_one_line_error(run_cli("curves --intervals 0.5:-0.5 -o " + path("x.csv")));
  }
  SUBCASE("unknown subcommand") { CHECK(run_cli("frobnicate").status != 0); }
}

TEST_CASE("all-zero FOF decodes with a warning") {
  fof::write_fof(fof::FofGridf(16, 16, 3), path("zero.fof"));
  const auto r = run_cli("decode -i " + path("zero.fof") + " -K 16 -o " + path("zero.obj"));
  CHECK(r.status == 0);
  CHECK(r.err.find("warning") != std::string::npos);
}
