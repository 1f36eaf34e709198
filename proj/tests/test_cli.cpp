#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "sonic_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(SONIC_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write_cfg(const std::string& name, const std::string& text) {
  fs::create_directories(kScratch);
  const fs::path p = kScratch / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("all writes every artifact and a manifest") {
  const fs::path out = kScratch / "all";
  fs::remove_all(out);
  CHECK(run("all --out " + out.string()) == 0);
  for (const char* f : {"trace.csv", "mesh.csv", "field.csv", "diagnostics.json", "verify.json",
                        "manifest.txt", "timestamp.txt"}) {
    INFO(f);
    CHECK(fs::exists(out / f));
  }
  const std::string m = slurp(out / "manifest.txt");
  CHECK(m.find("config_sha256 = ") != std::string::npos);
  CHECK(m.find("verify.json ") != std::string::npos);
  CHECK(slurp(out / "trace.csv").rfind("k,xi,eta,r,theta,p,R,S\n", 0) == 0);
}

TEST_CASE("manifest is reproducible") {
  const fs::path a = kScratch / "ra", b = kScratch / "rb";
  CHECK(run("march --out " + a.string()) == 0);
  CHECK(run("march --out " + b.string()) == 0);
  const std::string ma = slurp(a / "manifest.txt"), mb = slurp(b / "manifest.txt");
  // the output directory is part of the hashed config, artifacts are not
  CHECK(ma.substr(ma.find("[artifacts]")) == mb.substr(mb.find("[artifacts]")));
  CHECK(slurp(a / "field.csv") == slurp(b / "field.csv"));
}

TEST_CASE("config errors exit 2") {
  CHECK(run("trace --config " + (kScratch / "missing.cfg").string()) == 2);
  CHECK(run("trace --config " + write_cfg("bad.cfg", "p1 = -2\nfoo = 1\n").string()) == 2);
  CHECK(run("trace --config " + write_cfg("inv.cfg", "p1 = -1\np4 = -2\n").string()) == 2);
  CHECK(run("trace --refine 0 --out " + (kScratch / "x").string()) == 2);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("solver failure exits 3") {
  const std::string out = " --out " + (kScratch / "f").string();
  const fs::path a = write_cfg("fail.cfg", "p1 = -2\np4 = -1\nnode_max_iter = 1\n");
  CHECK(run("solve --config " + a.string() + out) == 3);
  // too coarse: the corrector leaves the hyperbolic region
  const fs::path b = write_cfg("coarse.cfg",
                               "p1 = -2\np4 = -1\nn_plus = 8\nn_minus = 8\nnr = 16\n"
                               "t_min_factor = 0.0099\ndt_ratio = 0.3\n");
  CHECK(run("march --config " + b.string() + out) == 3);
}

TEST_CASE("strict violations exit 4") {
  // |p4 - p1| = 1 > kappa |p1| = 0.2
  const fs::path cfg = write_cfg("strict.cfg", "p1 = -2\np4 = -1\nkappa = 0.1\n");
  const std::string out = " --out " + (kScratch / "s").string();
  CHECK(run("diagnose --config " + cfg.string() + out) == 0);
  CHECK(run("diagnose --strict --config " + cfg.string() + out) == 4);
  CHECK(run("diagnose --strict" + out) == 0);
}
