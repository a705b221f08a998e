#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "pinnreg/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "pinnreg_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(PINNREG_CLI_PATH) + " " + args + " > " + (kRoot / "stdout.txt").string() +
                          " 2> " + (kRoot / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Relative path -> contents for every file under dir.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
  return out;
}

const char* kConfig = R"([problem]
kind = burgers

[reference]
resolution = 64
dt = 1e-3
snapshots = 11

[network]
blocks = 1
layers_per_block = 2
width = 8

[train]
epochs = 20
seed = 3
interior = 64
initial = 16
boundary = 8

[regulator]
kind = sparse
fraction = 0.05

[landscape]
resolution = 5
half_range = 0.5
interior = 128
initial = 16
boundary = 16
)";

}  // namespace

TEST_CASE("reruns of the same configuration give identical artifacts") {
  fs::remove_all(kRoot);
  fs::create_directories(kRoot);
  pinnreg::io::write_text(kRoot / "run.ini", kConfig);
  const std::string out = (kRoot / "run").string();
  const std::string train = "train -c " + (kRoot / "run.ini").string() + " -o " + out;

  REQUIRE(run(train) == 0);
  CHECK(slurp(kRoot / "stdout.txt").find("relative L2") != std::string::npos);
  REQUIRE(run("landscape " + out) == 0);
  REQUIRE(run("evaluate " + out) == 0);
  const auto first = tree(out);
  for (const char* f : {"config.ini", "manifest.json", "history.csv", "regulator.csv", "checkpoint/checkpoint.json",
                        "checkpoint/checkpoint.bin", "fields/reference/manifest.json", "fields/pinn/manifest.json",
                        "landscape/grid.csv", "landscape/meta.json"})
    CHECK_MESSAGE(first.count(f) == 1, f);

  fs::remove_all(out);
  REQUIRE(run(train) == 0);
  REQUIRE(run("landscape " + out) == 0);
  REQUIRE(run("evaluate " + out) == 0);
  const auto second = tree(out);
  CHECK(first.size() == second.size());
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    REQUIRE_MESSAGE(it != second.end(), name);
    CHECK_MESSAGE(it->second == bytes, name);
  }

  // The stored effective configuration reproduces the run.
  const auto rerun = (kRoot / "rerun").string();
  REQUIRE(run("train -c " + out + "/config.ini -o " + rerun) == 0);
  CHECK(slurp(fs::path(rerun) / "checkpoint/checkpoint.bin") == first.at("checkpoint/checkpoint.bin"));
}

TEST_CASE("bad input exits with the configuration status") {
  fs::create_directories(kRoot);
  pinnreg::io::write_text(kRoot / "bad.ini", "[problem]\nkind = burgers\n[train]\nepochs = -4\n");
  CHECK(run("train -c " + (kRoot / "bad.ini").string()) == 2);
  CHECK_FALSE(slurp(kRoot / "stderr.txt").empty());
  pinnreg::io::write_text(kRoot / "typo.ini", "[problem]\nkind = burgers\n[trian]\nepochs = 4\n");
  CHECK(run("train -c " + (kRoot / "typo.ini").string()) == 2);
  CHECK(run("train -p heat") == 2);
  CHECK(run("train --no-such-flag") == 2);
  CHECK(run("landscape " + (kRoot / "absent").string()) == 2);
  CHECK(run("") == 2);
}
