#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the runner binary: exit codes and output layout.
// The binary path arrives through the TDR_CLI environment variable (set by
// the ctest registration); the cases are skipped when it is absent.

namespace {

std::string cli_path() {
  const char* p = std::getenv("TDR_CLI");
  return p ? p : "";
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("cli exit codes") {
  if (cli_path().empty()) return;
  SUBCASE("unknown subcommand") {
    CHECK(run("frobnicate") == 2);
  }
  SUBCASE("missing config file, no partial outputs") {
    CHECK(run("orbit --config /nonexistent.json --out cli_test_out") == 3);
    std::ifstream check("cli_test_out");
    CHECK(!check.good());
  }
  SUBCASE("unknown parameter override") {
    CHECK(run("orbit --set bogus=1 --out cli_test_out") == 3);
  }
  SUBCASE("module precondition maps to its own code") {
    CHECK(run("tail --set N=10 --out cli_test_out") == 4);
  }
  SUBCASE("successful orbit run emits the two-point orbit") {
    CHECK(run("orbit --seed 5 --out cli_test_out") == 0);
    const int rc = std::system(
        ("grep -q '\"orbit_size\": 2' cli_test_out/orbit-*/orbit.json"));
    CHECK(WEXITSTATUS(rc) == 0);
    CHECK(std::system("test -f cli_test_out/orbit-*/manifest.json") == 0);
    CHECK(std::system("rm -rf cli_test_out") == 0);
  }
}
