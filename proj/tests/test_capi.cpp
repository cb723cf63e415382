#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "vpbwave/vpbwave.h"

namespace {

vpb_config* parse(const char* text) {
  vpb_config* c = nullptr;
  REQUIRE(vpb_config_parse(text, &c) == VPB_OK);
  return c;
}

const char* kSmall =
    "[run]\nseed = 5\n"
    "[states]\nleft_v = 1\nleft_u = 0\nleft_theta = 1\nconstruct = true\ndelta = 0.05\nrarefaction_ratio = 0.2\n"
    "[solver]\nh = 0.2\nX = 20\nT = 0.5\n"
    "[perturbation]\nshape = random\n"
    "[output]\ninterval = 0.25\nsnapshot = false\n";

}  // namespace

TEST_CASE("status and version") {
  CHECK(std::strlen(vpb_version()) > 0);
  CHECK(std::string(vpb_status_name(VPB_ERR_PARSE)) == "parse");
  CHECK(vpb_status_is_config_error(VPB_ERR_VALIDATION));
  CHECK_FALSE(vpb_status_is_config_error(VPB_ERR_POSITIVITY));
  CHECK(vpb_set_threads(-1) == VPB_ERR_INVALID_ARGUMENT);
  CHECK(vpb_set_threads(0) == VPB_OK);
}

TEST_CASE("config handles") {
  vpb_config* c = nullptr;
  CHECK(vpb_config_parse("[run]\nseed 3\n", &c) == VPB_ERR_PARSE);
  CHECK(c == nullptr);
  CHECK(vpb_last_error_line() == 2);
  CHECK(vpb_last_error_column() == 1);
  CHECK(vpb_config_parse("[states]\nleft_v = -2\n", &c) == VPB_ERR_VALIDATION);
  CHECK(std::string(vpb_last_error_key()) == "states.left_v");
  CHECK(vpb_config_load("/nonexistent.ini", &c) == VPB_ERR_IO);
  CHECK(vpb_config_parse(nullptr, &c) == VPB_ERR_INVALID_ARGUMENT);

  c = parse(kSmall);
  char* text = nullptr;
  REQUIRE(vpb_config_emit(c, &text) == VPB_OK);
  vpb_config* d = parse(text);
  char* text2 = nullptr;
  REQUIRE(vpb_config_emit(d, &text2) == VPB_OK);
  CHECK(std::string(text) == std::string(text2));
  vpb_string_free(text);
  vpb_string_free(text2);
  CHECK(vpb_config_set_scenario(d, "nonsense") == VPB_ERR_INVALID_ARGUMENT);
  CHECK(vpb_config_set_scenario(d, "kinetic-check") == VPB_OK);
  vpb_config_free(c);
  vpb_config_free(d);
}

TEST_CASE("wave and solver handles") {
  vpb_config* c = parse(kSmall);
  vpb_wave* w = nullptr;
  REQUIRE(vpb_wave_create(c, &w) == VPB_OK);
  double stars[6], s[3];
  CHECK(vpb_wave_stars(w, stars) == VPB_OK);
  CHECK(stars[0] >= 1.0);
  CHECK(vpb_wave_eval(w, -1e4, 1.0, s) == VPB_OK);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[2] == doctest::Approx(1.0));
  vpb_wave_free(w);

  vpb_solver* sv = nullptr;
  REQUIRE(vpb_solver_create(c, &sv) == VPB_OK);
  size_t n = 0;
  CHECK(vpb_solver_size(sv, &n) == VPB_OK);
  CHECK(n == 201);
  CHECK(vpb_solver_step(sv, 10) == VPB_OK);
  double t = 0.0;
  CHECK(vpb_solver_time(sv, &t) == VPB_OK);
  CHECK(t > 0.0);
  std::vector<double> buf(n);
  CHECK(vpb_solver_field(sv, "theta", buf.data(), n) == VPB_OK);
  for (double x : buf) CHECK(x > 0.0);
  CHECK(vpb_solver_field(sv, "theta", buf.data(), n - 1) == VPB_ERR_INVALID_ARGUMENT);
  CHECK(vpb_solver_field(sv, "pressure", buf.data(), n) == VPB_ERR_INVALID_ARGUMENT);
  double d[11];
  CHECK(vpb_solver_diagnostics(sv, d) == VPB_OK);
  CHECK(d[0] == t);
  CHECK(d[3] > 0.0);
  CHECK(vpb_solver_step(sv, -1) == VPB_ERR_INVALID_ARGUMENT);
  vpb_solver_free(sv);
  vpb_config_free(c);
}

TEST_CASE("running scenarios") {
  const auto dir = std::filesystem::temp_directory_path() / "vpbwave_capi_test";
  std::filesystem::remove_all(dir);
  vpb_config* c = parse(kSmall);
  REQUIRE(vpb_config_set_scenario(c, "riemann") == VPB_OK);
  char* summary = nullptr;
  REQUIRE(vpb_run(c, dir.string().c_str(), &summary) == VPB_OK);
  const std::string s = summary;
  vpb_string_free(summary);
  CHECK(s.find("\"scenario\": \"riemann\"") != std::string::npos);
  CHECK(s.find("\"version\"") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "summary.json"));

  REQUIRE(vpb_config_set_scenario(c, "simulate") == VPB_OK);
  REQUIRE(vpb_run(c, dir.string().c_str(), nullptr) == VPB_OK);
  CHECK(std::filesystem::exists(dir / "diagnostics.csv"));

  // inadmissible end states surface as a computational error
  vpb_config* bad = parse("[run]\nscenario = riemann\n[states]\nleft_v = 1\nright_v = 0.8\nright_theta = 1.3\n");
  const vpb_status st = vpb_run(bad, dir.string().c_str(), nullptr);
  CHECK(st == VPB_ERR_NO_SOLUTION);
  CHECK(std::strlen(vpb_last_error()) > 0);
  vpb_config_free(bad);
  vpb_config_free(c);
  std::filesystem::remove_all(dir);
}
