// Command line front end; talks to the library only through the C API.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "vpbwave/vpbwave.h"

namespace {

int report(vpb_status s) {
  std::fprintf(stderr, "error [%s]: %s", vpb_status_name(s), vpb_last_error());
  if (s == VPB_ERR_PARSE) std::fprintf(stderr, " (line %d, column %d)", vpb_last_error_line(), vpb_last_error_column());
  if (s == VPB_ERR_VALIDATION && *vpb_last_error_key()) std::fprintf(stderr, " (key %s)", vpb_last_error_key());
  std::fprintf(stderr, "\n");
  return vpb_status_is_config_error(s) ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite wave laboratory for the bipolar Vlasov-Poisson-Boltzmann system"};
  app.set_version_flag("--version", std::string(vpb_version()));
  app.require_subcommand(1);

  std::string config, out = "out";
  std::uint64_t seed = 0;
  bool emit = false;
  for (const char* name : {"riemann", "ansatz", "simulate", "kinetic-check", "fit"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario");
    sub->add_option("--config", config, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_flag("--print-config", emit, "print the effective configuration and exit");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string scenario = app.get_subcommands().front()->get_name();

  vpb_config* cfg = nullptr;
  vpb_status s = config.empty() ? vpb_config_default(&cfg) : vpb_config_load(config.c_str(), &cfg);
  if (s != VPB_OK) return report(s);
  s = vpb_config_set_scenario(cfg, scenario.c_str());
  if (s == VPB_OK && app.get_subcommands().front()->count("--seed") > 0) s = vpb_config_set_seed(cfg, seed);
  if (s != VPB_OK) {
    vpb_config_free(cfg);
    return report(s);
  }
  if (emit) {
    char* text = nullptr;
    s = vpb_config_emit(cfg, &text);
    vpb_config_free(cfg);
    if (s != VPB_OK) return report(s);
    std::fputs(text, stdout);
    vpb_string_free(text);
    return 0;
  }
  char* summary = nullptr;
  s = vpb_run(cfg, out.c_str(), &summary);
  vpb_config_free(cfg);
  if (s != VPB_OK) return report(s);
  std::fputs(summary, stdout);
  vpb_string_free(summary);
  return 0;
}
