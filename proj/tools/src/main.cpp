#include <iostream>

#include "fairshift/error.hpp"
#include "options.hpp"

int main(int argc, char** argv) {
  using namespace fairshift::cli;
  CLI::App app{"fairshift: fairness audits under injected data bias"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FAIRSHIFT_VERSION);

  AuditOptions audit;
  VerifyOptions verify;
  SynthOptions synth;
  auto* audit_cmd = add_audit_command(app, audit);
  auto* verify_cmd = add_verify_command(app, verify);
  auto* synth_cmd = add_synth_command(app, synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (audit_cmd->parsed()) {
      apply_config_file(*audit_cmd, audit.config);
      return run_audit_command(audit, *audit_cmd);
    }
    if (verify_cmd->parsed()) {
      apply_config_file(*verify_cmd, verify.config);
      return run_verify_command(verify, *verify_cmd);
    }
    apply_config_file(*synth_cmd, synth.config);
    return run_synth_command(synth, *synth_cmd);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
