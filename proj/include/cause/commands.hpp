#pragma once

#include <iosfwd>

#include "cause/config.hpp"

namespace cause {

// Subcommand bodies behind the CLI. Failures surface as cause::Error;
// the binary maps error kinds onto exit codes.
void cmd_prepare(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg);
void cmd_simulate(const RunConfig& cfg, std::ostream& out);

}  // namespace cause
