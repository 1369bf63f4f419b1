#pragma once

#include <ostream>

#include "config.hpp"

namespace qmotor::cli {

/// Runs cfg.command and writes CSV to `os`. Warnings go to `log`.
void run(const RunConfig& cfg, std::ostream& os, std::ostream& log);

}  // namespace qmotor::cli
