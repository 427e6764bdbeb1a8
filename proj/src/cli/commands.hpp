#pragma once

#include <string>

#include "esgport/cli.hpp"

namespace esgport::commands {

void ingest(const RunConfig& cfg);
void frontier(const RunConfig& cfg);
void tangent(const RunConfig& cfg);
void price_options(const RunConfig& cfg);
void srr(const RunConfig& cfg);
void backtest(const RunConfig& cfg);
void report(const RunConfig& cfg);

}  // namespace esgport::commands
