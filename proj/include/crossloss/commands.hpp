#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace crossloss::cli {

using nlohmann::json;

/// Subcommand names in the order they are listed by the tool.
const std::vector<std::string>& command_names();

/// Runs one subcommand on a merged configuration (file values overridden by
/// flags). Machine-readable results go to the files named in the config; a
/// short human summary goes to `out`. Throws crossloss::Error on bad input.
void run(const std::string& command, const json& config, std::ostream& out);

/// `base` with every key of `overrides` replacing it.
json merge(json base, const json& overrides);

/// The config with file-path keys removed; this is what the config hash covers,
/// so moving inputs or outputs does not change output bytes.
json hashed_config(const json& config);

}  // namespace crossloss::cli
