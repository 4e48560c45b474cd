#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "toxblend/cli/config.hpp"

namespace toxblend::cli {

/// Output layout under config.output:
///   features/featurizers.json, features/<family>.tsv   (first strategy, first seed)
///   splits/<strategy>-seed<k>.tsv
///   models/member-<name>.json, models/featurizers.json  (first strategy, first seed)
///   bundle/                                              (blend bundle)
///   reports/<strategy>.tsv, reports/table.tsv
///   importance.tsv, reliability.tsv
/// Every artifact carries the producing configuration checksum.
void cmd_featurize(const RunConfig& c);
void cmd_split(const RunConfig& c);
void cmd_train(const RunConfig& c);
void cmd_blend(const RunConfig& c);
void cmd_evaluate(const RunConfig& c);
void cmd_importance(const RunConfig& c);
void cmd_reliability(const RunConfig& c);

/// Writes one row per (input, target) to out and parse errors to err.
/// Returns false if any input failed to parse.
bool cmd_predict(const std::string& bundle_dir, const std::vector<std::string>& smiles,
                 const std::vector<std::string>& targets, std::ostream& out, std::ostream& err);

std::string split_path(const RunConfig& c, dataset::SplitStrategy s, std::uint64_t seed);
std::string report_path(const RunConfig& c, dataset::SplitStrategy s);

/// Split file: "# config_checksum", "# strategy", "# seed" header lines, then id/fold rows.
void write_split(const std::string& path, const dataset::AssayTable& t, const dataset::SplitAssignment& s,
                 const std::string& checksum);
/// Throws DataError if the file's checksum differs from `checksum` or ids disagree with the table.
dataset::SplitAssignment read_split(const std::string& path, const dataset::AssayTable& t, const std::string& checksum);

/// Runs the command line; returns the process exit code (0 ok, 1 usage or
/// configuration, 2 data, 3 internal).
int run_cli(int argc, char** argv);

}  // namespace toxblend::cli
