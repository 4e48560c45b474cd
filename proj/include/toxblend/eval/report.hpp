#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "toxblend/eval/cv.hpp"

namespace toxblend::eval {

/// Tab-separated report. Header lines start with "# "; sections start with
/// "[name]" followed by a header row:
///   [auc]          seed fold model target auc      (one row per target x model x seed x fold)
///   [summary]      model seeds mean_auc sd_auc skipped_targets
///   [table]        model features <dataset>/index <dataset>/random <dataset>/scaffold
///   [target_auc]   model target auc                (test AUC averaged over seeds)
///   [correlation]  member <members...>
///   [reliability]  seed model min_distance count auc targets_used targets_skipped
///   [complexity]   seed model lo hi count auc targets_used targets_skipped
///   [importance]   model feature k group degradation fold_1..fold_n
/// Numbers carry 6 decimals (table cells 3); undefined values are "NA".
std::string format_report(const EvalReport& r);

/// Model x (dataset, strategy) grid of test mean AUCs over seeds. Rows run
/// mlp, gbm (pld, fingerprint, ngram), gcn, the external baselines (always
/// NA), prediction averaging and the blend; other members follow.
std::string format_table(std::span<const EvalReport> reports);

/// Fixed-point text with the given decimals, "NA" when nullopt or NaN.
std::string format_number(std::optional<double> v, int decimals = 6);

struct ReportHeader {
  std::map<std::string, std::string> fields;  // dataset, strategy, seeds, config_checksum, ...
};

ReportHeader parse_report_header(const std::string& text);

/// [target_auc] rows of one model as target -> text exactly as written.
std::map<std::string, std::string> parse_target_aucs(const std::string& text, const std::string& model);

}  // namespace toxblend::eval
