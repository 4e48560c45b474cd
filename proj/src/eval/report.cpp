#include "toxblend/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace toxblend::eval {

std::string format_number(std::optional<double> v, int decimals) {
  if (!v || std::isnan(*v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *v);
  std::string s(buf);
  if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.000000"
  return s;
}

namespace {

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) out += (i ? "," : "") + std::to_string(seeds[i]);
  return out;
}

std::string format_point(const CurvePoint& p, bool with_hi) {
  std::string s = format_number(p.lo);
  if (with_hi) s += "\t" + format_number(p.hi);
  return s + "\t" + std::to_string(p.count) + "\t" + format_number(p.auc) + "\t" + std::to_string(p.targets_used) + "\t" +
         std::to_string(p.targets_skipped);
}

struct Row {
  std::string model;
  std::string features;
  std::string member;  // name matched against report models
};

std::vector<Row> table_rows(std::span<const EvalReport> reports) {
  std::vector<Row> rows{{"mlp", "pld", "mlp-pld"},         {"mlp", "fingerprint", "mlp-fingerprint"},
                        {"mlp", "ngram", "mlp-ngram"},     {"gbm", "pld", "gbm-pld"},
                        {"gbm", "fingerprint", "gbm-fingerprint"}, {"gbm", "ngram", "gbm-ngram"},
                        {"gcn", "graph", "gcn-graph"},     {"dcnn", "graph", "dcnn-graph"},
                        {"dcnnr", "graph", "dcnnr-graph"}};
  auto known = [&](const std::string& m) {
    return m == kAverageModel || m == kBlendModel ||
           std::any_of(rows.begin(), rows.end(), [&](const Row& r) { return r.member == m; });
  };
  for (const auto& rep : reports) {
    for (const auto& s : rep.summary()) {
      if (!known(s.model)) {
        const auto dash = s.model.find('-');
        rows.push_back({s.model.substr(0, dash), dash == std::string::npos ? "" : s.model.substr(dash + 1), s.model});
      }
    }
  }
  rows.push_back({kAverageModel, "", kAverageModel});
  rows.push_back({kBlendModel, "", kBlendModel});
  return rows;
}

}  // namespace

std::string format_table(std::span<const EvalReport> reports) {
  std::vector<std::string> datasets;
  for (const auto& r : reports) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
  }
  const dataset::SplitStrategy strategies[] = {dataset::SplitStrategy::Index, dataset::SplitStrategy::Random,
                                               dataset::SplitStrategy::Scaffold};
  std::ostringstream out;
  out << "model\tfeatures";
  for (const auto& d : datasets) {
    for (auto s : strategies) out << "\t" << d << "/" << dataset::strategy_name(s);
  }
  out << "\n";
  // Summaries computed once per report.
  std::vector<std::vector<ModelSummary>> summaries;
  for (const auto& r : reports) summaries.push_back(r.summary());
  for (const auto& row : table_rows(reports)) {
    out << row.model << "\t" << row.features;
    for (const auto& d : datasets) {
      for (auto s : strategies) {
        std::optional<double> cell;
        for (std::size_t i = 0; i < reports.size(); ++i) {
          if (reports[i].dataset != d || reports[i].strategy != s) continue;
          for (const auto& m : summaries[i]) {
            if (m.model == row.member) cell = m.mean;
          }
        }
        out << "\t" << format_number(cell, 3);
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string format_report(const EvalReport& r) {
  std::ostringstream out;
  out << "# toxblend-eval-report\tv1\n";
  out << "# dataset\t" << r.dataset << "\n";
  out << "# strategy\t" << dataset::strategy_name(r.strategy) << "\n";
  out << "# seeds\t" << join_seeds(r.seeds) << "\n";
  out << "# config_checksum\t" << r.config_checksum << "\n";
  out << "# aggregation\tmean over targets per seed, then mean and sample sd over seeds\n";

  if (!r.rows.empty()) {
    out << "\n[auc]\nseed\tfold\tmodel\ttarget\tauc\n";
    for (const auto& row : r.rows) {
      out << row.seed << "\t" << row.fold << "\t" << row.model << "\t" << row.target << "\t" << format_number(row.auc) << "\n";
    }

    out << "\n[summary]\nmodel\tseeds\tmean_auc\tsd_auc\tskipped_targets\n";
    for (const auto& s : r.summary()) {
      out << s.model << "\t" << s.seed_means.size() << "\t" << format_number(s.mean) << "\t" << format_number(s.sd) << "\t"
          << s.skipped << "\n";
    }

    out << "\n[table]\n" << format_table(std::span<const EvalReport>(&r, 1));

    out << "\n[target_auc]\nmodel\ttarget\tauc\n";
    for (const auto& s : r.summary()) {
      for (const auto& t : r.targets) out << s.model << "\t" << t << "\t" << format_number(r.target_auc(s.model, t)) << "\n";
    }
  }

  if (!r.correlation_members.empty()) {
    out << "\n[correlation]\nmember";
    for (const auto& m : r.correlation_members) out << "\t" << m;
    out << "\n";
    for (std::size_t a = 0; a < r.correlation_members.size(); ++a) {
      out << r.correlation_members[a];
      for (std::size_t b = 0; b < r.correlation_members.size(); ++b) {
        const bool has = static_cast<Eigen::Index>(a) < r.correlation.rows();
        out << "\t"
            << format_number(has ? std::optional<double>(r.correlation(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)))
                                 : std::nullopt);
      }
      out << "\n";
    }
  }

  if (!r.reliability.empty()) {
    out << "\n[reliability]\nseed\tmodel\tmin_distance\tcount\tauc\ttargets_used\ttargets_skipped\n";
    for (const auto& c : r.reliability) out << c.seed << "\t" << c.model << "\t" << format_point(c.point, false) << "\n";
  }
  if (!r.complexity.empty()) {
    out << "\n[complexity]\nseed\tmodel\tlo\thi\tcount\tauc\ttargets_used\ttargets_skipped\n";
    for (const auto& c : r.complexity) out << c.seed << "\t" << c.model << "\t" << format_point(c.point, true) << "\n";
  }
  if (!r.importance.empty()) {
    out << "\n[importance]\nmodel\tfeature\tk\tgroup\tdegradation";
    const auto folds = r.importance.front().importance.per_fold.size();
    for (std::size_t j = 0; j < folds; ++j) out << "\tfold_" << (j + 1);
    out << "\n";
    for (const auto& i : r.importance) {
      std::string group;
      for (std::size_t g = 0; g < i.importance.group.size(); ++g) group += (g ? "," : "") + std::to_string(i.importance.group[g]);
      out << i.model << "\t" << i.feature << "\t" << i.k << "\t" << (group.empty() ? "-" : group) << "\t"
          << format_number(i.importance.degradation);
      for (double d : i.importance.per_fold) out << "\t" << format_number(d);
      out << "\n";
    }
  }
  return out.str();
}

ReportHeader parse_report_header(const std::string& text) {
  ReportHeader h;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.starts_with("# ")) {
      if (line.empty()) continue;
      break;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    h.fields[line.substr(2, tab - 2)] = line.substr(tab + 1);
  }
  if (!h.fields.count("toxblend-eval-report")) throw DataError("not a toxblend evaluation report");
  return h;
}

std::map<std::string, std::string> parse_target_aucs(const std::string& text, const std::string& model) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  bool inside = false, header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.starts_with("[")) {
      inside = line == "[target_auc]";
      header = inside;
      continue;
    }
    if (!inside || line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream cells(line);
    std::string m, target, auc;
    std::getline(cells, m, '\t');
    std::getline(cells, target, '\t');
    std::getline(cells, auc, '\t');
    if (m == model) out[target] = auc;
  }
  return out;
}

}  // namespace toxblend::eval
