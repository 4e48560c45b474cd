#include "toxblend/blend/blend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "toxblend/log.hpp"
#include "toxblend/rng.hpp"

namespace toxblend::blend {

namespace {

void check_scores(std::span<const Matrix> scores) {
  if (scores.empty()) throw DataError("empty member list");
  for (std::size_t m = 0; m < scores.size(); ++m) {
    if (scores[m].rows() != scores[0].rows() || scores[m].cols() != scores[0].cols()) {
      throw DataError("member score matrices differ in shape");
    }
    for (Eigen::Index i = 0; i < scores[m].size(); ++i) {
      const double v = scores[m].data()[i];
      if (std::isnan(v)) throw DataError("missing score from member " + std::to_string(m));
      if (v < 0.0 || v > 1.0) throw DataError("member score outside [0, 1]");
    }
  }
}

}  // namespace

double prediction_average(std::span<const double> scores) {
  if (scores.empty()) throw DataError("empty member list");
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

Matrix prediction_average(std::span<const Matrix> member_scores) {
  check_scores(member_scores);
  Matrix out = Matrix::Zero(member_scores[0].rows(), member_scores[0].cols());
  for (const auto& s : member_scores) out += s;
  return out / static_cast<double>(member_scores.size());
}

gbm::GbmConfig BlendConfig::default_gbm() {
  gbm::GbmConfig c;
  c.max_depth = 3;
  c.eta = 0.05;
  c.max_rounds = 2000;
  c.patience = 50;
  return c;
}

nlohmann::json to_json(const BlendConfig& c) {
  return {{"gbm", gbm::to_json(c.gbm)}, {"holdout", c.holdout}, {"seed", c.seed}};
}

BlendConfig blend_config_from_json(const nlohmann::json& j) {
  BlendConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "gbm") {
      // Partial overrides start from the blend defaults.
      nlohmann::json merged = gbm::to_json(BlendConfig::default_gbm());
      merged.update(v);
      c.gbm = gbm::gbm_config_from_json(merged);
    } else if (key == "holdout") {
      c.holdout = v.get<double>();
    } else if (key == "seed") {
      c.seed = v.get<std::uint64_t>();
    } else {
      throw ConfigError("unknown blend config key '" + key + "'");
    }
  }
  if (!(c.holdout > 0.0 && c.holdout < 1.0)) throw ConfigError("blend holdout must lie in (0, 1)");
  return c;
}

gbm::StackedRows stack_member_scores(std::span<const Matrix> scores, const LabelMatrix* labels) {
  check_scores(scores);
  const auto n = scores[0].rows();
  const auto t = scores[0].cols();
  // Molecule-major, target-minor: column m of molecule i holds scores[m](i, :).
  Matrix wide(n * t, static_cast<Eigen::Index>(scores.size()));
  for (std::size_t m = 0; m < scores.size(); ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < t; ++k) wide(i * t + k, static_cast<Eigen::Index>(m)) = scores[m](i, k);
    }
  }
  // Reuse the task stacking: each (molecule, target) pair becomes one
  // pseudo-molecule with its own single-target label.
  LabelMatrix flat(n * t, t);
  flat.setConstant(Label::Missing);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < t; ++k) {
      flat(i * t + k, k) = labels != nullptr ? (*labels)(i, k) : Label::Inactive;
    }
  }
  if (labels != nullptr && (labels->rows() != n || labels->cols() != t)) throw DataError("label shape differs");
  auto rows = gbm::stack_tasks(wide, flat);
  for (auto& mol : rows.molecule) mol /= static_cast<int>(t);
  return rows;
}

BlendModel train_blend(std::span<const Matrix> scores, const LabelMatrix& labels, std::vector<std::string> members,
                       const BlendConfig& config) {
  check_scores(scores);
  if (members.size() != scores.size()) throw DataError("member manifest differs from score count");
  const auto n = static_cast<int>(labels.rows());
  if (n < 2) throw DataError("blend needs at least two validation molecules");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(config.seed, 0xb1e9d));
  rng.shuffle(std::span<int>(order));
  const int stop = std::clamp(static_cast<int>(std::lround(config.holdout * n)), 1, n - 1);
  std::vector<int> fit_rows(order.begin() + stop, order.end()), stop_rows(order.begin(), order.begin() + stop);
  std::sort(fit_rows.begin(), fit_rows.end());
  std::sort(stop_rows.begin(), stop_rows.end());

  auto slice = [&](const std::vector<int>& rows) {
    std::vector<Matrix> s;
    for (const auto& m : scores) {
      Matrix part(static_cast<Eigen::Index>(rows.size()), m.cols());
      for (std::size_t r = 0; r < rows.size(); ++r) part.row(static_cast<Eigen::Index>(r)) = m.row(rows[r]);
      s.push_back(std::move(part));
    }
    LabelMatrix l(static_cast<Eigen::Index>(rows.size()), labels.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) l.row(static_cast<Eigen::Index>(r)) = labels.row(rows[r]);
    return std::pair{std::move(s), std::move(l)};
  };
  const auto [fit_scores, fit_labels] = slice(fit_rows);
  const auto [stop_scores, stop_labels] = slice(stop_rows);
  const auto fit = stack_member_scores(fit_scores, &fit_labels);
  const auto hold = stack_member_scores(stop_scores, &stop_labels);

  std::vector<int> monotone(static_cast<std::size_t>(fit.x.cols()), 1);
  if (fit.task_feature >= 0) monotone[static_cast<std::size_t>(fit.task_feature)] = 0;
  BlendModel b;
  b.members = std::move(members);
  b.targets = static_cast<int>(labels.cols());
  b.model = gbm::train_gbm(fit, config.gbm, monotone, hold.x.rows() > 0 ? &hold : nullptr);
  b.model.feature_names = b.members;
  if (fit.task_feature >= 0) b.model.feature_names.push_back("task");
  return b;
}

Matrix predict_blend(const BlendModel& b, std::span<const Matrix> scores) {
  if (scores.size() != b.members.size()) throw DataError("blend expects " + std::to_string(b.members.size()) +
                                                         " member score matrices");
  if (scores.empty() || scores[0].cols() != b.targets) throw DataError("member scores have the wrong target count");
  const auto rows = stack_member_scores(scores, nullptr);
  const Vector p = gbm::predict_gbm(b.model, rows.x);
  Matrix out(scores[0].rows(), b.targets);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index k = 0; k < out.cols(); ++k) out(i, k) = p[i * b.targets + k];
  }
  return out;
}

nlohmann::json to_json(const BlendModel& b) {
  return {{"format", "toxblend-blend"}, {"version", 1}, {"members", b.members}, {"targets", b.targets},
          {"model", gbm::to_json(b.model)}};
}

BlendModel blend_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "toxblend-blend") throw DataError("not a toxblend blend model");
  if (j.at("version").get<int>() != 1) throw DataError("unsupported blend version");
  BlendModel b;
  b.members = j.at("members").get<std::vector<std::string>>();
  b.targets = j.at("targets").get<int>();
  b.model = gbm::gbm_from_json(j.at("model"));
  const auto m = static_cast<std::size_t>(b.members.size());
  if (b.model.monotone.size() < m || !std::all_of(b.model.monotone.begin(), b.model.monotone.begin() + static_cast<std::ptrdiff_t>(m),
                                                  [](int d) { return d == 1; })) {
    throw DataError("blend model lacks the member monotone constraints");
  }
  return b;
}

Correlation correlation_matrix(std::span<const Matrix> scores, const LabelMatrix& labels) {
  check_scores(scores);
  const auto m = static_cast<Eigen::Index>(scores.size());
  Correlation out{Matrix::Zero(m, m), std::vector<int>(static_cast<std::size_t>(m * m), 0)};
  Matrix counts = Matrix::Zero(m, m);
  for (Eigen::Index t = 0; t < labels.cols(); ++t) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < labels.rows(); ++i) {
      if (is_known(labels(i, t))) rows.push_back(i);
    }
    std::vector<Vector> centred;
    std::vector<double> norms;
    for (const auto& s : scores) {
      Vector v(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) v[static_cast<Eigen::Index>(r)] = s(rows[r], t);
      if (v.size() > 0) v.array() -= v.mean();
      norms.push_back(v.norm());
      centred.push_back(std::move(v));
    }
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        const auto ai = static_cast<std::size_t>(a), bi = static_cast<std::size_t>(b);
        if (norms[ai] == 0.0 || norms[bi] == 0.0) {
          ++out.excluded[static_cast<std::size_t>(a * m + b)];
          continue;
        }
        out.rho(a, b) += centred[ai].dot(centred[bi]) / (norms[ai] * norms[bi]);
        counts(a, b) += 1.0;
      }
    }
  }
  int skipped = 0;
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      skipped += out.excluded[static_cast<std::size_t>(a * m + b)];
      out.rho(a, b) = counts(a, b) > 0 ? out.rho(a, b) / counts(a, b) : std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (skipped > 0) {
    log::warn("correlation undefined for " + std::to_string(skipped) +
              " member pair/target combinations (constant scores); excluded from the average");
  }
  return out;
}

}  // namespace toxblend::blend
