#include "cpdp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace cpdp {

BMResult brunner_munzel(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) {
    throw std::invalid_argument("brunner_munzel: each sample needs at least two values");
  }
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto pooled_rank = midranks(std::span<const double>(pooled));
  const auto rank_x = midranks(x);
  const auto rank_y = midranks(y);

  // Rank sums are exact: midranks are multiples of one half.
  double sum_x = 0.0, sum_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum_x += pooled_rank[i];
  for (std::size_t j = 0; j < y.size(); ++j) sum_y += pooled_rank[x.size() + j];
  const double mean_x = sum_x / nx;
  const double mean_y = sum_y / ny;

  // Placement variances: pooled rank minus within-sample rank counts the
  // other sample's values below each observation.
  double var_x = 0.0, var_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = pooled_rank[i] - rank_x[i] - mean_x + (nx + 1.0) / 2.0;
    var_x += d * d;
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double d = pooled_rank[x.size() + j] - rank_y[j] - mean_y + (ny + 1.0) / 2.0;
    var_y += d * d;
  }
  var_x /= nx - 1.0;
  var_y /= ny - 1.0;

  BMResult r;
  r.relative_effect = (sum_y - ny * (ny + 1.0) / 2.0) / (nx * ny);
  const double spread = nx * var_x + ny * var_y;
  if (spread == 0.0) {
    if (r.relative_effect == 0.0 || r.relative_effect == 1.0) {
      r.statistic = (r.relative_effect > 0.5 ? 1.0 : -1.0) * std::numeric_limits<double>::infinity();
      r.degrees_of_freedom = std::numeric_limits<double>::quiet_NaN();
      r.p_value = 0.0;
    } else {
      r.degenerate = true;
      r.p_value = 1.0;
    }
    return r;
  }
  r.statistic = nx * ny * (mean_y - mean_x) / ((nx + ny) * std::sqrt(spread));
  const double a = nx * var_x, b = ny * var_y;
  r.degrees_of_freedom = spread * spread / (a * a / (nx - 1.0) + b * b / (ny - 1.0));
  const boost::math::students_t dist(r.degrees_of_freedom);
  const double tail = boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
  r.p_value = std::min(1.0, 2.0 * tail);
  return r;
}

const char* to_string(EffectMagnitude m) {
  switch (m) {
    case EffectMagnitude::negligible: return "negligible";
    case EffectMagnitude::medium: return "medium";
    case EffectMagnitude::large: return "large";
  }
  return "?";
}

EffectMagnitude effect_magnitude(double delta) {
  const double a = std::abs(delta);
  if (a <= 0.112) return EffectMagnitude::negligible;
  if (a < 0.428) return EffectMagnitude::medium;
  return EffectMagnitude::large;
}

CliffResult cliffs_delta(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("cliffs_delta: empty sample");
  std::vector<double> ys(y.begin(), y.end());
  std::sort(ys.begin(), ys.end());
  long long dominance = 0;
  for (double v : x) {
    const auto below = std::lower_bound(ys.begin(), ys.end(), v) - ys.begin();
    const auto above = ys.end() - std::upper_bound(ys.begin(), ys.end(), v);
    dominance += below - above;
  }
  CliffResult r;
  r.delta = static_cast<double>(dominance) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
  r.magnitude = effect_magnitude(r.delta);
  return r;
}

std::vector<double> hochberg_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const double scaled = static_cast<double>(m - k) * p_values[order[k]];
    running = std::min(running, scaled);
    adjusted[order[k]] = std::min(running, 1.0);
  }
  return adjusted;
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::win: return "win";
    case Outcome::tie: return "tie";
    case Outcome::loss: return "loss";
  }
  return "?";
}

ComparisonCell compare_subjects(const SubjectSeries& first, const SubjectSeries& second,
                                Measure measure, double alpha) {
  ComparisonCell cell;
  cell.first = first.subject;
  cell.second = second.subject;
  cell.measure = measure;
  std::vector<double> x, y;
  for (const auto& [target, v] : first.by_target) {
    auto it = second.by_target.find(target);
    if (it == second.by_target.end()) continue;
    x.push_back(v);
    y.push_back(it->second);
  }
  cell.common_targets = x.size();
  if (x.size() < 2) {
    cell.note = "fewer than 2 common targets, forced tie";
    cell.test.degenerate = true;
    return cell;
  }
  cell.test = brunner_munzel(x, y);
  cell.effect = cliffs_delta(x, y);
  if (cell.test.degenerate) {
    cell.note = "zero rank variance, forced tie";
    return cell;
  }
  if (cell.test.p_value < alpha && cell.test.relative_effect != 0.5) {
    const bool second_larger = cell.test.relative_effect > 0.5;
    const bool first_better = higher_is_better(measure) ? !second_larger : second_larger;
    cell.outcome = first_better ? Outcome::win : Outcome::loss;
  }
  return cell;
}

WinTieLossTable win_tie_loss(std::span<const SubjectSeries> series, Measure measure, double alpha) {
  WinTieLossTable table;
  table.measure = measure;
  table.rows.resize(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) table.rows[i].subject = series[i].subject;
  for (std::size_t i = 0; i < series.size(); ++i) {
    for (std::size_t j = i + 1; j < series.size(); ++j) {
      auto cell = compare_subjects(series[i], series[j], measure, alpha);
      auto tally = [](WinTieLossRow& row, Outcome o) {
        (o == Outcome::win ? row.wins : o == Outcome::loss ? row.losses : row.ties) += 1;
      };
      tally(table.rows[i], cell.outcome);
      tally(table.rows[j], flip(cell.outcome));
      table.cells.push_back(std::move(cell));
    }
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const WinTieLossRow& a, const WinTieLossRow& b) {
                     if (a.wins_minus_losses() != b.wins_minus_losses()) {
                       return a.wins_minus_losses() > b.wins_minus_losses();
                     }
                     return a.wins > b.wins;
                   });
  return table;
}

std::vector<SubjectSeries> series_by_subject(std::span<const EvaluationRecord> records,
                                             Measure measure) {
  std::vector<SubjectSeries> out;
  for (const auto& r : records) {
    const Subject s{r.model, r.resampler};
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SubjectSeries& ss) { return ss.subject == s; });
    if (it == out.end()) {
      out.push_back({s, {}});
      it = std::prev(out.end());
    }
    if (auto v = r.value(measure)) it->by_target[r.target] = *v;
  }
  return out;
}

}  // namespace cpdp
