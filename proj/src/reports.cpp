#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpdp/detail/csv.hpp"
#include "cpdp/harness.hpp"

namespace cpdp {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  // "-0.000000" and "0.000000" must not differ between runs.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string fixed6(const std::optional<double>& v) { return v ? fixed6(*v) : std::string{}; }

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

const std::vector<std::string> kRawHeader{"target", "model", "resampler", "seed", "pd",
                                          "pf",     "g_measure", "auc",   "flags"};

}  // namespace

std::string ReportFiles::win_tie_loss(Measure m) {
  return std::string("win_tie_loss_") + to_string(m) + ".csv";
}

void write_raw_csv(std::span<const EvaluationRecord> records, std::ostream& out) {
  detail::write_csv_row(out, kRawHeader);
  for (const auto& r : records) {
    std::string flags;
    for (const auto& f : r.flags) {
      if (!flags.empty()) flags += "; ";
      flags += f;
    }
    detail::write_csv_row(out, {r.target, r.model, r.resampler, std::to_string(r.seed),
                                fixed6(r.pd), fixed6(r.pf), fixed6(r.g_measure), fixed6(r.auc),
                                flags});
  }
}

std::vector<EvaluationRecord> read_raw_csv(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || detail::split_csv_line(line) != kRawHeader) {
    throw DataError(name + ": not a raw-run CSV (unexpected header)");
  }
  std::vector<EvaluationRecord> records;
  auto number = [&](const std::string& cell, const char* column) -> std::optional<double> {
    if (cell.empty()) return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::exception&) {
      throw ParseError(name, line_no, column, "non-numeric value '" + cell + "'");
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != kRawHeader.size()) {
      throw ParseError(name, line_no, "*", "expected 9 cells");
    }
    EvaluationRecord r;
    r.target = cells[0];
    r.model = cells[1];
    r.resampler = cells[2];
    try {
      r.seed = std::stoull(cells[3]);
    } catch (const std::exception&) {
      throw ParseError(name, line_no, "seed", "invalid seed '" + cells[3] + "'");
    }
    r.pd = number(cells[4], "pd");
    r.pf = number(cells[5], "pf");
    r.g_measure = number(cells[6], "g_measure");
    r.auc = number(cells[7], "auc");
    std::string_view flags = cells[8];
    while (!flags.empty()) {
      const auto cut = flags.find("; ");
      r.flags.emplace_back(flags.substr(0, cut));
      if (cut == std::string_view::npos) break;
      flags.remove_prefix(cut + 2);
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<EvaluationRecord> read_raw_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_raw_csv(in, path.filename().string());
}

std::vector<EvaluationRecord> round_trip_raw(std::span<const EvaluationRecord> records) {
  std::stringstream buffer;
  write_raw_csv(records, buffer);
  return read_raw_csv(buffer);
}

void write_tables(const Analysis& a, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / ReportFiles::quartiles);
    detail::write_csv_row(out, {"model", "resampler", "measure", "n", "q25", "median", "q75"});
    for (const auto& q : a.quartiles) {
      const bool any = q.n > 0;
      detail::write_csv_row(out, {q.model, q.resampler, to_string(q.measure), std::to_string(q.n),
                                  any ? fixed6(q.q25) : "", any ? fixed6(q.median) : "",
                                  any ? fixed6(q.q75) : ""});
    }
  }
  for (const auto& table : a.win_tie_loss) {
    auto out = open_out(dir / ReportFiles::win_tie_loss(table.measure));
    detail::write_csv_row(out, {"rank", "model", "resampler", "wins", "ties", "losses",
                                "wins_minus_losses"});
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& r = table.rows[i];
      detail::write_csv_row(out, {std::to_string(i + 1), r.subject.model, r.subject.resampler,
                                  std::to_string(r.wins), std::to_string(r.ties),
                                  std::to_string(r.losses), std::to_string(r.wins_minus_losses())});
    }
  }
  {
    auto out = open_out(dir / ReportFiles::effects);
    detail::write_csv_row(out, {"model", "resampler", "measure", "common_targets", "outcome",
                                "p_value", "p_adjusted", "outcome_adjusted", "relative_effect",
                                "cliffs_delta", "magnitude", "note"});
    for (const auto& e : a.effects) {
      const auto& c = e.comparison;
      detail::write_csv_row(out, {e.model, e.resampler, to_string(e.measure),
                                  std::to_string(c.common_targets), to_string(c.outcome),
                                  fixed6(c.test.p_value), fixed6(e.p_adjusted),
                                  to_string(e.outcome_adjusted), fixed6(c.test.relative_effect),
                                  fixed6(c.effect.delta), to_string(c.effect.magnitude), c.note});
    }
  }
  {
    auto out = open_out(dir / ReportFiles::practical);
    detail::write_csv_row(out, {"resampler", "measure", "successes", "runs", "rate"});
    for (const auto& p : a.practical) {
      detail::write_csv_row(out, {p.resampler, to_string(p.measure), std::to_string(p.successes),
                                  std::to_string(p.runs), fixed6(p.rate())});
    }
  }
}

void write_run_log(const RunLog& log, const ExperimentConfig& config, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["config_hash"] = hex64(log.config_hash);
  doc["seed"] = log.seed;
  doc["config"] = nlohmann::json::parse(canonical_config(config));
  doc["runs"] = nlohmann::json::array();
  std::size_t flagged = 0;
  for (const auto& e : log.entries) {
    doc["runs"].push_back({{"id", e.run_id}, {"notes", e.notes}});
    flagged += !e.notes.empty();
  }
  doc["run_count"] = log.entries.size();
  doc["runs_with_notes"] = flagged;
  doc["notes"] = log.notes;
  out << doc.dump(2) << '\n';
}

bool emit_reports(const ExperimentResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / ReportFiles::raw);
    write_raw_csv(result.records, out);
  }
  const auto records = round_trip_raw(result.records);
  write_tables(analyze(records, config.alpha, config.thresholds), dir);
  {
    auto out = open_out(dir / ReportFiles::run_log);
    write_run_log(result.log, config, out);
  }
  {
    nlohmann::ordered_json timing = nlohmann::ordered_json::object();
    for (const auto& e : result.log.entries) timing[e.run_id] = e.millis;
    auto out = open_out(dir / "timing.json");
    out << timing.dump(2) << '\n';
  }
  return std::any_of(records.begin(), records.end(), [](const EvaluationRecord& r) {
    return r.pd || r.pf || r.g_measure || r.auc;
  });
}

}  // namespace cpdp
