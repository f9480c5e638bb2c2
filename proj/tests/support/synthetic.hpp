#pragma once

// Synthetic PROMISE-like data for tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "cpdp/data.hpp"

namespace cpdp::fixture {

struct ReleaseSpec {
  std::string name;
  std::size_t modules;
  std::size_t defective;
};

/// The 14 target and 20 source releases with their module and defect counts.
inline const std::vector<ReleaseSpec>& promise_targets() {
  static const std::vector<ReleaseSpec> t{
      {"arc", 234, 27},          {"berek", 43, 16},       {"e-learning", 64, 5},
      {"intercafe", 27, 4},      {"kalkulator", 27, 6},   {"nieruchomosci", 27, 10},
      {"pdftranslator", 33, 15}, {"redaktor", 176, 27},   {"serapion", 45, 9},
      {"skarbonka", 45, 9},      {"systemdata", 65, 9},   {"tomcat", 858, 77},
      {"workflow", 39, 20},      {"zuzel", 29, 13}};
  return t;
}

inline const std::vector<ReleaseSpec>& promise_sources() {
  static const std::vector<ReleaseSpec> s{
      {"ant-1.3", 125, 20},     {"ant-1.4", 178, 40},     {"ant-1.5", 293, 32},
      {"ant-1.6", 351, 92},     {"camel-1.0", 339, 13},   {"camel-1.4", 872, 145},
      {"camel-1.6", 965, 188},  {"ivy-1.1", 111, 63},     {"ivy-1.4", 241, 16},
      {"ivy-2.0", 352, 40},     {"jedit-4.0", 306, 75},   {"jedit-4.1", 312, 79},
      {"jedit-4.2", 367, 48},   {"jedit-4.3", 492, 11},   {"pbeans1", 26, 20},
      {"pbeans2", 51, 10},      {"synapse-1.0", 157, 16}, {"xalan-2.4", 723, 110},
      {"xerces-1.2", 440, 71},  {"xerces-1.3", 453, 69}};
  return s;
}

/// Count-like nonnegative metrics; defective rows sit higher on every metric
/// by `separation` log-units. Defective rows are scattered, not grouped.
inline Dataset make_release(const std::string& name, std::size_t n, std::size_t n_defective,
                            std::uint64_t seed, double separation = 0.3,
                            std::size_t dims = promise_schema().size()) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 0.7);
  std::uniform_int_distribution<int> bugs(1, 4);
  std::vector<int> counts(n, 0);
  for (std::size_t i = 0; i < n_defective && i < n; ++i) counts[i] = bugs(gen);
  std::shuffle(counts.begin(), counts.end(), gen);
  FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
  for (std::size_t i = 0; i < n; ++i) {
    const double shift = counts[i] > 0 ? separation : 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      const double level = 0.5 + 0.15 * static_cast<double>(j % 7);
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::round(10.0 * std::exp(level + shift + noise(gen))) / 10.0;
    }
  }
  std::vector<Origin> origins(n);
  for (std::size_t i = 0; i < n; ++i) origins[i] = {name, i};
  std::vector<std::string> schema = promise_schema();
  schema.resize(dims);
  return Dataset(name, name, std::move(schema), std::move(x), std::move(counts), std::move(origins));
}

/// Gaussian two-class data in arbitrary dimension, for resampler fixtures.
inline Dataset make_gaussian(std::size_t n, std::size_t n_defective, std::size_t dims,
                             std::uint64_t seed, const std::string& name = "fixture") {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<int> counts(n, 0);
  for (std::size_t i = 0; i < n_defective; ++i) counts[i] = 1;
  std::shuffle(counts.begin(), counts.end(), gen);
  FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dims; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          z(gen) + (counts[i] > 0 ? 1.0 : 0.0);
    }
  }
  std::vector<Origin> origins(n);
  for (std::size_t i = 0; i < n; ++i) origins[i] = {name, i};
  std::vector<std::string> schema;
  for (std::size_t j = 0; j < dims; ++j) schema.push_back("f" + std::to_string(j));
  return Dataset(name, name, std::move(schema), std::move(x), std::move(counts), std::move(origins));
}

struct StudyFiles {
  std::vector<std::filesystem::path> targets;
  std::vector<std::filesystem::path> sources;
  std::filesystem::path config;
};

/// Writes scaled-down releases and a config.json into `dir`. `scale` shrinks
/// module counts (at least 8 modules and one defect each).
inline StudyFiles write_study(const std::filesystem::path& dir, double scale,
                              std::size_t n_targets, std::size_t n_sources, std::uint64_t seed,
                              std::size_t rf_trees = 20) {
  std::filesystem::create_directories(dir / "data");
  StudyFiles files;
  auto emit = [&](const ReleaseSpec& spec, std::uint64_t s) {
    const auto n = std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(spec.modules * scale)));
    auto d = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(spec.defective * scale)), 1,
                                     n - 1);
    const auto path = dir / "data" / (spec.name + ".csv");
    write_dataset(make_release(spec.name, n, d, s), path);
    return path;
  };
  for (std::size_t i = 0; i < n_targets; ++i) {
    files.targets.push_back(emit(promise_targets()[i % promise_targets().size()], seed + i));
  }
  for (std::size_t i = 0; i < n_sources; ++i) {
    files.sources.push_back(emit(promise_sources()[i % promise_sources().size()], seed + 100 + i));
  }
  files.config = dir / "config.json";
  std::ofstream cfg(files.config);
  cfg << "{\n  \"targets\": [";
  for (std::size_t i = 0; i < files.targets.size(); ++i) {
    cfg << (i ? ", " : "") << "\"data/" << files.targets[i].filename().string() << "\"";
  }
  cfg << "],\n  \"sources\": [";
  for (std::size_t i = 0; i < files.sources.size(); ++i) {
    cfg << (i ? ", " : "") << "\"data/" << files.sources[i].filename().string() << "\"";
  }
  cfg << "],\n  \"rf_trees\": " << rf_trees << ",\n  \"seed\": " << seed
      << ",\n  \"out_dir\": \"results\"\n}\n";
  return files;
}

}  // namespace cpdp::fixture
