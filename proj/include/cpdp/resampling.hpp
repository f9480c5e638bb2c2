#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpdp/data.hpp"

namespace cpdp {

enum class ResamplerKind { nos, ros, rus, smote, borderline_smote, adasyn, mahakil, tomek, oss };

inline constexpr std::array<ResamplerKind, 9> kAllResamplers{
    ResamplerKind::nos,    ResamplerKind::ros,     ResamplerKind::rus,
    ResamplerKind::smote,  ResamplerKind::borderline_smote, ResamplerKind::adasyn,
    ResamplerKind::mahakil, ResamplerKind::tomek,  ResamplerKind::oss};

std::string_view to_string(ResamplerKind kind);
/// Accepts the canonical names (NOS, ROS, RUS, SMOTE, BORDERLINE, ADASYN,
/// MAHAKIL, TOMEK, OSS) in any case, plus BORDERLINE-SMOTE / BSMOTE.
std::optional<ResamplerKind> parse_resampler(std::string_view name);

bool is_oversampler(ResamplerKind kind);

struct ResampleParams {
  std::size_t k_smote = 5;
  std::uint64_t seed = 0;
};

/// How a synthetic row was made: row = a + gap * (b - a). Row indices refer
/// to the output dataset. For MAHAKIL children gap is 0.5 and `generation`
/// counts from 1; interpolating samplers use generation 0.
struct SyntheticTrace {
  std::size_t row;
  std::size_t a;
  std::size_t b;
  double gap;
  int generation = 0;
};

struct ResampleResult {
  Dataset data;
  std::vector<bool> synthetic;
  std::vector<SyntheticTrace> traces;
  std::vector<std::string> notes;

  std::size_t n_synthetic() const;
};

/// Minority/majority split. The minority is the smaller class; on a tie it is
/// the defective class and `balanced` is set.
struct ClassSplit {
  Label minority = Label::defective;
  std::vector<std::size_t> minority_rows;
  std::vector<std::size_t> majority_rows;
  bool balanced = false;
};
ClassSplit split_classes(const Dataset& data);

ResampleResult resample(const Dataset& data, ResamplerKind kind, const ResampleParams& params);

ResampleResult ros(const Dataset& data, std::uint64_t seed);
ResampleResult rus(const Dataset& data, std::uint64_t seed);
ResampleResult smote(const Dataset& data, std::size_t k, std::uint64_t seed);
ResampleResult borderline_smote(const Dataset& data, std::size_t k, std::uint64_t seed);
ResampleResult adasyn(const Dataset& data, std::size_t k, std::uint64_t seed);
ResampleResult mahakil(const Dataset& data, std::uint64_t seed);
ResampleResult tomek_links(const Dataset& data);
ResampleResult one_sided_selection(const Dataset& data, std::uint64_t seed);

/// All cross-class pairs (i, j), i < j, that are mutual nearest neighbours
/// among `rows` of `data`: no third row is strictly closer to either.
std::vector<std::pair<std::size_t, std::size_t>> find_tomek_links(
    const Dataset& data, const std::vector<std::size_t>& rows);

/// Splits `total` into integer parts proportional to `weights` using the
/// largest-remainder method. Parts sum to `total` exactly; equal remainders
/// go to the lower index.
std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total);

}  // namespace cpdp
