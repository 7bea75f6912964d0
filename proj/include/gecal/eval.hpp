#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gecal/corpus.hpp"
#include "gecal/dictionary.hpp"
#include "gecal/edit_metric.hpp"
#include "gecal/oracle.hpp"

namespace gecal::eval {

/// 100 * (attacked - baseline) / baseline; nullopt unless baseline > 0.
std::optional<double> percent_change(double baseline_mean, double attacked_mean);

/// One decimal with explicit sign, e.g. "-7.1%", "+64.4%"; "n/a" when absent.
std::string format_percent(std::optional<double> percent);

struct SubsetStat {
  std::string label;
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> std;

  bool operator==(const SubsetStat&) const = default;
};

struct SubsetRow {
  SubsetStat baseline;
  SubsetStat attacked;
  std::optional<double> percent_change;
  // Dictionary mapping for per-target rows.
  std::string target;
  std::string substitution;

  bool operator==(const SubsetRow&) const = default;
};

struct EvalReport {
  std::string corpus;
  std::string split;
  std::string oracle;
  std::string dictionary;
  std::vector<SubsetRow> rows;

  bool operator==(const EvalReport&) const = default;
};

struct NamedSubset {
  std::string label;
  std::vector<std::string> words;
};

struct SubsetSpec {
  bool union_affected = true;
  bool per_target = true;
  std::vector<NamedSubset> extra;
  metric::StdConvention std_convention = metric::StdConvention::kPopulation;
};

inline constexpr std::string_view kAllLabel = "ALL";
inline constexpr std::string_view kUnionLabel = "AFFECTED";

/// Baseline and attacked statistics over ALL, the union-affected subset, each
/// per-target subset and any extra word subsets, in that order.
EvalReport evaluate_attack(const Corpus& corpus, GecOracle& oracle,
                           const SubstitutionDictionary& dictionary,
                           const SubsetSpec& spec = {});

enum class Format { kMarkdown, kCsv, kJson };

Format parse_format(std::string_view name);
std::string render_report(const EvalReport& report, Format format);

/// Inverse of the json rendering.
EvalReport parse_report_json(std::string_view text);

inline constexpr std::string_view kReportSchema = "GECAL-REPORT v1";

}  // namespace gecal::eval
