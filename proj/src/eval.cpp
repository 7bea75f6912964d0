#include "gecal/eval.hpp"

#include <cstdio>

#include "gecal/attack.hpp"
#include "gecal/error.hpp"
#include "json.hpp"

namespace gecal::eval {
namespace {

using ojson = nlohmann::ordered_json;

SubsetStat make_stat(std::string label, std::span<const std::size_t> all_counts,
                     const std::vector<std::size_t>& indices, metric::StdConvention convention) {
  std::vector<std::size_t> picked;
  picked.reserve(indices.size());
  for (auto i : indices) picked.push_back(all_counts[i]);
  auto s = metric::summarize(picked, convention);
  return {std::move(label), s.n, s.mean, s.std};
}

ojson stat_json(const SubsetStat& s) {
  return {{"n", s.n}, {"mean", s.mean ? ojson(*s.mean) : ojson(nullptr)}, {"std", s.std ? ojson(*s.std) : ojson(nullptr)}};
}

SubsetStat stat_from_json(const std::string& label, const ojson& j) {
  SubsetStat s{label, j.at("n").get<std::size_t>(), std::nullopt, std::nullopt};
  if (!j.at("mean").is_null()) s.mean = j["mean"].get<double>();
  if (!j.at("std").is_null()) s.std = j["std"].get<double>();
  return s;
}

std::string cell(const SubsetStat& s) {
  if (!s.mean) return "n/a";
  return fixed(*s.mean, 3) + "_{±" + fixed(s.std.value_or(0.0), 3) + "}";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt_fixed(const std::optional<double>& v, int decimals) { return v ? fixed(*v, decimals) : ""; }

}  // namespace

std::optional<double> percent_change(double baseline_mean, double attacked_mean) {
  if (!(baseline_mean > 0.0)) return std::nullopt;
  return 100.0 * (attacked_mean - baseline_mean) / baseline_mean;
}

std::string format_percent(std::optional<double> percent) {
  if (!percent) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", *percent);
  return buf;
}

EvalReport evaluate_attack(const Corpus& corpus, GecOracle& oracle, const SubstitutionDictionary& dictionary,
                           const SubsetSpec& spec) {
  EvalReport report;
  report.corpus = corpus.name;
  report.split = std::string(to_string(corpus.split));
  report.oracle = oracle.fingerprint();
  report.dictionary = dictionary.name();

  const auto baseline = metric::edit_counts(corpus, oracle, nullptr);
  const auto attacked = metric::edit_counts(corpus, oracle, &dictionary);

  auto add_row = [&](std::string label, const std::vector<std::size_t>& indices, std::string target = {},
                     std::string substitution = {}) {
    SubsetRow row;
    row.baseline = make_stat(label, baseline, indices, spec.std_convention);
    row.attacked = make_stat(label, attacked, indices, spec.std_convention);
    if (row.baseline.mean && row.attacked.mean)
      row.percent_change = percent_change(*row.baseline.mean, *row.attacked.mean);
    row.target = std::move(target);
    row.substitution = std::move(substitution);
    report.rows.push_back(std::move(row));
  };

  std::vector<std::size_t> all(corpus.examples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  add_row(std::string(kAllLabel), all);
  if (spec.union_affected)
    add_row(std::string(kUnionLabel), attack::affected_indices(corpus, dictionary.targets()));
  if (spec.per_target)
    for (const auto& e : dictionary.entries())
      add_row(e.target, attack::affected_indices(corpus, {e.target}), e.target, e.substitution);
  for (const auto& extra : spec.extra) add_row(extra.label, attack::affected_indices(corpus, extra.words));
  return report;
}

Format parse_format(std::string_view name) {
  if (name == "markdown" || name == "md") return Format::kMarkdown;
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw Error("unknown report format '" + std::string(name) + "' (expected markdown, csv or json)");
}

std::string render_report(const EvalReport& report, Format format) {
  switch (format) {
    case Format::kJson: {
      ojson j;
      j["schema"] = kReportSchema;
      j["corpus"] = report.corpus;
      j["split"] = report.split;
      j["oracle"] = report.oracle;
      j["dictionary"] = report.dictionary;
      j["rows"] = ojson::array();
      for (const auto& r : report.rows) {
        ojson row;
        row["label"] = r.baseline.label;
        row["target"] = r.target;
        row["substitution"] = r.substitution;
        row["baseline"] = stat_json(r.baseline);
        row["attacked"] = stat_json(r.attacked);
        row["percent_change"] = r.percent_change ? ojson(*r.percent_change) : ojson(nullptr);
        j["rows"].push_back(std::move(row));
      }
      return j.dump(2) + "\n";
    }
    case Format::kCsv: {
      std::string out = "label,target,substitution,n,baseline_mean,baseline_std,attacked_mean,attacked_std,percent_change\n";
      for (const auto& r : report.rows) {
        out += csv_field(r.baseline.label) + "," + csv_field(r.target) + "," + csv_field(r.substitution) + "," +
               std::to_string(r.baseline.n) + "," + opt_fixed(r.baseline.mean, 3) + "," +
               opt_fixed(r.baseline.std, 3) + "," + opt_fixed(r.attacked.mean, 3) + "," +
               opt_fixed(r.attacked.std, 3) + "," + opt_fixed(r.percent_change, 1) + "\n";
      }
      return out;
    }
    case Format::kMarkdown: {
      std::string out = "## " + report.corpus + " (" + report.split + ")\n\n";
      out += "Oracle `" + report.oracle + "`, dictionary `" + report.dictionary + "`.\n\n";
      out += "| N | Orig | Sub | Subset | # | No Attack | Sub Attack | Change (%) |\n";
      out += "|---|---|---|---|---:|---:|---:|---:|\n";
      std::size_t n = 0;
      for (const auto& r : report.rows) {
        const bool per_target = !r.target.empty();
        out += "| " + (per_target ? std::to_string(++n) : std::string("-")) + " | " +
               (per_target ? r.target : "-") + " | " + (per_target ? r.substitution : "-") + " | " +
               r.baseline.label + " | " + std::to_string(r.baseline.n) + " | " + cell(r.baseline) + " | " +
               cell(r.attacked) + " | " + format_percent(r.percent_change) + " |\n";
      }
      return out;
    }
  }
  return {};
}

EvalReport parse_report_json(std::string_view text) {
  try {
    auto j = ojson::parse(text);
    if (j.value("schema", "") != kReportSchema) throw ParseError(0, "not a " + std::string(kReportSchema) + " report");
    EvalReport report;
    report.corpus = j.at("corpus").get<std::string>();
    report.split = j.at("split").get<std::string>();
    report.oracle = j.at("oracle").get<std::string>();
    report.dictionary = j.at("dictionary").get<std::string>();
    for (const auto& r : j.at("rows")) {
      SubsetRow row;
      const auto label = r.at("label").get<std::string>();
      row.baseline = stat_from_json(label, r.at("baseline"));
      row.attacked = stat_from_json(label, r.at("attacked"));
      if (!r.at("percent_change").is_null()) row.percent_change = r["percent_change"].get<double>();
      row.target = r.at("target").get<std::string>();
      row.substitution = r.at("substitution").get<std::string>();
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("bad report json: ") + e.what());
  }
}

}  // namespace gecal::eval
