#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "topiceval/adversarial.hpp"
#include "topiceval/baseline.hpp"
#include "topiceval/llm_metrics.hpp"

namespace topiceval {

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Orientation { kHigherBetter, kLowerBetter };

// Orientation of a judge or baseline metric by name. A column name may carry
// an "@llm" suffix ("C_rate@gemma").
std::optional<Orientation> orientation_of(std::string_view column);
std::string_view arrow(Orientation o);  // "↑" / "↓"

// Observation units x metric columns. Missing cells stay empty.
struct MetricMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::map<std::string, Orientation> orientation;
  std::vector<std::vector<std::optional<double>>> cells;  // [row][column]

  std::size_t add_row(const std::string& label);
  std::size_t add_column(const std::string& name, std::optional<Orientation> o);
  void set(const std::string& row, const std::string& column, double value);
  std::vector<std::optional<double>> column(std::size_t j) const;
};

// Lower-better columns become max(column) - value; higher-better columns are
// untouched. Throws AnalysisError for a column without an orientation.
MetricMatrix align_directions(const MetricMatrix& m);

enum class CorrMethod { kPearson, kSpearman };
std::string_view to_string(CorrMethod m);
CorrMethod parse_corr_method(std::string_view name);

// Undefined (nullopt) with fewer than 3 points or zero variance.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);
std::vector<double> average_ranks(const std::vector<double>& v);

struct PairedCorrelation {
  std::optional<double> r;
  std::size_t n_used = 0;
};

// Drops rows where either side is missing, then correlates.
PairedCorrelation correlate(const std::vector<std::optional<double>>& x, const std::vector<std::optional<double>>& y,
                            CorrMethod method);

struct CorrelationMatrix {
  CorrMethod method = CorrMethod::kPearson;
  std::vector<std::string> labels;
  std::vector<std::vector<std::optional<double>>> r;
  std::vector<std::vector<std::size_t>> n_used;
};

CorrelationMatrix correlation_matrix(const MetricMatrix& m, CorrMethod method);

enum class ObservationUnit { kConfig, kTopic };
ObservationUnit parse_observation_unit(std::string_view name);

// Config unit: one row per "model/dataset/K<k>", columns "<metric>@<llm>"
// for judge model-level scores (primary aggregation) and baseline names for
// model-level baselines. Topic unit: one row per "model/dataset/K<k>#<topic>",
// per-topic judge scores, alignment scores averaged per topic, and per-topic
// coherence baselines.
MetricMatrix build_metric_matrix(const std::vector<ScoreRow>& scores, const std::vector<BaselineReport>& baselines,
                                 ObservationUnit unit);

// Base judges are paired with "<id>-large" when both are present.
std::vector<std::pair<std::string, std::string>> base_large_pairs(const std::vector<std::string>& llm_ids);

inline constexpr double kSubstitutionThreshold = 0.72;

struct AgreementRow {
  std::string base_llm;
  std::string large_llm;
  std::string metric;
  PairedCorrelation pearson;
  PairedCorrelation spearman;
};

// One row per (family, judge metric) over matched per-configuration
// model-level scores.
std::vector<AgreementRow> llm_agreement(const std::vector<ScoreRow>& scores,
                                        const std::vector<std::pair<std::string, std::string>>& families);

struct PivotTable {
  std::string title;
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<std::vector<std::optional<double>>> cells;
};

// Model-level judge scores pivoted to metric rows x judge columns: overall
// (every configuration), then one table per topic model and per dataset.
// Each cell is the unweighted mean of the configuration scores it covers.
std::vector<PivotTable> comparison_report(const std::vector<ScoreRow>& scores);

struct AdversarialTable {
  std::vector<std::string> llms;
  std::vector<std::string> datasets;
  std::vector<AdvTest> tests;
  std::map<std::tuple<std::string, std::string, AdvTest>, double> accuracy;
  std::map<std::pair<std::string, AdvTest>, double> test_average;  // over datasets
  std::map<std::string, double> overall;                           // mean of test averages
};

AdversarialTable adversarial_table(const std::vector<AdversarialResult>& results);

std::string to_csv(const CorrelationMatrix& m);
std::string to_csv(const PivotTable& t);
std::string to_csv(const AdversarialTable& t);
std::string agreement_csv(const std::vector<AgreementRow>& rows);
std::string to_csv(const MetricMatrix& m);

nlohmann::json to_json(const CorrelationMatrix& m);
nlohmann::json to_json(const PivotTable& t);
nlohmann::json to_json(const AdversarialTable& t);
nlohmann::json to_json(const MetricMatrix& m);
nlohmann::json agreement_json(const std::vector<AgreementRow>& rows);

}  // namespace topiceval
