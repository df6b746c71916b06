#pragma once

#include "arcadia/dag.hpp"
#include "arcadia/data_ingest.hpp"
#include "arcadia/hyperparameters.hpp"
#include "arcadia/identification.hpp"
#include "arcadia/stats.hpp"

#include <json.hpp>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace arcadia {

struct EdgeStats {
    std::string parent;
    std::string child;
    double residual_corr = 0.0;
    bool residual_corr_defined = true;
    double coefficient = 0.0;
    double p_raw = 1.0;
    double p_fdr = 1.0;
    double delta_bic = 0.0;
    bool delta_bic_defined = true;
    bool mixed_response = false;
    bool from_model = true; ///< false when the child model failed and p_raw defaulted to 1
};

struct NodeDiagnostics {
    std::string node;
    std::vector<std::string> parents;
    std::optional<RegressionFit> fit; ///< absent for parentless nodes or failed fits
    std::map<std::string, double> vifs;
    bool adequate = true;
    bool significant = false;
    std::string error; ///< fit failure message, if any
};

struct GlobalDiagnostics {
    double sig_edge_ratio = 0.0;
    double sig_model_ratio = 0.0;
    double direction_accuracy = 0.0;
    double mean_r2 = 0.0;
    double mean_adj_r2 = 0.0;
    double composite_score = 0.0;
    std::size_t edge_count = 0;
    std::size_t significant_edges = 0;
    std::size_t model_count = 0;
    std::size_t significant_models = 0;
    std::size_t oriented_edges = 0;
};

/// Treatment -> outcome effect model (outcome on treatment plus adjustment set).
struct TreatmentEffect {
    bool fitted = false;
    bool is_dag_edge = false;
    std::vector<std::string> covariates;
    double coefficient = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0; ///< value used by the edge-significance criterion
    double residual_corr = 0.0;
    double delta_bic = 0.0;
    bool delta_bic_defined = false;
    bool mixed_response = false;
    std::optional<RegressionFit> model;
    std::string error;
};

enum class Criterion : std::size_t {
    identifiable = 0,
    orientation,
    edge_significance,
    global_validity,
    mean_r2,
    vif,
    positivity,
};

inline constexpr std::size_t kCriterionCount = 7;

std::string_view to_string(Criterion c) noexcept;

struct CriterionRecord {
    Criterion criterion = Criterion::identifiable;
    bool passed = false;
    std::optional<double> observed;  ///< absent when not computable
    std::optional<double> threshold; ///< absent for boolean criteria
    std::string detail;
};

using CriteriaRecords = std::array<CriterionRecord, kCriterionCount>;

/// Everything decide() needs, separated so the rule can be tested on its own.
struct CriteriaInputs {
    bool identifiable = false;
    std::optional<double> treatment_delta_bic;
    double treatment_p_adjusted = 1.0;
    bool negligible_effect_claimed = false;
    double composite_score = 0.0;
    double mean_r2 = 0.0;
    std::optional<double> max_vif; ///< absent when no node has parents
    bool positivity_ok = false;
};

struct Decision {
    bool ok = false;
    CriteriaRecords criteria;
};

Decision decide(const CriteriaInputs& in, const Hyperparameters& hp);

struct Diagnostics {
    StructuralReport structural;
    Dag pruned_dag;
    std::vector<NodeDiagnostics> nodes;
    std::vector<EdgeStats> edges;
    GlobalDiagnostics global;
    IdentificationResult identification;
    PositivityResult positivity;
    TreatmentEffect treatment_edge;
    CriteriaRecords criteria;
    bool statistics_computed = false;
    bool ok = false;
};

/// Structural preprocessing, node and edge statistics, global scores,
/// identification, positivity, treatment-effect model and the final decision.
/// Never throws for data-dependent failures; they are encoded in the result.
Diagnostics evaluate_dag(const Dag& dag, const PanelDataset& ds, const Hyperparameters& hp,
                         bool negligible_effect_claimed = false);

struct VifViolation {
    std::string node;
    std::string parent;
    double vif = 0.0;
};

struct FailureMemo {
    std::vector<CriterionRecord> failed;
    std::vector<EdgeStats> insignificant_edges;
    std::vector<std::string> weak_models; ///< nodes whose model is inadequate or jointly insignificant
    std::vector<VifViolation> vif_violations;
    std::string identification_status;
    bool structural_failure = false;
    std::string text;
};

FailureMemo build_failure_memo(const Diagnostics& diag, const Hyperparameters& hp);

/// Serializes a double; non-finite values become "inf", "-inf" or "nan".
nlohmann::json json_number(double v);

nlohmann::json to_json(const RegressionFit& fit);
nlohmann::json to_json(const StructuralReport& report);
nlohmann::json to_json(const CriterionRecord& record);
nlohmann::json to_json(const Diagnostics& diag);
nlohmann::json to_json(const FailureMemo& memo);

} // namespace arcadia
