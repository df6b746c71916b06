#pragma once

#include "arcadia/dag.hpp"
#include "arcadia/data_ingest.hpp"
#include "arcadia/stats.hpp"

#include <optional>

namespace arcadia {

/// Largest adjustment-set size the minimal-set search will try.
inline constexpr std::size_t kAdjustmentSearchCap = 8;

struct IdentificationResult {
    bool identifiable = false;
    std::optional<NodeSet> minimal_adjustment_set; ///< present iff identifiable
    std::size_t candidate_count_examined = 0;
    bool search_capped = false; ///< a larger valid set may exist beyond the cap
};

/// Back-door criterion: z holds no descendant of `treatment` and d-separates
/// treatment and outcome once the treatment's outgoing edges are removed.
bool backdoor_valid(const Dag& dag, std::string_view treatment, std::string_view outcome, const NodeSet& z);

/// Smallest valid back-door set, searching subsets of the non-descendants of
/// the treatment by increasing size. Ties go to the lexicographically first
/// sorted member list.
IdentificationResult minimal_adjustment_set(const Dag& dag, std::string_view treatment, std::string_view outcome,
                                            std::size_t cap = kAdjustmentSearchCap);

inline constexpr double kPropensityLow = 0.05;
inline constexpr double kPropensityHigh = 0.95;
inline constexpr double kOverlapRequired = 0.90;

struct PositivityResult {
    double overlap_share = 1.0;
    bool positivity_ok = true;
    bool skipped = true;          ///< empty adjustment set, nothing fitted
    bool model_failed = false;    ///< propensity model threw or did not converge
    bool dichotomized = false;    ///< continuous treatment split at its median
    double split_point = 0.0;
    std::optional<RegressionFit> propensity_model;
    std::string note;
};

/// Propensity overlap of the treatment given the adjustment set. A
/// continuous treatment is dichotomized as (t > median).
PositivityResult positivity_check(const PanelDataset& ds, const std::string& treatment, const NodeSet& z);

} // namespace arcadia
