#include "arcadia/identification.hpp"

#include "arcadia/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <vector>

namespace arcadia {

bool backdoor_valid(const Dag& dag, std::string_view treatment, std::string_view outcome, const NodeSet& z) {
    auto desc = descendants(dag, treatment);
    dag.index_of(outcome);
    for (const auto& v : z) {
        dag.index_of(v);
        if (desc.count(v)) return false;
    }
    std::vector<Edge> outgoing;
    for (const auto& e : dag.edges()) {
        if (e.parent == treatment) outgoing.push_back(e);
    }
    return d_separated(dag.without_edges(outgoing), treatment, outcome, z);
}

IdentificationResult minimal_adjustment_set(const Dag& dag, std::string_view treatment, std::string_view outcome,
                                            std::size_t cap) {
    IdentificationResult result;
    auto desc = descendants(dag, treatment);
    dag.index_of(outcome);

    std::vector<std::string> pool;
    for (const auto& n : dag.nodes()) {
        if (n != treatment && n != outcome && !desc.count(n)) pool.push_back(n);
    }
    std::sort(pool.begin(), pool.end());

    std::vector<Edge> outgoing;
    for (const auto& e : dag.edges()) {
        if (e.parent == treatment) outgoing.push_back(e);
    }
    const Dag backdoor_graph = dag.without_edges(outgoing);

    const std::size_t max_size = std::min(cap, pool.size());
    for (std::size_t k = 0; k <= max_size; ++k) {
        // Lexicographic k-combinations of the sorted pool.
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        for (;;) {
            NodeSet z;
            for (auto i : idx) z.insert(pool[i]);
            ++result.candidate_count_examined;
            if (d_separated(backdoor_graph, treatment, outcome, z)) {
                result.identifiable = true;
                result.minimal_adjustment_set = std::move(z);
                return result;
            }
            // Advance to the next combination.
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == pool.size() - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    result.search_capped = pool.size() > cap;
    return result;
}

PositivityResult positivity_check(const PanelDataset& ds, const std::string& treatment, const NodeSet& z) {
    PositivityResult r;
    if (z.empty()) {
        r.note = "empty adjustment set; overlap check skipped";
        return r;
    }
    r.skipped = false;

    Eigen::VectorXd t = ds.column(treatment);
    if (ds.meta(treatment).kind != ColumnKind::binary) {
        std::vector<double> sorted(t.data(), t.data() + t.size());
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        r.dichotomized = true;
        r.split_point = median;
        t = (t.array() > median).cast<double>();
    }

    std::vector<std::string> covariates(z.begin(), z.end());
    Eigen::MatrixXd x = ds.gather(covariates);
    try {
        auto fit = fit_logit(t, x, covariates);
        Eigen::VectorXd e = predict(fit, x);
        std::size_t inside = 0;
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            if (e[i] >= kPropensityLow && e[i] <= kPropensityHigh) ++inside;
        }
        r.overlap_share = static_cast<double>(inside) / static_cast<double>(e.size());
        r.model_failed = !fit.converged;
        r.positivity_ok = fit.converged && r.overlap_share > kOverlapRequired;
        if (r.model_failed) r.note = "propensity model did not converge (possible separation)";
        r.propensity_model = std::move(fit);
    } catch (const StatError& e) {
        r.overlap_share = 0.0;
        r.model_failed = true;
        r.positivity_ok = false;
        r.note = fmt::format("propensity model failed: {}", e.what());
    }
    return r;
}

} // namespace arcadia
