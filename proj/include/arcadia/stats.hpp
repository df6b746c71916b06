#pragma once

#include "arcadia/data_ingest.hpp"

#include <Eigen/Dense>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace arcadia {

enum class ModelKind { ols, logit };

std::string_view to_string(ModelKind kind) noexcept;

/// Result of a node regression. Vectors are indexed by regressor; the
/// intercept is always fitted and reported separately.
struct RegressionFit {
    ModelKind model_kind = ModelKind::ols;
    std::vector<std::string> regressors;
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> per_coef_p;
    double r2 = 0.0;     ///< McFadden pseudo-R2 for logit
    double adj_r2 = 0.0;
    double joint_p = 1.0; ///< F-test (ols) or likelihood-ratio test (logit)
    double bic = 0.0;
    double log_likelihood = 0.0;
    std::size_t n = 0;
    std::size_t iterations = 0;
    bool converged = true;

    std::size_t p() const noexcept { return coefficients.size(); }
    /// Index of a named regressor; throws StatError.
    std::size_t index_of(std::string_view name) const;
};

/// Least squares with intercept. BIC = n ln(RSS/n) + (p+1) ln n.
/// Throws RankDeficientError naming the dependent columns, StatError when
/// n <= p + 1 or the response is constant.
RegressionFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                      std::vector<std::string> names = {});

struct LogitOptions {
    std::size_t max_iterations = 100;
    double tolerance = 1e-8;        ///< on the log-likelihood change
    double separation_eta = 30.0;   ///< |linear predictor| beyond which separation is declared
};

/// Maximum-likelihood logistic regression by Newton-Raphson (IRLS). Sets
/// converged=false on separation or when the iteration cap is hit; the
/// remaining fields then hold the last iterate and must not be trusted.
/// Throws StatError when y is not 0/1 with both classes, or n <= p + 1.
RegressionFit fit_logit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, std::vector<std::string> names = {},
                        const LogitOptions& options = {});

/// Logit for binary responses, OLS otherwise.
RegressionFit fit_node_model(const PanelDataset& ds, const std::string& response,
                             std::span<const std::string> regressors);

/// Linear predictor intercept + x * beta of a fitted model, mapped through
/// the logistic function for logit fits.
Eigen::VectorXd predict(const RegressionFit& fit, const Eigen::MatrixXd& x);

struct PartialCorrelation {
    double rho = 0.0;
    bool defined = true; ///< false when either residual vector has zero variance
};

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Correlation of the residuals of `child` and `parent` after each is
/// regressed (with intercept) on `others`.
PartialCorrelation residual_correlation(const Eigen::VectorXd& child, const Eigen::VectorXd& parent,
                                        const Eigen::MatrixXd& others);
PartialCorrelation residual_correlation(const PanelDataset& ds, const std::string& child,
                                        const std::string& parent, std::span<const std::string> others);

struct DeltaBic {
    double value = 0.0;
    bool defined = true;        ///< false when either direction's model failed
    bool mixed_response = false; ///< one side logit, the other OLS
};

/// BIC(parent ~ child) - BIC(child ~ parent); positive favours parent -> child.
DeltaBic delta_bic(const PanelDataset& ds, const std::string& parent, const std::string& child);

/// VIF per parent: 1 / (1 - R2) of that parent regressed on the others.
/// A single parent gets 1; perfect collinearity gives +infinity.
std::map<std::string, double> vif(const PanelDataset& ds, std::span<const std::string> parents);

/// Benjamini-Hochberg step-up adjustment, returned in input order.
/// Throws StatError on values outside [0, 1].
std::vector<double> fdr_adjust(std::span<const double> p);

} // namespace arcadia
