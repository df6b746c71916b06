#include "arcadia/stats.hpp"

#include "arcadia/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace arcadia {

std::string_view to_string(ModelKind kind) noexcept { return kind == ModelKind::logit ? "logit" : "ols"; }

std::size_t RegressionFit::index_of(std::string_view name) const {
    auto it = std::find(regressors.begin(), regressors.end(), name);
    if (it == regressors.end()) throw StatError(fmt::format("'{}' is not a regressor of this model", name));
    return static_cast<std::size_t>(it - regressors.begin());
}

namespace {

constexpr double kRankTolerance = 1e-10;
const double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> default_names(std::vector<std::string> names, Eigen::Index p) {
    if (names.empty()) {
        for (Eigen::Index j = 0; j < p; ++j) names.push_back(fmt::format("x{}", j + 1));
    }
    if (static_cast<Eigen::Index>(names.size()) != p) throw StatError("regressor names do not match design width");
    return names;
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd d(x.rows(), x.cols() + 1);
    d.col(0).setOnes();
    d.rightCols(x.cols()) = x;
    return d;
}

double two_sided_t(double t, double df) {
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(df);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

double two_sided_z(double z) {
    if (std::isnan(z)) return 1.0;
    if (std::isinf(z)) return 0.0;
    boost::math::normal dist;
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(z))), 0.0, 1.0);
}

/// Column-equilibrated, rank-revealing QR of a design matrix.
struct ScaledQr {
    Eigen::VectorXd scale;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    std::vector<Eigen::Index> dependent; // original column indices beyond the rank

    explicit ScaledQr(const Eigen::MatrixXd& d) : scale(d.cols()) {
        Eigen::MatrixXd scaled = d;
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            double norm = d.col(j).norm();
            scale[j] = norm > 0.0 ? norm : 1.0;
            scaled.col(j) /= scale[j];
        }
        qr.setThreshold(kRankTolerance);
        qr.compute(scaled);
        auto perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < d.cols(); ++k) dependent.push_back(perm[k]);
        std::sort(dependent.begin(), dependent.end());
    }

    bool full_rank() const { return dependent.empty(); }

    Eigen::VectorXd solve(const Eigen::VectorXd& y) const { return qr.solve(y).cwiseQuotient(scale); }

    /// (D'D)^{-1} for a full-rank design.
    Eigen::MatrixXd inverse_gram() const {
        const Eigen::Index k = qr.cols();
        Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
        Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
        Eigen::MatrixXd inner = rinv * rinv.transpose();
        Eigen::MatrixXd cov = qr.colsPermutation() * inner * qr.colsPermutation().transpose();
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) cov(i, j) /= scale[i] * scale[j];
        }
        return cov;
    }
};

[[noreturn]] void throw_rank_deficient(const ScaledQr& qr, const std::vector<std::string>& names) {
    std::vector<std::string> dependent;
    for (auto j : qr.dependent) dependent.push_back(j == 0 ? std::string("(intercept)") : names[j - 1]);
    std::string list;
    for (const auto& d : dependent) list += (list.empty() ? "" : ", ") + d;
    throw RankDeficientError(fmt::format("rank-deficient design; dependent columns: {}", list), dependent);
}

/// Residuals of v after least-squares projection on [1, others]. Tolerates
/// rank-deficient `others`.
Eigen::VectorXd residualize(const Eigen::VectorXd& v, const Eigen::MatrixXd& others) {
    if (others.cols() == 0) return v.array() - v.mean();
    Eigen::MatrixXd d = with_intercept(others);
    ScaledQr qr(d);
    Eigen::VectorXd beta = qr.solve(v);
    return v - d * beta;
}

double softplus(double eta) { return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

double sigmoid(double eta) {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    double e = std::exp(eta);
    return e / (1.0 + e);
}

double logit_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
    return ll;
}

} // namespace

RegressionFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, std::vector<std::string> names) {
    const auto n = y.size();
    const auto p = x.cols();
    if (x.rows() != n) throw StatError("response and design have different row counts");
    if (n <= p + 1) throw StatError(fmt::format("need more than {} rows for {} regressors, have {}", p + 1, p, n));
    names = default_names(std::move(names), p);

    const double mean = y.mean();
    const double tss = (y.array() - mean).square().sum();
    if (!(tss > 0.0)) throw StatError("response has zero variance");

    Eigen::MatrixXd d = with_intercept(x);
    ScaledQr qr(d);
    if (!qr.full_rank()) throw_rank_deficient(qr, names);

    Eigen::VectorXd beta = qr.solve(y);
    Eigen::VectorXd resid = y - d * beta;
    const double rss = resid.squaredNorm();
    const double df = static_cast<double>(n - p - 1);
    const double sigma2 = rss / df;
    Eigen::MatrixXd cov = qr.inverse_gram() * sigma2;

    RegressionFit fit;
    fit.model_kind = ModelKind::ols;
    fit.regressors = std::move(names);
    fit.n = static_cast<std::size_t>(n);
    fit.intercept = beta[0];
    for (Eigen::Index j = 1; j <= p; ++j) {
        double b = beta[j];
        double se = std::sqrt(std::max(cov(j, j), 0.0));
        double t = se > 0.0 ? b / se : (b == 0.0 ? std::numeric_limits<double>::quiet_NaN() : kInf);
        fit.coefficients.push_back(b);
        fit.std_errors.push_back(se);
        fit.per_coef_p.push_back(two_sided_t(t, df));
    }
    const double nd = static_cast<double>(n);
    const double pd = static_cast<double>(p);
    fit.r2 = std::clamp(1.0 - rss / tss, 0.0, 1.0);
    fit.adj_r2 = 1.0 - (1.0 - fit.r2) * (nd - 1.0) / (nd - pd - 1.0);
    if (p == 0) {
        fit.joint_p = 1.0;
    } else if (rss == 0.0) {
        fit.joint_p = 0.0;
    } else {
        double f = ((tss - rss) / pd) / (rss / df);
        boost::math::fisher_f dist(pd, df);
        fit.joint_p = std::clamp(boost::math::cdf(boost::math::complement(dist, std::max(f, 0.0))), 0.0, 1.0);
    }
    fit.bic = nd * std::log(rss / nd) + (pd + 1.0) * std::log(nd);
    fit.log_likelihood = -0.5 * nd * (std::log(2.0 * M_PI * rss / nd) + 1.0);
    fit.converged = true;
    return fit;
}

RegressionFit fit_logit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, std::vector<std::string> names,
                        const LogitOptions& options) {
    const auto n = y.size();
    const auto p = x.cols();
    if (x.rows() != n) throw StatError("response and design have different row counts");
    if (n <= p + 1) throw StatError(fmt::format("need more than {} rows for {} regressors, have {}", p + 1, p, n));
    names = default_names(std::move(names), p);
    double ones = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) throw StatError(fmt::format("logit response row {} is not 0/1", i + 1));
        ones += y[i];
    }
    if (ones == 0.0 || ones == static_cast<double>(n)) throw StatError("logit response has a single class");

    Eigen::MatrixXd d = with_intercept(x);
    ScaledQr rank_check(d);
    if (!rank_check.full_rank()) throw_rank_deficient(rank_check, names);

    const double nd = static_cast<double>(n);
    const double ybar = ones / nd;
    const double ll0 = nd * (ybar * std::log(ybar) + (1.0 - ybar) * std::log(1.0 - ybar));

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
    beta[0] = std::log(ybar / (1.0 - ybar));
    Eigen::VectorXd eta = d * beta;
    double ll = logit_loglik(y, eta);

    RegressionFit fit;
    fit.model_kind = ModelKind::logit;
    fit.regressors = std::move(names);
    fit.n = static_cast<std::size_t>(n);
    fit.converged = false;

    Eigen::MatrixXd hessian;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        fit.iterations = it;
        Eigen::VectorXd mu = eta.unaryExpr(&sigmoid);
        Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
        Eigen::VectorXd grad = d.transpose() * (y - mu);
        hessian = d.transpose() * w.asDiagonal() * d;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
        if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all()) break;
        Eigen::VectorXd step = ldlt.solve(grad);
        if (!step.allFinite()) break;

        // Step halving guards against overshooting on flat likelihoods.
        double ll_new = ll;
        Eigen::VectorXd beta_new = beta;
        double t = 1.0;
        for (int half = 0; half < 30; ++half, t *= 0.5) {
            beta_new = beta + t * step;
            ll_new = logit_loglik(y, d * beta_new);
            if (ll_new >= ll - 1e-12) break;
        }
        double change = std::abs(ll_new - ll);
        beta = beta_new;
        eta = d * beta;
        ll = ll_new;
        if (change < options.tolerance) {
            fit.converged = true;
            break;
        }
    }

    {
        Eigen::VectorXd mu = eta.unaryExpr(&sigmoid);
        Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
        hessian = d.transpose() * w.asDiagonal() * d;
    }
    if (eta.cwiseAbs().maxCoeff() > options.separation_eta) fit.converged = false;

    Eigen::MatrixXd cov = hessian.completeOrthogonalDecomposition().pseudoInverse();
    fit.intercept = beta[0];
    for (Eigen::Index j = 1; j <= p; ++j) {
        double se = std::sqrt(std::max(cov(j, j), 0.0));
        fit.coefficients.push_back(beta[j]);
        fit.std_errors.push_back(se);
        double z = se > 0.0 ? beta[j] / se : std::numeric_limits<double>::quiet_NaN();
        fit.per_coef_p.push_back(two_sided_z(z));
    }
    const double pd = static_cast<double>(p);
    fit.log_likelihood = ll;
    fit.r2 = std::clamp(1.0 - ll / ll0, 0.0, 1.0);
    fit.adj_r2 = 1.0 - (ll - pd) / ll0;
    if (p == 0) {
        fit.joint_p = 1.0;
    } else {
        double lr = std::max(2.0 * (ll - ll0), 0.0);
        boost::math::chi_squared dist(pd);
        fit.joint_p = std::clamp(boost::math::cdf(boost::math::complement(dist, lr)), 0.0, 1.0);
    }
    fit.bic = -2.0 * ll + (pd + 1.0) * std::log(nd);
    return fit;
}

RegressionFit fit_node_model(const PanelDataset& ds, const std::string& response,
                             std::span<const std::string> regressors) {
    Eigen::VectorXd y = ds.column(response);
    Eigen::MatrixXd x = ds.gather(regressors);
    std::vector<std::string> names(regressors.begin(), regressors.end());
    if (ds.meta(response).kind == ColumnKind::binary) return fit_logit(y, x, std::move(names));
    return fit_ols(y, x, std::move(names));
}

Eigen::VectorXd predict(const RegressionFit& fit, const Eigen::MatrixXd& x) {
    if (static_cast<std::size_t>(x.cols()) != fit.coefficients.size()) {
        throw StatError("design width does not match the fitted model");
    }
    Eigen::Map<const Eigen::VectorXd> beta(fit.coefficients.data(), x.cols());
    Eigen::VectorXd eta = (x * beta).array() + fit.intercept;
    if (fit.model_kind == ModelKind::logit) return eta.unaryExpr(&sigmoid);
    return eta;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::ArrayXd ca = a.array() - a.mean();
    Eigen::ArrayXd cb = b.array() - b.mean();
    double denom = std::sqrt(ca.square().sum() * cb.square().sum());
    if (!(denom > 0.0)) return 0.0;
    return std::clamp((ca * cb).sum() / denom, -1.0, 1.0);
}

PartialCorrelation residual_correlation(const Eigen::VectorXd& child, const Eigen::VectorXd& parent,
                                        const Eigen::MatrixXd& others) {
    Eigen::VectorXd rc = residualize(child, others);
    Eigen::VectorXd rp = residualize(parent, others);
    auto degenerate = [](const Eigen::VectorXd& resid, const Eigen::VectorXd& raw) {
        double raw_ss = (raw.array() - raw.mean()).square().sum();
        double res_ss = (resid.array() - resid.mean()).square().sum();
        return !(raw_ss > 0.0) || res_ss <= 1e-20 * raw_ss;
    };
    if (degenerate(rc, child) || degenerate(rp, parent)) return {0.0, false};
    return {pearson(rc, rp), true};
}

PartialCorrelation residual_correlation(const PanelDataset& ds, const std::string& child,
                                        const std::string& parent, std::span<const std::string> others) {
    return residual_correlation(ds.column(child), ds.column(parent), ds.gather(others));
}

DeltaBic delta_bic(const PanelDataset& ds, const std::string& parent, const std::string& child) {
    DeltaBic out;
    out.mixed_response = ds.meta(parent).kind != ds.meta(child).kind;
    try {
        auto forward = fit_node_model(ds, child, std::span<const std::string>(&parent, 1));
        auto reverse = fit_node_model(ds, parent, std::span<const std::string>(&child, 1));
        if (!forward.converged || !reverse.converged || !std::isfinite(forward.bic) ||
            !std::isfinite(reverse.bic)) {
            out.defined = false;
            return out;
        }
        out.value = reverse.bic - forward.bic;
    } catch (const StatError&) {
        out.defined = false;
    }
    return out;
}

std::map<std::string, double> vif(const PanelDataset& ds, std::span<const std::string> parents) {
    std::map<std::string, double> out;
    if (parents.size() == 1) {
        out[parents.front()] = 1.0;
        return out;
    }
    Eigen::MatrixXd all = ds.gather(parents);
    for (std::size_t j = 0; j < parents.size(); ++j) {
        Eigen::MatrixXd others(all.rows(), all.cols() - 1);
        for (Eigen::Index k = 0, c = 0; k < all.cols(); ++k) {
            if (k != static_cast<Eigen::Index>(j)) others.col(c++) = all.col(k);
        }
        Eigen::VectorXd target = all.col(static_cast<Eigen::Index>(j));
        double tss = (target.array() - target.mean()).square().sum();
        if (!(tss > 0.0)) {
            out[parents[j]] = kInf;
            continue;
        }
        double rss = residualize(target, others).squaredNorm();
        double tolerance = rss / tss; // 1 - R2
        out[parents[j]] = tolerance < kRankTolerance ? kInf : 1.0 / tolerance;
    }
    return out;
}

std::vector<double> fdr_adjust(std::span<const double> p) {
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) throw StatError(fmt::format("p-value {} outside [0, 1]", v));
    }
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    std::vector<double> adjusted(m);
    double running = 1.0;
    for (std::size_t r = m; r-- > 0;) {
        auto i = order[r];
        running = std::min(running, p[i] * static_cast<double>(m) / static_cast<double>(r + 1));
        adjusted[i] = std::min(running, 1.0);
    }
    return adjusted;
}

} // namespace arcadia
