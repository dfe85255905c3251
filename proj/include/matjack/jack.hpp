#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "matjack/cores.hpp"
#include "matjack/errors.hpp"

// Generic jackknife estimators over core replicates or scalar lists.

namespace matjack {

struct JackknifeEstimate {
    double value = 0.0;                      ///< Jack or Jack_p
    int p = 2;                               ///< norm order
    int s = 0;                               ///< replicate count
    std::vector<double> per_replicate_deviations;  ///< ||T_j - mean||_F, p = 2 only
};

/// Jack^2 = sum_j ||T_j - mean||_F^2, evaluated in O(s^2) per replicate
/// for rank-one representations.
inline JackknifeEstimate jack_frobenius(const CoreReplicates& cores) {
    const int s = cores.count();
    if (s < 2) throw ParameterError("jack_frobenius: need at least 2 replicates");
    JackknifeEstimate est;
    est.p = 2;
    est.s = s;
    double sum = 0.0;
    for (int j = 0; j < s; ++j) {
        const double dev2 = cores.squared_deviation(j);
        est.per_replicate_deviations.push_back(std::sqrt(std::max(dev2, 0.0)));
        sum += dev2;
    }
    est.value = std::sqrt(std::max(sum, 0.0));
    return est;
}

/// Tukey's variance estimate: sum_j |E_j - mean|^2.
inline double tukey_scalar(const std::vector<double>& values) {
    const int s = static_cast<int>(values.size());
    if (s < 2) throw ParameterError("tukey_scalar: need at least 2 replicates");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(s);
    double sum = 0.0;
    for (double v : values) sum += (v - mean) * (v - mean);
    return sum;
}

/// Schatten p-norm variance estimate for even p >= 2, anchored at one
/// replicate (default: the last). With D_j = T_j - T_anchor,
///   Vhat1 = (1/2) sum D_j^T D_j,  Vhat2 = (1/2) sum D_j D_j^T,
///   Jack_p = 2^{-1/p} sqrt(2(p-1)) (||Vhat1||_{p/2}^{p/2} + ||Vhat2||_{p/2}^{p/2})^{1/p}.
/// Schatten norms of the PSD proxies come from their eigenvalues.
inline JackknifeEstimate jack_schatten(const CoreReplicates& cores, int p, int anchor = -1) {
    const int s = cores.count();
    if (s < 2) throw ParameterError("jack_schatten: need at least 2 replicates");
    if (p < 2 || p % 2 != 0) throw ParameterError("jack_schatten: p must be an even integer >= 2");
    if (anchor < 0) anchor = s - 1;
    if (anchor >= s) throw ParameterError("jack_schatten: anchor out of range");

    const MatrixXd t_anchor = cores.materialize(anchor);
    MatrixXd v1 = MatrixXd::Zero(t_anchor.cols(), t_anchor.cols());
    MatrixXd v2 = MatrixXd::Zero(t_anchor.rows(), t_anchor.rows());
    for (int j = 0; j < s; ++j) {
        if (j == anchor) continue;
        const MatrixXd d = cores.materialize(j) - t_anchor;
        v1.noalias() += 0.5 * d.transpose() * d;
        v2.noalias() += 0.5 * d * d.transpose();
    }

    const double half_p = static_cast<double>(p) / 2.0;
    auto schatten_power = [&](const MatrixXd& m) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
        double sum = 0.0;
        for (Index i = 0; i < eig.eigenvalues().size(); ++i)
            sum += std::pow(std::max(eig.eigenvalues()[i], 0.0), half_p);
        return sum;  // ||m||_{p/2}^{p/2} for PSD m
    };

    JackknifeEstimate est;
    est.p = p;
    est.s = s;
    est.value = std::pow(2.0, -1.0 / p) * std::sqrt(2.0 * (p - 1)) *
                std::pow(schatten_power(v1) + schatten_power(v2), 1.0 / p);
    return est;
}

/// Quenouille bias estimate in core coordinates: (s-1) (mean core - full core).
inline MatrixXd quenouille_bias(const CoreReplicates& cores, const MatrixXd& full_core) {
    if (full_core.rows() != cores.mean().rows() || full_core.cols() != cores.mean().cols())
        throw ParameterError("quenouille_bias: core dimension mismatch");
    return static_cast<double>(cores.count() - 1) * (cores.mean() - full_core);
}

/// Tukey estimate per singular-value index, from a dense SVD of each core.
inline std::vector<double> singular_value_tukey(const CoreReplicates& cores) {
    const int s = cores.count();
    if (s < 2) throw ParameterError("singular_value_tukey: need at least 2 replicates");
    std::vector<std::vector<double>> sigma_by_index;
    for (int j = 0; j < s; ++j) {
        Eigen::JacobiSVD<MatrixXd> svd(cores.materialize(j));
        const VectorXd& sv = svd.singularValues();
        if (sigma_by_index.empty()) sigma_by_index.resize(static_cast<std::size_t>(sv.size()));
        for (Index i = 0; i < sv.size(); ++i)
            sigma_by_index[static_cast<std::size_t>(i)].push_back(sv[i]);
    }
    std::vector<double> out;
    for (const auto& values : sigma_by_index) out.push_back(tukey_scalar(values));
    return out;
}

/// Replace each core by its best rank-r approximation. Singular values are
/// kept in Eigen's decreasing order, so ties break toward the lowest indices.
inline CoreReplicates truncate_cores(const CoreReplicates& cores, int r) {
    if (r < 1 || r > static_cast<int>(std::min(cores.mean().rows(), cores.mean().cols())))
        throw ParameterError("truncate_cores: rank out of range");
    std::vector<MatrixXd> out;
    for (int j = 0; j < cores.count(); ++j) {
        const MatrixXd t = cores.materialize(j);
        Eigen::JacobiSVD<MatrixXd> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.push_back(svd.matrixU().leftCols(r) *
                      svd.singularValues().head(r).asDiagonal() *
                      svd.matrixV().leftCols(r).transpose());
    }
    return CoreReplicates::from_dense(std::move(out));
}

}  // namespace matjack
