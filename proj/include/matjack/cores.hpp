#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "matjack/errors.hpp"

// The s jackknife core matrices T_j together with their mean. Two storage
// forms: dense (one s x s matrix per replicate) and rank-one (shared base
// matrix plus per-replicate vector pair, T_j = base + x_j y_j^T). A dense
// per-replicate override slot supports fallback replicates inside a
// rank-one set. The mean is always materialized once, in fixed order.

namespace matjack {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class CoreReplicates {
public:
    static CoreReplicates from_dense(std::vector<MatrixXd> cores) {
        if (cores.empty()) throw ParameterError("CoreReplicates: no replicates");
        CoreReplicates c;
        c.dense_ = std::move(cores);
        c.finalize_mean();
        return c;
    }

    static CoreReplicates from_rank_one(MatrixXd base, std::vector<VectorXd> xs,
                                        std::vector<VectorXd> ys,
                                        std::vector<MatrixXd> overrides = {},
                                        std::vector<int> fallbacks = {}) {
        if (xs.empty() || xs.size() != ys.size())
            throw ParameterError("CoreReplicates: inconsistent rank-one data");
        CoreReplicates c;
        c.base_ = std::move(base);
        c.xs_ = std::move(xs);
        c.ys_ = std::move(ys);
        if (overrides.empty()) overrides.resize(c.xs_.size());
        c.overrides_ = std::move(overrides);
        c.fallbacks_ = std::move(fallbacks);
        c.finalize_mean();
        return c;
    }

    int count() const {
        return static_cast<int>(rank_one() ? xs_.size() : dense_.size());
    }
    Index dim() const { return mean_.rows(); }
    bool rank_one() const { return dense_.empty(); }
    const MatrixXd& mean() const { return mean_; }
    const MatrixXd& base() const { return base_; }
    const std::vector<int>& fallback_indices() const { return fallbacks_; }

    bool has_override(int j) const {
        return rank_one() && overrides_[static_cast<std::size_t>(j)].size() > 0;
    }

    MatrixXd materialize(int j) const {
        if (!rank_one()) return dense_[static_cast<std::size_t>(j)];
        if (has_override(j)) return overrides_[static_cast<std::size_t>(j)];
        return base_ + xs_[static_cast<std::size_t>(j)] * ys_[static_cast<std::size_t>(j)].transpose();
    }

    const VectorXd& x(int j) const { return xs_[static_cast<std::size_t>(j)]; }
    const VectorXd& y(int j) const { return ys_[static_cast<std::size_t>(j)]; }

    /// ||T_j - mean||_F^2. O(s^2) for rank-one replicates via the expansion
    /// ||D + x y^T||^2 = ||D||^2 + 2 x^T D y + ||x||^2 ||y||^2, D = base - mean.
    double squared_deviation(int j) const {
        if (rank_one() && !has_override(j)) {
            const MatrixXd d = base_ - mean_;  // shared across j; small, recompute is O(s^2)
            const VectorXd& xv = xs_[static_cast<std::size_t>(j)];
            const VectorXd& yv = ys_[static_cast<std::size_t>(j)];
            return d.squaredNorm() + 2.0 * xv.dot(d * yv) + xv.squaredNorm() * yv.squaredNorm();
        }
        return (materialize(j) - mean_).squaredNorm();
    }

private:
    CoreReplicates() = default;

    void finalize_mean() {
        const int s = count();
        mean_ = MatrixXd::Zero(materialize(0).rows(), materialize(0).cols());
        for (int j = 0; j < s; ++j) mean_ += materialize(j);
        mean_ /= static_cast<double>(s);
    }

    MatrixXd base_;
    std::vector<VectorXd> xs_, ys_;
    std::vector<MatrixXd> overrides_;
    std::vector<MatrixXd> dense_;
    std::vector<int> fallbacks_;
    MatrixXd mean_;
};

}  // namespace matjack
