#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "matjack/cores.hpp"
#include "matjack/errors.hpp"
#include "matjack/jack.hpp"
#include "matjack/matrix_source.hpp"

// Randomized SVD with subspace iteration and its jackknife core matrices.

namespace matjack {

namespace detail {

/// Thin QR: Y = Q R with Q (d x s) orthonormal and R (s x s) upper triangular.
inline void economy_qr(const MatrixXd& y, MatrixXd& q, MatrixXd& r) {
    const Index s = y.cols();
    Eigen::HouseholderQR<MatrixXd> qr(y);
    q = qr.householderQ() * MatrixXd::Identity(y.rows(), s);
    r = qr.matrixQR().topRows(s).triangularView<Eigen::Upper>();
}

/// Flip singular-vector pairs so the largest-magnitude component of each
/// left vector is positive; keeps projector and entry tests reproducible.
inline void fix_svd_signs(MatrixXd& u, MatrixXd& v) {
    for (Index j = 0; j < u.cols(); ++j) {
        Index imax = 0;
        u.col(j).cwiseAbs().maxCoeff(&imax);
        if (u(imax, j) < 0) {
            u.col(j) = -u.col(j);
            v.col(j) = -v.col(j);
        }
    }
}

}  // namespace detail

struct RsvdResult {
    MatrixXd u;        ///< d1 x s, orthonormal columns
    VectorXd sigma;    ///< s singular values, nonincreasing
    MatrixXd v;        ///< d2 x s, orthonormal columns
    MatrixXd r;        ///< s x s upper triangular factor of the sketch Y
    MatrixXd u_tilde;  ///< s x s inner SVD factor
    int q = 0;
    std::uint64_t seed = 0;
    bool degenerate = false;  ///< Y numerically rank-deficient

    MatrixXd materialize() const { return u * sigma.asDiagonal() * v.transpose(); }
};

/// Randomized SVD driven by an explicit sketch: Y = A (A^T A)^q Omega,
/// economy QR, C = Q^T A, inner economy SVD, U = Q Utilde. No inner
/// re-orthonormalization between the q products; intended for q <= 2.
inline RsvdResult rsvd_with_sketch(const MatrixSource& a, const MatrixXd& omega, int q,
                                   std::uint64_t seed = 0) {
    if (q < 0) throw ParameterError("rsvd: q must be nonnegative");
    if (omega.rows() != a.cols()) throw ParameterError("rsvd: sketch dimension mismatch");
    const Index s = omega.cols();
    if (s < 1 || s > std::min(a.rows(), a.cols()))
        throw ParameterError("rsvd: need 1 <= s <= min(d1, d2)");

    MatrixXd z = omega;
    for (int k = 0; k < q; ++k) z = a.multiply_adjoint(a.multiply(z));
    const MatrixXd y = a.multiply(z);

    RsvdResult res;
    res.q = q;
    res.seed = seed;
    MatrixXd qmat;
    detail::economy_qr(y, qmat, res.r);

    double max_diag = 0.0;
    for (Index i = 0; i < s; ++i) max_diag = std::max(max_diag, std::abs(res.r(i, i)));
    for (Index i = 0; i < s; ++i)
        if (std::abs(res.r(i, i)) <= 1e-14 * max_diag) res.degenerate = true;

    const MatrixXd c = a.multiply_adjoint(qmat).transpose();  // Q^T A, s x d2
    Eigen::BDCSVD<MatrixXd> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    res.u_tilde = svd.matrixU();
    res.sigma = svd.singularValues();
    res.v = svd.matrixV();
    detail::fix_svd_signs(res.u_tilde, res.v);
    res.u = qmat * res.u_tilde;
    return res;
}

inline RsvdResult rsvd(const MatrixSource& a, Index s, int q, std::uint64_t seed) {
    return rsvd_with_sketch(a, gaussian_sketch(a.cols(), s, seed).values, q, seed);
}

/// O(s^4) reference path: for each j, QR-factorize R without column j and
/// form T_j = Utilde^T Qtilde Qtilde^T Utilde Sigma.
inline CoreReplicates rsvd_cores_baseline(const RsvdResult& res) {
    const Index s = res.sigma.size();
    std::vector<MatrixXd> cores;
    for (Index j = 0; j < s; ++j) {
        MatrixXd r_del(s, s - 1);
        if (j > 0) r_del.leftCols(j) = res.r.leftCols(j);
        if (j < s - 1) r_del.rightCols(s - 1 - j) = res.r.rightCols(s - 1 - j);
        Eigen::HouseholderQR<MatrixXd> qr(r_del);
        const MatrixXd q_tilde = qr.householderQ() * MatrixXd::Identity(s, s - 1);
        const MatrixXd w = q_tilde.transpose() * res.u_tilde;  // (s-1) x s
        cores.push_back(w.transpose() * w * res.sigma.asDiagonal());
    }
    return CoreReplicates::from_dense(std::move(cores));
}

namespace detail {

/// Unit vector q spanning the orthogonal complement of the columns of R
/// with column j deleted. The column-deleted R is upper Hessenberg, so at
/// most s - 1 - j Givens rotations triangularize it; applying their
/// transposes to e_s in reverse yields q. Returns false on a zero pivot.
inline bool hessenberg_null_vector(const MatrixXd& r, Index j, VectorXd& q_out) {
    const Index s = r.rows();
    MatrixXd h(s, s - 1);
    if (j > 0) h.leftCols(j) = r.leftCols(j);
    if (j < s - 1) h.rightCols(s - 1 - j) = r.rightCols(s - 1 - j);

    std::vector<std::pair<double, double>> rotations;  // (c, sn) per column k = j..s-2
    bool ok = true;
    for (Index k = j; k < s - 1; ++k) {
        const double a = h(k, k);
        const double b = h(k + 1, k);
        const double rad = std::hypot(a, b);
        double c = 1.0, sn = 0.0;
        if (rad == 0.0) {
            ok = false;  // exactly dependent columns; identity rotation
        } else {
            c = a / rad;
            sn = b / rad;
        }
        for (Index col = k; col < s - 1; ++col) {
            const double t0 = h(k, col);
            const double t1 = h(k + 1, col);
            h(k, col) = c * t0 + sn * t1;
            h(k + 1, col) = -sn * t0 + c * t1;
        }
        rotations.emplace_back(c, sn);
    }

    q_out = VectorXd::Zero(s);
    q_out[s - 1] = 1.0;
    // q = G_j^T (G_{j+1}^T ( ... (G_{s-2}^T e_s)))
    for (Index k = s - 2; k >= j && k >= 0; --k) {
        const auto [c, sn] = rotations[static_cast<std::size_t>(k - j)];
        const double t0 = q_out[k];
        const double t1 = q_out[k + 1];
        q_out[k] = c * t0 - sn * t1;
        q_out[k + 1] = sn * t0 + c * t1;
    }
    return ok;
}

}  // namespace detail

/// O(s^2)-per-replicate path: T_j = Sigma + x_j y_j^T with
/// x_j = -Utilde^T q and y_j = Sigma Utilde^T q. Replicates whose Givens
/// schedule hits a zero pivot fall back to the baseline computation.
inline CoreReplicates rsvd_cores_fast(const RsvdResult& res) {
    const Index s = res.sigma.size();
    std::vector<VectorXd> xs(static_cast<std::size_t>(s)), ys(static_cast<std::size_t>(s));
    std::vector<MatrixXd> overrides(static_cast<std::size_t>(s));
    std::vector<int> fallbacks;

    for (Index j = 0; j < s; ++j) {
        VectorXd q;
        const bool ok = detail::hessenberg_null_vector(res.r, j, q);
        const VectorXd w = res.u_tilde.transpose() * q;
        xs[static_cast<std::size_t>(j)] = -w;
        ys[static_cast<std::size_t>(j)] = res.sigma.asDiagonal() * w;
        if (!ok) {
            // Zero pivot: recompute this replicate densely.
            MatrixXd r_del(s, s - 1);
            if (j > 0) r_del.leftCols(j) = res.r.leftCols(j);
            if (j < s - 1) r_del.rightCols(s - 1 - j) = res.r.rightCols(s - 1 - j);
            Eigen::HouseholderQR<MatrixXd> qr(r_del);
            const MatrixXd q_tilde = qr.householderQ() * MatrixXd::Identity(s, s - 1);
            const MatrixXd wt = q_tilde.transpose() * res.u_tilde;
            overrides[static_cast<std::size_t>(j)] =
                wt.transpose() * wt * res.sigma.asDiagonal();
            fallbacks.push_back(static_cast<int>(j));
        }
    }
    return CoreReplicates::from_rank_one(MatrixXd(res.sigma.asDiagonal()), std::move(xs),
                                         std::move(ys), std::move(overrides),
                                         std::move(fallbacks));
}

/// Replace each core by the rank-one projector onto its i-th left (or
/// right) singular vector; i is 1-based. Feeding the result to
/// jack_frobenius estimates Var of the corresponding singular projector.
enum class ProjectorSide { Left, Right };

inline CoreReplicates projector_replicates(const CoreReplicates& cores, int i,
                                           ProjectorSide side) {
    const int s = cores.count();
    if (i < 1) throw ParameterError("projector_replicates: index must be >= 1");
    std::vector<MatrixXd> out;
    for (int j = 0; j < s; ++j) {
        const MatrixXd t = cores.materialize(j);
        Eigen::JacobiSVD<MatrixXd> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const VectorXd& sv = svd.singularValues();
        if (i > static_cast<int>(sv.size()))
            throw ParameterError("projector_replicates: index exceeds core dimension");
        // Only a tie between sigma_i and sigma_{i+1} is fatal: a tie among
        // the values above index i leaves the projector computable, and its
        // instability is exactly what a large Jack value should reveal.
        const double scale = sv[0] > 0 ? sv[0] : 1.0;
        const double tol = 1e-8 * scale;
        if (i < static_cast<int>(sv.size()) && sv[i - 1] - sv[i] <= tol)
            throw DegeneracyError("projector_replicates: singular-value tie at index " +
                                      std::to_string(i) + " in replicate " + std::to_string(j),
                                  j);
        const VectorXd vec = side == ProjectorSide::Left ? VectorXd(svd.matrixU().col(i - 1))
                                                         : VectorXd(svd.matrixV().col(i - 1));
        out.push_back(vec * vec.transpose());
    }
    return CoreReplicates::from_dense(std::move(out));
}

/// Tukey variance estimate of entry (m, n) of the approximation, computed
/// from the replicate entries E_j = U(m,:) T_j V(n,:)^T. With `absolute`,
/// the replicates are |E_j| (used for singular-vector visualizations).
inline double entry_tukey(const CoreReplicates& cores, const MatrixXd& u, const MatrixXd& v,
                          Index m, Index n, bool absolute = false) {
    if (m < 0 || m >= u.rows() || n < 0 || n >= v.rows())
        throw ParameterError("entry_tukey: index out of range");
    std::vector<double> entries;
    for (int j = 0; j < cores.count(); ++j) {
        const double e = u.row(m) * cores.materialize(j) * v.row(n).transpose();
        entries.push_back(absolute ? std::abs(e) : e);
    }
    return tukey_scalar(entries);
}

}  // namespace matjack
