#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "matjack/cores.hpp"
#include "matjack/errors.hpp"
#include "matjack/matrix_source.hpp"
#include "matjack/rsvd.hpp"

// Single-view Nystrom approximation of a PSD matrix with stability shift,
// and its jackknife cores in baseline and downdating forms.

namespace matjack {

struct NystromResult {
    MatrixXd v;       ///< d x s, orthonormal columns
    VectorXd lambda;  ///< s eigenvalues, nonincreasing, >= 0 after the clamp
    MatrixXd q;       ///< d x s
    MatrixXd r;       ///< s x s upper triangular
    MatrixXd b;       ///< s x s, B = Omega^T Y
    MatrixXd c;       ///< s x s upper-triangular Cholesky factor, (B+B^T)/2 = C^T C
    MatrixXd u;       ///< s x s orthogonal inner factor
    MatrixXd w;       ///< s x s, W = R C^{-1} (retained; S-base is W W^T)
    VectorXd sigma;   ///< singular values of W
    double nu = 0.0;  ///< stability shift
    std::uint64_t seed = 0;

    MatrixXd materialize() const { return v * lambda.asDiagonal() * v.transpose(); }
};

/// Single-view Nystrom with an explicit sketch. The shift uses the spectral
/// norm of Y (exact, via an economy SVD) scaled by eps_mach = 2^-52 and the
/// tunable multiplier.
inline NystromResult nystrom_with_sketch(const MatrixSource& a, const MatrixXd& omega,
                                         std::uint64_t seed = 0,
                                         double shift_multiplier = 1.0) {
    if (!a.is_square() || !a.is_symmetric())
        throw ParameterError("nystrom: input must be symmetric PSD (diagonal or symmetric-dense)");
    if (omega.rows() != a.rows()) throw ParameterError("nystrom: sketch dimension mismatch");
    const Index s = omega.cols();
    if (s < 1 || s > a.rows()) throw ParameterError("nystrom: need 1 <= s <= d");

    NystromResult res;
    res.seed = seed;

    MatrixXd y = a.multiply(omega);
    const double spec = Eigen::BDCSVD<MatrixXd>(y).singularValues()[0];
    res.nu = std::ldexp(1.0, -52) * shift_multiplier * spec;
    y += res.nu * omega;

    detail::economy_qr(y, res.q, res.r);
    res.b = omega.transpose() * y;

    Eigen::LLT<MatrixXd> llt(0.5 * (res.b + res.b.transpose()));
    if (llt.info() != Eigen::Success)
        throw NumericalError(
            "nystrom: Cholesky of the symmetrized B failed; try a larger --shift-multiplier");
    res.c = llt.matrixU();  // upper triangular, B = C^T C

    res.w = res.r;
    res.c.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(
        res.w);  // W C = R  =>  W = R C^{-1}
    MatrixXd z;
    {
        Eigen::BDCSVD<MatrixXd> svd(res.w, Eigen::ComputeThinU | Eigen::ComputeThinV);
        res.u = svd.matrixU();
        res.sigma = svd.singularValues();
        z = svd.matrixV();
        detail::fix_svd_signs(res.u, z);
    }
    res.lambda = (res.sigma.array().square() - res.nu).max(0.0);
    res.v = res.q * res.u;
    return res;
}

inline NystromResult nystrom(const MatrixSource& a, Index s, std::uint64_t seed,
                             double shift_multiplier = 1.0) {
    return nystrom_with_sketch(a, gaussian_sketch(a.rows(), s, seed).values, seed,
                               shift_multiplier);
}

/// O(s^4) reference path: T_j = U^T R_j B_j^{-1} R_j^T U with column j of R
/// and row/column j of B deleted.
inline CoreReplicates nystrom_cores_baseline(const NystromResult& res) {
    const Index s = res.sigma.size();
    if (s < 2) throw ParameterError("nystrom_cores_baseline: jackknife needs s >= 2");
    std::vector<MatrixXd> cores;
    for (Index j = 0; j < s; ++j) {
        MatrixXd r_del(s, s - 1);
        MatrixXd b_del(s - 1, s - 1);
        Index cc = 0;
        for (Index col = 0; col < s; ++col) {
            if (col == j) continue;
            r_del.col(cc) = res.r.col(col);
            Index rr = 0;
            for (Index row = 0; row < s; ++row) {
                if (row == j) continue;
                b_del(rr, cc) = res.b(row, col);
                ++rr;
            }
            ++cc;
        }
        Eigen::LLT<MatrixXd> llt(0.5 * (b_del + b_del.transpose()));
        if (llt.info() != Eigen::Success)
            throw DegeneracyError("nystrom_cores_baseline: principal submatrix " +
                                      std::to_string(j) + " is not positive definite",
                                  static_cast<int>(j));
        const MatrixXd solved = llt.solve(r_del.transpose());  // B_j^{-1} R_j^T
        const MatrixXd s_j = r_del * solved;
        cores.push_back(res.u.transpose() * s_j * res.u);
    }
    return CoreReplicates::from_dense(std::move(cores));
}

/// Cholesky factor of C^T C with row and column j removed: delete column j
/// of C and retriangularize the resulting Hessenberg band with Givens
/// rotations. O(s^2).
inline MatrixXd cholesky_delete_downdate(const MatrixXd& c, Index j) {
    const Index s = c.rows();
    if (c.cols() != s) throw ParameterError("cholesky_delete_downdate: factor must be square");
    if (j < 0 || j >= s) throw ParameterError("cholesky_delete_downdate: index out of range");
    MatrixXd h(s, s - 1);
    if (j > 0) h.leftCols(j) = c.leftCols(j);
    if (j < s - 1) h.rightCols(s - 1 - j) = c.rightCols(s - 1 - j);
    for (Index k = j; k < s - 1; ++k) {
        const double a = h(k, k);
        const double b = h(k + 1, k);
        const double rad = std::hypot(a, b);
        if (rad == 0.0)
            throw NumericalError("cholesky_delete_downdate: zero pivot at column " +
                                 std::to_string(k));
        const double cr = a / rad, sn = b / rad;
        for (Index col = k; col < s - 1; ++col) {
            const double t0 = h(k, col);
            const double t1 = h(k + 1, col);
            h(k, col) = cr * t0 + sn * t1;
            h(k + 1, col) = -sn * t0 + cr * t1;
        }
    }
    MatrixXd out = h.topRows(s - 1).triangularView<Eigen::Upper>();
    for (Index i = 0; i < s - 1; ++i) {
        if (out(i, i) == 0.0)
            throw NumericalError("cholesky_delete_downdate: lost positivity at diagonal " +
                                 std::to_string(i));
        if (out(i, i) < 0.0) out.row(i) = -out.row(i);
    }
    return out;
}

/// O(s^2)-per-replicate path over the S-representation: base M = W W^T and
/// S_j = M - x_j x_j^T with x_j from the Schur-complement update formula,
/// index j viewed as moved to the last position. Jack statistics on S_j
/// match those on T_j = U^T S_j U because U is orthogonal.
inline CoreReplicates nystrom_cores_fast(const NystromResult& res) {
    const Index s = res.sigma.size();
    if (s < 2) throw ParameterError("nystrom_cores_fast: jackknife needs s >= 2");
    const MatrixXd m = res.w * res.w.transpose();  // R B^{-1} R^T

    std::vector<VectorXd> xs(static_cast<std::size_t>(s)), ys(static_cast<std::size_t>(s));
    std::vector<MatrixXd> overrides(static_cast<std::size_t>(s));
    std::vector<int> fallbacks;

    for (Index j = 0; j < s; ++j) {
        bool ok = true;
        VectorXd x = VectorXd::Zero(s);
        try {
            const MatrixXd c_j = cholesky_delete_downdate(res.c, j);
            VectorXd b_col(s - 1);
            Index rr = 0;
            for (Index row = 0; row < s; ++row) {
                if (row == j) continue;
                b_col[rr++] = 0.5 * (res.b(row, j) + res.b(j, row));
            }
            const double beta = res.b(j, j);
            // B_j z = b via the two triangular solves of C_j^T C_j.
            VectorXd z = c_j.triangularView<Eigen::Upper>().transpose().solve(b_col);
            z = c_j.triangularView<Eigen::Upper>().solve(z);
            const double schur = beta - b_col.dot(z);
            if (schur <= 0.0) {
                ok = false;
            } else {
                VectorXd dir = VectorXd::Zero(s);
                Index zz = 0;
                for (Index row = 0; row < s; ++row) dir[row] = row == j ? 1.0 : -z[zz++];
                x = (res.r * dir) / std::sqrt(schur);
            }
        } catch (const NumericalError&) {
            ok = false;
        }
        if (ok) {
            xs[static_cast<std::size_t>(j)] = x;
            ys[static_cast<std::size_t>(j)] = -x;
        } else {
            // Schur complement not positive: recompute this replicate densely.
            xs[static_cast<std::size_t>(j)] = VectorXd::Zero(s);
            ys[static_cast<std::size_t>(j)] = VectorXd::Zero(s);
            MatrixXd r_del(s, s - 1), b_del(s - 1, s - 1);
            Index cc = 0;
            for (Index col = 0; col < s; ++col) {
                if (col == j) continue;
                r_del.col(cc) = res.r.col(col);
                Index rr = 0;
                for (Index row = 0; row < s; ++row) {
                    if (row == j) continue;
                    b_del(rr++, cc) = res.b(row, col);
                }
                ++cc;
            }
            Eigen::LLT<MatrixXd> llt(0.5 * (b_del + b_del.transpose()));
            if (llt.info() != Eigen::Success)
                throw DegeneracyError("nystrom_cores_fast: principal submatrix " +
                                          std::to_string(j) + " is not positive definite",
                                      static_cast<int>(j));
            overrides[static_cast<std::size_t>(j)] = r_del * llt.solve(r_del.transpose());
            fallbacks.push_back(static_cast<int>(j));
        }
    }
    return CoreReplicates::from_rank_one(m, std::move(xs), std::move(ys), std::move(overrides),
                                         std::move(fallbacks));
}

}  // namespace matjack
