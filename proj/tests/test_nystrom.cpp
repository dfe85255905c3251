#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "matjack/matjack.hpp"

using namespace matjack;

namespace {

MatrixSource random_psd(Index d, Index r, std::uint64_t seed) {
    const MatrixXd g = gaussian_sketch(d, r, seed).values;
    return MatrixSource::symmetric_dense(g * g.transpose());
}

MatrixXd delete_column(const MatrixXd& m, Index j) {
    MatrixXd out(m.rows(), m.cols() - 1);
    if (j > 0) out.leftCols(j) = m.leftCols(j);
    if (j < m.cols() - 1) out.rightCols(m.cols() - 1 - j) = m.rightCols(m.cols() - 1 - j);
    return out;
}

}  // namespace

TEST_CASE("nystrom recovers an exactly low-rank PSD matrix") {
    VectorXd d = VectorXd::Zero(50);
    d.head(3) << 5, 4, 3;
    const MatrixSource a = MatrixSource::diagonal(d);
    const NystromResult res = nystrom(a, 10, 1);
    REQUIRE((a.to_dense() - res.materialize()).norm() <= 1e-8 * a.frobenius_norm());
}

TEST_CASE("nystrom output is PSD with bounded eigenvalues") {
    const MatrixSource a = random_psd(30, 12, 2);
    const NystromResult res = nystrom(a, 8, 5);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(res.materialize());
    const double top = Eigen::SelfAdjointEigenSolver<MatrixXd>(a.to_dense())
                           .eigenvalues()
                           .maxCoeff();
    for (Index i = 0; i < 30; ++i) {
        REQUIRE(eig.eigenvalues()[i] >= -1e-10 * top);
        REQUIRE(eig.eigenvalues()[i] <= top * (1.0 + 1e-8) + 1e-10);
    }
    for (Index i = 0; i < res.lambda.size(); ++i) REQUIRE(res.lambda[i] >= 0.0);
    REQUIRE((res.v.transpose() * res.v - MatrixXd::Identity(8, 8)).norm() <=
            1e-10 * std::sqrt(8.0));
}

TEST_CASE("nystrom matches the definitional pseudoinverse formula") {
    const MatrixSource a = exp_decay(100, 5, 0.25);
    const MatrixXd omega = gaussian_sketch(100, 20, 0).values;
    const NystromResult res = nystrom_with_sketch(a, omega, 0);
    const MatrixXd y = a.to_dense() * omega;
    const MatrixXd b = omega.transpose() * y;
    const MatrixXd oracle =
        y * b.completeOrthogonalDecomposition().pseudoInverse() * y.transpose();
    REQUIRE((res.materialize() - oracle).norm() <= 1e-6 * oracle.norm());
}

TEST_CASE("nystrom rejects invalid inputs") {
    const MatrixSource asym = MatrixSource::dense(gaussian_sketch(6, 6, 9).values);
    REQUIRE_THROWS_AS(nystrom(asym, 3, 0), ParameterError);
    const MatrixSource a = exp_decay(10, 2, 0.5);
    REQUIRE_THROWS_AS(nystrom(a, 0, 0), ParameterError);
    REQUIRE_THROWS_AS(nystrom(a, 11, 0), ParameterError);
}

TEST_CASE("baseline cores collapse for exactly low-rank input") {
    VectorXd d = VectorXd::Zero(40);
    d.head(3) << 2, 1.5, 1;
    const MatrixSource a = MatrixSource::diagonal(d);
    const NystromResult res = nystrom(a, 6, 3);
    const CoreReplicates cores = nystrom_cores_baseline(res);
    double worst = 0.0;
    for (int j = 0; j < 6; ++j)
        worst = std::max(worst, (cores.materialize(j) - cores.mean()).norm());
    REQUIRE(worst <= 1e-6 * cores.mean().norm());
}

TEST_CASE("jackknife cores require at least two sketch columns") {
    const MatrixSource a = exp_decay(10, 2, 0.5);
    const NystromResult res = nystrom(a, 1, 0);
    REQUIRE_THROWS_AS(nystrom_cores_baseline(res), ParameterError);
    REQUIRE_THROWS_AS(nystrom_cores_fast(res), ParameterError);
}

TEST_CASE("baseline replicates equal full recomputation on the deleted sketch") {
    const MatrixSource a = random_psd(30, 12, 7);
    const MatrixXd omega = gaussian_sketch(30, 5, 11).values;
    const NystromResult res = nystrom_with_sketch(a, omega, 0);
    const CoreReplicates cores = nystrom_cores_baseline(res);
    for (Index j = 0; j < 5; ++j) {
        const MatrixXd replicate =
            res.v * cores.materialize(static_cast<int>(j)) * res.v.transpose();
        const NystromResult redo = nystrom_with_sketch(a, delete_column(omega, j), 0);
        REQUIRE((replicate - redo.materialize()).norm() <=
                1e-6 * redo.materialize().norm());
    }
}

TEST_CASE("fast replicates equal baseline cores after the basis change") {
    const MatrixSource a = exp_decay(100, 5, 0.25);
    const NystromResult res = nystrom(a, 20, 0);
    const CoreReplicates fast = nystrom_cores_fast(res);
    const CoreReplicates base = nystrom_cores_baseline(res);
    double worst = 0.0;
    for (int j = 0; j < 20; ++j) {
        const MatrixXd t_fast = res.u.transpose() * fast.materialize(j) * res.u;
        const MatrixXd t_base = base.materialize(j);
        worst = std::max(worst, (t_fast - t_base).norm() / t_base.norm());
    }
    REQUIRE(worst <= 1e-8);
    // The jackknife statistic is invariant under the common rotation.
    REQUIRE(jack_frobenius(fast).value ==
            Catch::Approx(jack_frobenius(base).value).epsilon(1e-8));
}

TEST_CASE("fast core hand oracle at s=2") {
    // Fabricated factors: B = [[4,2],[2,5]], R = I. Deleting j=2 leaves
    // B_1 = [4], so z = 1/2, Schur = 4, x = [-1/4, 1/2], and
    // S_2 = B^{-1} - x x^T = [[1/4, 0], [0, 0]].
    NystromResult res;
    res.b.resize(2, 2);
    res.b << 4, 2, 2, 5;
    res.r = MatrixXd::Identity(2, 2);
    res.c = Eigen::LLT<MatrixXd>(res.b).matrixU();
    res.w = res.r;
    res.c.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(res.w);
    Eigen::BDCSVD<MatrixXd> svd(res.w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    res.sigma = svd.singularValues();
    res.u = svd.matrixU();
    res.q = MatrixXd::Identity(2, 2);
    res.v = res.q * res.u;
    res.lambda = res.sigma.array().square();

    const CoreReplicates fast = nystrom_cores_fast(res);
    VectorXd x_expected(2);
    x_expected << -0.25, 0.5;
    REQUIRE((fast.x(1) - x_expected).norm() <= 1e-12);
    MatrixXd s2_expected(2, 2);
    s2_expected << 0.25, 0, 0, 0;
    REQUIRE((fast.materialize(1) - s2_expected).norm() <= 1e-12);
}

TEST_CASE("every fast core is a PSD downdate of the base matrix") {
    const MatrixSource a = random_psd(25, 25, 13);
    const NystromResult res = nystrom(a, 6, 4);
    const CoreReplicates fast = nystrom_cores_fast(res);
    const MatrixXd m = res.w * res.w.transpose();
    for (int j = 0; j < 6; ++j) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m - fast.materialize(j));
        REQUIRE(eig.eigenvalues().minCoeff() >= -1e-10 * m.norm());
        // Each core stays PSD up to roundoff.
        Eigen::SelfAdjointEigenSolver<MatrixXd> core_eig(fast.materialize(j));
        REQUIRE(core_eig.eigenvalues().minCoeff() >= -1e-8 * m.norm());
    }
}

TEST_CASE("cholesky delete-downdate hand and oracle cases") {
    MatrixXd c(2, 2);
    c << 2, 1, 0, 2;  // C^T C = [[4,2],[2,5]]
    const MatrixXd keep_first = cholesky_delete_downdate(c, 1);
    REQUIRE(keep_first.rows() == 1);
    REQUIRE(keep_first(0, 0) == Catch::Approx(2.0).margin(1e-14));
    const MatrixXd keep_second = cholesky_delete_downdate(c, 0);
    REQUIRE(keep_second(0, 0) == Catch::Approx(std::sqrt(5.0)).margin(1e-14));

    // Random SPD 6x6: compare with a fresh Cholesky of the deleted submatrix.
    const MatrixXd g = gaussian_sketch(6, 6, 99).values;
    const MatrixXd spd = g * g.transpose() + 6.0 * MatrixXd::Identity(6, 6);
    const MatrixXd full_c = Eigen::LLT<MatrixXd>(spd).matrixU();
    for (Index j = 0; j < 6; ++j) {
        const MatrixXd down = cholesky_delete_downdate(full_c, j);
        MatrixXd sub(5, 5);
        Index rr = 0;
        for (Index row = 0; row < 6; ++row) {
            if (row == j) continue;
            Index cc = 0;
            for (Index col = 0; col < 6; ++col) {
                if (col == j) continue;
                sub(rr, cc++) = spd(row, col);
            }
            ++rr;
        }
        REQUIRE((down.transpose() * down - sub).norm() <= 1e-12 * sub.norm());
        const MatrixXd fresh = Eigen::LLT<MatrixXd>(sub).matrixU();
        REQUIRE((down - fresh).norm() <= 1e-10 * fresh.norm());
    }
}

TEST_CASE("cholesky delete-downdate validates its inputs") {
    MatrixXd c(2, 2);
    c << 1, 0, 0, 1;
    REQUIRE_THROWS_AS(cholesky_delete_downdate(c, -1), ParameterError);
    REQUIRE_THROWS_AS(cholesky_delete_downdate(c, 2), ParameterError);
    REQUIRE_THROWS_AS(cholesky_delete_downdate(MatrixXd::Zero(2, 3), 0), ParameterError);
}

TEST_CASE("approximation error depends only on the spectrum") {
    // Conjugating a diagonal matrix and its sketch by a common orthogonal
    // matrix must reproduce the same approximation error.
    VectorXd diag(20);
    for (Index i = 0; i < 20; ++i) diag[i] = std::pow(10.0, -0.2 * static_cast<double>(i));
    const MatrixSource a = MatrixSource::diagonal(diag);
    const MatrixXd omega = gaussian_sketch(20, 6, 42).values;

    const MatrixXd g = gaussian_sketch(20, 20, 1234).values;
    const MatrixXd qrot =
        Eigen::HouseholderQR<MatrixXd>(g).householderQ() * MatrixXd::Identity(20, 20);
    const MatrixSource rotated =
        MatrixSource::symmetric_dense(qrot * MatrixXd(diag.asDiagonal()) * qrot.transpose());

    const NystromResult plain = nystrom_with_sketch(a, omega, 0);
    const NystromResult conj = nystrom_with_sketch(rotated, qrot * omega, 0);
    const double err_plain = (a.to_dense() - plain.materialize()).norm();
    const double err_conj = (rotated.to_dense() - conj.materialize()).norm();
    REQUIRE(err_plain == Catch::Approx(err_conj).margin(1e-10 * a.frobenius_norm()));
}
