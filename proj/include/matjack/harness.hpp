#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "matjack/errors.hpp"
#include "matjack/jack.hpp"
#include "matjack/matrix_source.hpp"
#include "matjack/nystrom.hpp"
#include "matjack/rng.hpp"
#include "matjack/rsvd.hpp"
#include "matjack/testmat.hpp"

// Monte Carlo evaluation of Err/Bias/SD against the jackknife estimate,
// sweep experiments with CSV emission, and the orthoprojector validation.

namespace matjack {

struct DerivedTarget {
    enum class Kind { None, Projector, Truncation, Schatten };
    Kind kind = Kind::None;
    int index = 0;  ///< projector index i, truncation rank r, or Schatten order p
    ProjectorSide side = ProjectorSide::Left;

    std::string label() const {
        switch (kind) {
            case Kind::None:
                return "none";
            case Kind::Projector:
                return "projector-" + std::to_string(index) +
                       (side == ProjectorSide::Left ? "-left" : "-right");
            case Kind::Truncation:
                return "truncation-" + std::to_string(index);
            case Kind::Schatten:
                return "schatten-" + std::to_string(index);
        }
        return "none";
    }
};

struct MetricsRow {
    std::string matrix_id;
    std::string algorithm;  ///< "rsvd" | "nystrom"
    Index d1 = 0, d2 = 0;
    int s = 0;
    int q = 0;
    int trials = 0;
    double err = 0.0;
    double bias = 0.0;
    double sd = 0.0;
    double jack_mean = 0.0;
    double jack_std = 0.0;
    std::string derived_target = "none";
    std::string error;  ///< empty on success
};

struct ExperimentConfig {
    std::string matrix_id = "matrix";
    std::string algorithm = "rsvd";
    std::vector<int> s_values = {20, 40, 60, 80, 100, 120, 140};
    int q = 2;
    int trials = 1000;
    std::uint64_t base_seed = 0;
    DerivedTarget target;
    double shift_multiplier = 1.0;
    bool use_fast_cores = true;
    std::size_t memory_cap_bytes = std::size_t{2} << 30;
};

namespace detail {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Indices of the diagonal sorted by decreasing value, stable.
inline std::vector<Index> descending_order(const VectorXd& v) {
    std::vector<Index> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Index a, Index b) { return v[a] > v[b]; });
    return idx;
}

/// Projector onto the i-th (1-based) singular direction of A.
inline MatrixXd reference_projector(const MatrixSource& a, int i, ProjectorSide side) {
    if (a.kind() == MatrixSource::Kind::Diagonal) {
        const auto order = descending_order(a.diagonal_entries());
        VectorXd e = VectorXd::Zero(a.rows());
        e[order[static_cast<std::size_t>(i - 1)]] = 1.0;
        return e * e.transpose();
    }
    Eigen::BDCSVD<MatrixXd> svd(a.to_dense(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd vec = side == ProjectorSide::Left ? VectorXd(svd.matrixU().col(i - 1))
                                                     : VectorXd(svd.matrixV().col(i - 1));
    return vec * vec.transpose();
}

/// Best rank-r approximation of A.
inline MatrixXd reference_truncation(const MatrixSource& a, int r) {
    if (a.kind() == MatrixSource::Kind::Diagonal) {
        const VectorXd& diag = a.diagonal_entries();
        const auto order = descending_order(diag);
        VectorXd kept = VectorXd::Zero(diag.size());
        for (int k = 0; k < r; ++k) {
            const Index i = order[static_cast<std::size_t>(k)];
            kept[i] = diag[i];
        }
        return MatrixXd(kept.asDiagonal());
    }
    Eigen::BDCSVD<MatrixXd> svd(a.to_dense(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
           svd.matrixV().leftCols(r).transpose();
}

}  // namespace detail

/// One Monte Carlo experiment at a single sketch size. Per-trial seeds are
/// derive_seed(base_seed, trial), so trials are reproducible independent of
/// schedule. Accumulation is shifted by the first sample to avoid
/// cancellation when the spread is tiny.
inline MetricsRow monte_carlo_metrics(const ExperimentConfig& cfg, const MatrixSource& a,
                                      int s) {
    const Index d1 = a.rows(), d2 = a.cols();
    const std::size_t bytes = 8 * static_cast<std::size_t>(d1) * static_cast<std::size_t>(d2);
    if (bytes > cfg.memory_cap_bytes)
        throw ParameterError(
            "monte_carlo_metrics: dense mean-matrix accumulation needs " +
            std::to_string(bytes) +
            " bytes, above the configured cap; raise the cap or shrink the matrix");
    if (cfg.trials < 1) throw ParameterError("monte_carlo_metrics: need at least 1 trial");
    if (s < 2) throw ParameterError("monte_carlo_metrics: need s >= 2");

    const bool is_nystrom = cfg.algorithm == "nystrom";
    if (!is_nystrom && cfg.algorithm != "rsvd")
        throw ParameterError("monte_carlo_metrics: unknown algorithm " + cfg.algorithm);

    const auto& target = cfg.target;
    MatrixXd reference;
    double normalizer = 1.0;
    switch (target.kind) {
        case DerivedTarget::Kind::Projector:
            reference = detail::reference_projector(a, target.index, target.side);
            break;
        case DerivedTarget::Kind::Truncation:
            reference = detail::reference_truncation(a, target.index);
            normalizer = a.frobenius_norm();
            break;
        default:
            reference = a.to_dense();
            normalizer = a.frobenius_norm();
            break;
    }

    MatrixXd shift;      // first sample
    MatrixXd sum_delta;  // sum of (sample - shift)
    double sum_err2 = 0.0;
    double sum_delta_norm2 = 0.0;
    std::vector<double> jacks;

    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(trial));

        MatrixXd sample;
        CoreReplicates cores = [&] {
            if (is_nystrom) {
                const NystromResult res = nystrom(a, s, seed, cfg.shift_multiplier);
                if (target.kind == DerivedTarget::Kind::Projector) {
                    const VectorXd vec = res.v.col(target.index - 1);
                    sample = vec * vec.transpose();
                } else if (target.kind == DerivedTarget::Kind::Truncation) {
                    const int r = target.index;
                    sample = res.v.leftCols(r) * res.lambda.head(r).asDiagonal() *
                             res.v.leftCols(r).transpose();
                } else {
                    sample = res.materialize();
                }
                return cfg.use_fast_cores ? nystrom_cores_fast(res)
                                          : nystrom_cores_baseline(res);
            }
            const RsvdResult res = rsvd(a, s, cfg.q, seed);
            if (target.kind == DerivedTarget::Kind::Projector) {
                const VectorXd vec = target.side == ProjectorSide::Left
                                         ? VectorXd(res.u.col(target.index - 1))
                                         : VectorXd(res.v.col(target.index - 1));
                sample = vec * vec.transpose();
            } else if (target.kind == DerivedTarget::Kind::Truncation) {
                const int r = target.index;
                sample = res.u.leftCols(r) * res.sigma.head(r).asDiagonal() *
                         res.v.leftCols(r).transpose();
            } else {
                sample = res.materialize();
            }
            return cfg.use_fast_cores ? rsvd_cores_fast(res) : rsvd_cores_baseline(res);
        }();

        double jack = 0.0;
        switch (target.kind) {
            case DerivedTarget::Kind::Projector:
                jack = jack_frobenius(
                           projector_replicates(cores, target.index,
                                                is_nystrom ? ProjectorSide::Left : target.side))
                           .value;
                break;
            case DerivedTarget::Kind::Truncation:
                jack = jack_frobenius(truncate_cores(cores, target.index)).value;
                break;
            case DerivedTarget::Kind::Schatten:
                jack = jack_schatten(cores, target.index).value;
                break;
            default:
                jack = jack_frobenius(cores).value;
                break;
        }
        jacks.push_back(jack / normalizer);

        sum_err2 += (reference - sample).squaredNorm();
        if (trial == 0) {
            shift = sample;
            sum_delta = MatrixXd::Zero(sample.rows(), sample.cols());
        } else {
            sample -= shift;
            sum_delta += sample;
            sum_delta_norm2 += sample.squaredNorm();
        }
    }

    const double m = static_cast<double>(cfg.trials);
    const MatrixXd mean_delta = sum_delta / m;

    MetricsRow row;
    row.matrix_id = cfg.matrix_id;
    row.algorithm = cfg.algorithm;
    row.d1 = d1;
    row.d2 = d2;
    row.s = s;
    row.q = is_nystrom ? 0 : cfg.q;
    row.trials = cfg.trials;
    row.derived_target = target.label();
    row.err = std::sqrt(sum_err2 / m) / normalizer;
    row.bias = (reference - shift - mean_delta).norm() / normalizer;
    row.sd = std::sqrt(std::max(0.0, sum_delta_norm2 / m - mean_delta.squaredNorm())) /
             normalizer;
    double jack_mean = 0.0;
    for (double j : jacks) jack_mean += j;
    jack_mean /= m;
    double jack_var = 0.0;
    for (double j : jacks) jack_var += (j - jack_mean) * (j - jack_mean);
    row.jack_mean = jack_mean;
    row.jack_std = cfg.trials > 1 ? std::sqrt(jack_var / (m - 1.0)) : 0.0;
    return row;
}

inline void write_metrics_header(std::ostream& out) {
    out << "matrix_id,algorithm,d1,d2,s,q,trials,err,bias,sd,jack_mean,jack_std,"
           "derived_target,error\n";
}

inline void write_metrics_row(std::ostream& out, const MetricsRow& row) {
    out << row.matrix_id << ',' << row.algorithm << ',' << row.d1 << ',' << row.d2 << ','
        << row.s << ',' << row.q << ',' << row.trials << ','
        << detail::format_double(row.err) << ',' << detail::format_double(row.bias) << ','
        << detail::format_double(row.sd) << ',' << detail::format_double(row.jack_mean) << ','
        << detail::format_double(row.jack_std) << ',' << row.derived_target << ','
        << row.error << '\n';
}

/// One CSV row per sketch size; per-row failures land in the error column
/// instead of aborting the sweep.
inline std::vector<MetricsRow> sweep_experiment(const ExperimentConfig& cfg,
                                                const MatrixSource& a, std::ostream& out) {
    write_metrics_header(out);
    std::vector<MetricsRow> rows;
    for (int s : cfg.s_values) {
        MetricsRow row;
        try {
            row = monte_carlo_metrics(cfg, a, s);
        } catch (const std::exception& ex) {
            row.matrix_id = cfg.matrix_id;
            row.algorithm = cfg.algorithm;
            row.d1 = a.rows();
            row.d2 = a.cols();
            row.s = s;
            row.q = cfg.algorithm == "nystrom" ? 0 : cfg.q;
            row.trials = cfg.trials;
            row.derived_target = cfg.target.label();
            row.error = ex.what();
        }
        write_metrics_row(out, row);
        rows.push_back(std::move(row));
    }
    return rows;
}

struct OrthoprojectorCheck {
    double bias_sq_mc = 0.0;
    double var_mc = 0.0;
    double bias_sq_formula = 0.0;  ///< (d-s)^2 / d, from E X = (s/d) I
    double var_formula = 0.0;      ///< s (d-s) / d
    double bias_sq_printed = 0.0;  ///< (d-s) / sqrt(d), for comparison
    double var_printed = 0.0;      ///< sqrt(s (d-s)) / sqrt(d)
};

/// Approximate the identity by uniformly random rank-s orthoprojectors
/// (orthonormalized Gaussian ranges) and compare the Monte Carlo bias and
/// variance against the closed forms implied by E X = (s/d) I.
inline OrthoprojectorCheck orthoprojector_check(Index d, Index s, int m, std::uint64_t seed) {
    if (s < 1 || s > d) throw ParameterError("orthoprojector_check: need 1 <= s <= d");
    if (m < 1) throw ParameterError("orthoprojector_check: need at least one sample");

    MatrixXd mean = MatrixXd::Zero(d, d);
    double sum_norm2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const MatrixXd g = gaussian_sketch(d, s, derive_seed(seed, static_cast<std::uint64_t>(i))).values;
        Eigen::HouseholderQR<MatrixXd> qr(g);
        const MatrixXd q = qr.householderQ() * MatrixXd::Identity(d, s);
        const MatrixXd x = q * q.transpose();
        mean += x;
        sum_norm2 += x.squaredNorm();
    }
    mean /= static_cast<double>(m);

    OrthoprojectorCheck out;
    out.bias_sq_mc = (MatrixXd::Identity(d, d) - mean).squaredNorm();
    out.var_mc = sum_norm2 / static_cast<double>(m) - mean.squaredNorm();
    const double dd = static_cast<double>(d), ss = static_cast<double>(s);
    out.bias_sq_formula = (dd - ss) * (dd - ss) / dd;
    out.var_formula = ss * (dd - ss) / dd;
    out.bias_sq_printed = (dd - ss) / std::sqrt(dd);
    out.var_printed = std::sqrt(ss * (dd - ss)) / std::sqrt(dd);
    return out;
}

struct EntryMapRow {
    Index row = 0;
    double value = 0.0;     ///< |u_i(row)| of the full approximation
    double estimate = 0.0;  ///< Tukey standard deviation of the replicate entries
};

/// Entrywise Tukey standard-deviation estimates for the i-th left singular
/// vector (1-based), using the replicate SVDs U U_j(:, i). Absolute values
/// throughout to dodge sign ambiguity.
inline std::vector<EntryMapRow> entry_map(const RsvdResult& res, const CoreReplicates& cores,
                                          int i) {
    const Index s = res.sigma.size();
    if (i < 1 || i > static_cast<int>(s)) throw ParameterError("entry_map: index out of range");
    const int count = cores.count();
    std::vector<VectorXd> replicate_vectors;
    for (int j = 0; j < count; ++j) {
        Eigen::JacobiSVD<MatrixXd> svd(cores.materialize(j), Eigen::ComputeFullU);
        replicate_vectors.push_back(res.u * svd.matrixU().col(i - 1));
    }
    std::vector<EntryMapRow> out;
    std::vector<double> entries(static_cast<std::size_t>(count));
    for (Index mrow = 0; mrow < res.u.rows(); ++mrow) {
        for (int j = 0; j < count; ++j)
            entries[static_cast<std::size_t>(j)] = std::abs(replicate_vectors[static_cast<std::size_t>(j)][mrow]);
        EntryMapRow r;
        r.row = mrow;
        r.value = std::abs(res.u(mrow, i - 1));
        r.estimate = std::sqrt(tukey_scalar(entries));
        out.push_back(r);
    }
    return out;
}

}  // namespace matjack
