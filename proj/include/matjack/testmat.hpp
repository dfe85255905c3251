#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "matjack/errors.hpp"
#include "matjack/matrix_source.hpp"
#include "matjack/rng.hpp"

// Synthetic test matrices with prescribed spectra, plus RBF kernel matrices
// assembled from tabular data.

namespace matjack {

/// diag(1 x R, 0) + xi * d^-1 * G G^T with G a seeded d x d standard
/// Gaussian matrix. Symmetric PSD for every seed.
inline MatrixSource noisy_lr(Index d, Index r, double xi, std::uint64_t seed) {
    if (r < 0 || r > d) throw ParameterError("noisy_lr: need 0 <= R <= d");
    if (xi < 0) throw ParameterError("noisy_lr: xi must be nonnegative");
    MatrixXd a = MatrixXd::Zero(d, d);
    for (Index i = 0; i < r; ++i) a(i, i) = 1.0;
    if (xi > 0) {
        CounterRng rng(seed);
        MatrixXd g(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j)
                g(i, j) = rng.gaussian(static_cast<std::uint64_t>(i) * d + j);
        a.noalias() += (xi / static_cast<double>(d)) * (g * g.transpose());
    }
    return MatrixSource::symmetric_dense(a);
}

/// diag(1 x R, 10^-rate, 10^-2*rate, ..., 10^-(d-R)*rate)
inline MatrixSource exp_decay(Index d, Index r, double rate) {
    if (r < 0 || r > d) throw ParameterError("exp_decay: need 0 <= R <= d");
    if (rate <= 0) throw ParameterError("exp_decay: rate must be positive");
    VectorXd diag(d);
    for (Index i = 0; i < d; ++i)
        diag[i] = i < r ? 1.0 : std::pow(10.0, -rate * static_cast<double>(i - r + 1));
    return MatrixSource::diagonal(diag);
}

/// diag(1 x R, 2^-p, 3^-p, ..., (d-R+1)^-p)
inline MatrixSource poly_decay(Index d, Index r, double p) {
    if (r < 0 || r > d) throw ParameterError("poly_decay: need 0 <= R <= d");
    if (p <= 0) throw ParameterError("poly_decay: p must be positive");
    VectorXd diag(d);
    for (Index i = 0; i < d; ++i)
        diag[i] = i < r ? 1.0 : std::pow(static_cast<double>(i - r + 2), -p);
    return MatrixSource::diagonal(diag);
}

/// Numeric table: n rows by f columns, with column names retained for
/// error reporting and column dropping.
struct Table {
    std::vector<std::string> column_names;
    MatrixXd values;  // n x f
};

/// CSV ingestion: first row is a header, delimiter configurable, and
/// columns named in drop_columns (e.g. a label column) are skipped.
inline Table load_csv_table(const std::string& path, char delimiter = ',',
                            const std::vector<std::string>& drop_columns = {}) {
    std::ifstream in(path);
    if (!in) throw FormatError("load_csv_table: cannot open " + path);

    auto split = [&](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, delimiter)) {
            if (!cell.empty() && cell.front() == '"' && cell.back() == '"' && cell.size() >= 2)
                cell = cell.substr(1, cell.size() - 2);
            cells.push_back(cell);
        }
        return cells;
    };

    std::string line;
    if (!std::getline(in, line)) throw FormatError("load_csv_table: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split(line);

    std::vector<Index> keep;
    Table table;
    for (Index c = 0; c < static_cast<Index>(header.size()); ++c) {
        if (std::find(drop_columns.begin(), drop_columns.end(), header[c]) != drop_columns.end())
            continue;
        keep.push_back(c);
        table.column_names.push_back(header[c]);
    }
    if (keep.empty()) throw FormatError("load_csv_table: no columns remain after drops");

    std::vector<std::vector<double>> rows;
    Index row_index = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size())
            throw FormatError("load_csv_table: row " + std::to_string(row_index) +
                              " has " + std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(header.size()));
        std::vector<double> row;
        for (Index c : keep) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cells[c], &pos);
                if (pos != cells[c].size())
                    throw std::invalid_argument("trailing characters");
                row.push_back(v);
            } catch (const std::exception&) {
                throw FormatError("load_csv_table: non-numeric cell at row " +
                                  std::to_string(row_index) + ", column '" + header[c] + "'");
            }
        }
        rows.push_back(std::move(row));
        ++row_index;
    }
    if (rows.empty()) throw FormatError("load_csv_table: no data rows in " + path);

    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(keep.size()));
    for (Index i = 0; i < table.values.rows(); ++i)
        for (Index j = 0; j < table.values.cols(); ++j) table.values(i, j) = rows[i][j];
    return table;
}

/// RBF kernel on standardized rows: K_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)).
/// Columns are standardized to zero mean and unit variance (n-1 denominator).
inline MatrixSource rbf_kernel(const Table& table, double sigma) {
    if (sigma <= 0) throw ParameterError("rbf_kernel: sigma must be positive");
    const Index n = table.values.rows();
    const Index f = table.values.cols();
    if (n < 1) throw ParameterError("rbf_kernel: need at least one row");

    MatrixXd x = table.values;
    for (Index c = 0; c < f; ++c) {
        const double mean = x.col(c).mean();
        x.col(c).array() -= mean;
        const double sd = n > 1 ? std::sqrt(x.col(c).squaredNorm() / static_cast<double>(n - 1)) : 0.0;
        if (sd == 0.0)
            throw FormatError("rbf_kernel: constant column '" +
                              (c < static_cast<Index>(table.column_names.size())
                                   ? table.column_names[c]
                                   : std::to_string(c)) +
                              "' has zero standard deviation");
        x.col(c) /= sd;
    }

    MatrixXd k(n, n);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) {
            const double dist2 = (x.row(i) - x.row(j)).squaredNorm();
            k(i, j) = k(j, i) = std::exp(-dist2 * inv);
        }
    }
    return MatrixSource::symmetric_dense(k);
}

}  // namespace matjack
