#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "matjack/errors.hpp"
#include "matjack/rng.hpp"

namespace matjack {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A real matrix exposed through products with blocks of vectors.
/// Diagonal matrices keep only their diagonal so that sketch products
/// cost O(d*s) and d = 1e5 experiments stay feasible.
class MatrixSource {
public:
    enum class Kind : std::uint8_t { Dense = 0, Diagonal = 1, SymmetricDense = 2 };

    static MatrixSource dense(MatrixXd values) {
        MatrixSource m;
        m.kind_ = Kind::Dense;
        m.d1_ = values.rows();
        m.d2_ = values.cols();
        m.dense_ = std::move(values);
        return m;
    }

    static MatrixSource diagonal(VectorXd entries) {
        MatrixSource m;
        m.kind_ = Kind::Diagonal;
        m.d1_ = m.d2_ = entries.size();
        m.diag_ = std::move(entries);
        return m;
    }

    /// Stores (values + values^T)/2, so the payload is symmetric by construction.
    static MatrixSource symmetric_dense(const MatrixXd& values) {
        if (values.rows() != values.cols())
            throw ParameterError("symmetric_dense: matrix must be square");
        MatrixSource m;
        m.kind_ = Kind::SymmetricDense;
        m.d1_ = m.d2_ = values.rows();
        m.dense_ = 0.5 * (values + values.transpose());
        return m;
    }

    Kind kind() const { return kind_; }
    Index rows() const { return d1_; }
    Index cols() const { return d2_; }
    bool is_square() const { return d1_ == d2_; }
    bool is_symmetric() const { return kind_ != Kind::Dense; }

    const VectorXd& diagonal_entries() const {
        if (kind_ != Kind::Diagonal)
            throw ParameterError("diagonal_entries: not a diagonal matrix");
        return diag_;
    }

    /// A * X
    MatrixXd multiply(const MatrixXd& x) const {
        if (x.rows() != d2_) throw ParameterError("multiply: dimension mismatch");
        if (kind_ == Kind::Diagonal) return diag_.asDiagonal() * x;
        return dense_ * x;
    }

    /// A^T * X
    MatrixXd multiply_adjoint(const MatrixXd& x) const {
        if (x.rows() != d1_) throw ParameterError("multiply_adjoint: dimension mismatch");
        if (kind_ == Kind::Diagonal) return diag_.asDiagonal() * x;
        if (kind_ == Kind::SymmetricDense) return dense_ * x;
        return dense_.transpose() * x;
    }

    MatrixXd to_dense() const {
        if (kind_ == Kind::Diagonal) return MatrixXd(diag_.asDiagonal());
        return dense_;
    }

    double frobenius_norm() const {
        if (kind_ == Kind::Diagonal) return diag_.norm();
        return dense_.norm();
    }

private:
    MatrixSource() = default;
    Kind kind_ = Kind::Dense;
    Index d1_ = 0, d2_ = 0;
    MatrixXd dense_;
    VectorXd diag_;
};

/// d x s test matrix with i.i.d. standard normal entries, a pure function
/// of (d, s, seed). Entry (i, j) uses counter i*s + j.
struct SketchMatrix {
    MatrixXd values;
    std::uint64_t seed = 0;
};

inline SketchMatrix gaussian_sketch(Index d, Index s, std::uint64_t seed) {
    if (s < 1) throw ParameterError("gaussian_sketch: s must be >= 1");
    if (s > d) throw ParameterError("gaussian_sketch: sketch wider than matrix unsupported");
    CounterRng rng(seed);
    SketchMatrix sk;
    sk.seed = seed;
    sk.values.resize(d, s);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < s; ++j)
            sk.values(i, j) = rng.gaussian(static_cast<std::uint64_t>(i) * s + j);
    return sk;
}

// ---------------------------------------------------------------------------
// Binary matrix format: magic "MJK1", u64 LE d1, u64 LE d2, u8 kind tag
// (0 = dense, 1 = diagonal, 2 = symmetric-dense), payload of little-endian
// f64 row-major values (diagonal: d1 values).
// ---------------------------------------------------------------------------

namespace detail {

inline void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw FormatError("matrix file: truncated header");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

inline void write_f64(std::ostream& out, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    write_u64(out, bits);
}

inline double read_f64(std::istream& in) {
    std::uint64_t bits = read_u64(in);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

}  // namespace detail

inline void save_matrix(const MatrixSource& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("save_matrix: cannot open " + path);
    out.write("MJK1", 4);
    detail::write_u64(out, static_cast<std::uint64_t>(m.rows()));
    detail::write_u64(out, static_cast<std::uint64_t>(m.cols()));
    char tag = static_cast<char>(m.kind());
    out.write(&tag, 1);
    if (m.kind() == MatrixSource::Kind::Diagonal) {
        const VectorXd& d = m.diagonal_entries();
        for (Index i = 0; i < d.size(); ++i) detail::write_f64(out, d[i]);
    } else {
        MatrixXd dense = m.to_dense();
        for (Index i = 0; i < dense.rows(); ++i)
            for (Index j = 0; j < dense.cols(); ++j) detail::write_f64(out, dense(i, j));
    }
    if (!out) throw FormatError("save_matrix: write failure on " + path);
}

inline MatrixSource load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("load_matrix: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "MJK1", 4) != 0)
        throw FormatError("load_matrix: bad magic in " + path);
    const std::uint64_t d1 = detail::read_u64(in);
    const std::uint64_t d2 = detail::read_u64(in);
    constexpr std::uint64_t kMaxDim = 1ULL << 32;
    if (d1 == 0 || d2 == 0 || d1 > kMaxDim || d2 > kMaxDim || d1 * d2 > (1ULL << 40))
        throw FormatError("load_matrix: dimension overflow in " + path);
    char tag;
    in.read(&tag, 1);
    if (!in || tag < 0 || tag > 2) throw FormatError("load_matrix: bad kind tag in " + path);
    const auto kind = static_cast<MatrixSource::Kind>(tag);
    if (kind != MatrixSource::Kind::Dense && d1 != d2)
        throw FormatError("load_matrix: non-square diagonal/symmetric matrix in " + path);

    auto read_payload = [&](Index n) {
        VectorXd v(n);
        for (Index i = 0; i < n; ++i) {
            v[i] = detail::read_f64(in);
            if (!in) throw FormatError("load_matrix: truncated payload in " + path);
        }
        return v;
    };

    if (kind == MatrixSource::Kind::Diagonal)
        return MatrixSource::diagonal(read_payload(static_cast<Index>(d1)));

    VectorXd flat = read_payload(static_cast<Index>(d1 * d2));
    MatrixXd dense(static_cast<Index>(d1), static_cast<Index>(d2));
    for (Index i = 0; i < dense.rows(); ++i)
        for (Index j = 0; j < dense.cols(); ++j) dense(i, j) = flat[i * dense.cols() + j];
    if (kind == MatrixSource::Kind::SymmetricDense) return MatrixSource::symmetric_dense(dense);
    return MatrixSource::dense(std::move(dense));
}

}  // namespace matjack
