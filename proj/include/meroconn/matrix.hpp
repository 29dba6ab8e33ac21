#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "rational_fn.hpp"

namespace meroconn {

// Dense row-major matrix over an arbitrary ring element type.  All matrices
// in this library are small (at most n + n^2 square), so no effort is spent
// on sparsity.
template <class T>
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, const T& fill = T{})
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& at(std::size_t r, std::size_t c) { return d_[r * cols_ + c]; }
    const T& at(std::size_t r, std::size_t c) const { return d_[r * cols_ + c]; }

    friend Mat operator+(const Mat& a, const Mat& b) {
        Mat r = a;
        for (std::size_t k = 0; k < r.d_.size(); ++k) r.d_[k] = r.d_[k] + b.d_[k];
        return r;
    }
    friend Mat operator-(const Mat& a, const Mat& b) {
        Mat r = a;
        for (std::size_t k = 0; k < r.d_.size(); ++k) r.d_[k] = r.d_[k] - b.d_[k];
        return r;
    }
    friend Mat operator*(const Mat& a, const Mat& b) {
        Mat r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) {
                T acc = a.at(i, 0) * b.at(0, j);
                for (std::size_t k = 1; k < a.cols_; ++k) acc = acc + a.at(i, k) * b.at(k, j);
                r.at(i, j) = acc;
            }
        return r;
    }

    friend bool operator==(const Mat& a, const Mat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.d_ == b.d_;
    }

    template <class F>
    auto map(F&& f) const {
        Mat<decltype(f(d_[0]))> r(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = f(at(i, j));
        return r;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> d_;
};

using RatMat = Mat<RationalFn>;

inline RatMat rat_zero(std::size_t rows, std::size_t cols, std::size_t nvars) {
    return RatMat(rows, cols, RationalFn::zero(nvars));
}

inline RatMat rat_identity(std::size_t n, std::size_t nvars) {
    RatMat m = rat_zero(n, n, nvars);
    for (std::size_t k = 0; k < n; ++k) m.at(k, k) = RationalFn::one(nvars);
    return m;
}

inline RatMat rat_partial(const RatMat& m, std::size_t var) {
    return m.map([var](const RationalFn& f) { return f.partial(var); });
}

inline RatMat rat_reduce_by(RatMat m, std::span<const MultiPoly> hints) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j).reduce_by(hints);
    return m;
}

inline bool rat_is_zero(const RatMat& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m.at(i, j).is_zero()) return false;
    return true;
}

inline Eigen::MatrixXcd rat_eval(const RatMat& m, const std::vector<std::complex<double>>& z,
                                 double floor = 1e-13) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m.at(i, j).eval(z, floor);
    return out;
}

inline RatMat rat_compose(const RatMat& m, const std::vector<MultiPoly>& args) {
    return m.map([&](const RationalFn& f) { return f.compose(args); });
}

} // namespace meroconn
