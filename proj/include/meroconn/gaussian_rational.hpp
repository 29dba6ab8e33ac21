#pragma once

#include <complex>
#include <cstdint>
#include <gmpxx.h>
#include <string>

namespace meroconn {

// Exact element of Q(i).  Arithmetic never rounds; equality is decidable.
class GaussianRational {
  public:
    GaussianRational() = default;
    GaussianRational(long n) : re_(n) {}
    GaussianRational(mpq_class re) : re_(std::move(re)) {}
    GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational i() { return GaussianRational(mpq_class(0), mpq_class(1)); }
    static GaussianRational from_ratio(long num, long den) {
        mpq_class q(num, den);
        q.canonicalize();
        return GaussianRational(q);
    }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    GaussianRational operator-() const { return {-re_, -im_}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        mpq_class norm = o.re_ * o.re_ + o.im_ * o.im_;
        if (norm == 0) throw std::domain_error("GaussianRational: division by zero");
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / norm;
        mpq_class i = (im_ * o.re_ - re_ * o.im_) / norm;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    std::string str() const {
        if (im_ == 0) return re_.get_str();
        if (re_ == 0) return im_.get_str() + "*i";
        std::string s = re_.get_str();
        s += (im_ > 0 ? " + " : " - ");
        mpq_class a = abs(im_);
        s += a.get_str() + "*i";
        return s;
    }

  private:
    mpq_class re_{0};
    mpq_class im_{0};
};

} // namespace meroconn
