#pragma once

// Exact complex rationals: re + i*im with GMP rationals.

#include <gmpxx.h>

#include <complex>
#include <string>

namespace ssqm {

struct CQ {
    mpq_class re, im;

    CQ() : re(0), im(0) {}
    CQ(long v) : re(v), im(0) {}
    CQ(int v) : re(v), im(0) {}
    CQ(mpq_class r) : re(std::move(r)), im(0) {}
    CQ(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

    static CQ I() { return CQ(mpq_class(0), mpq_class(1)); }
    // exact binary value of a double
    static CQ from_double(double v);
    static CQ from_complex(std::complex<double> v) { return CQ(from_double(v.real()).re, from_double(v.imag()).re); }
    static CQ frac(long n, long d) { mpq_class q(n, d); q.canonicalize(); return CQ(q); }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_one() const { return re == 1 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }

    CQ conj() const { return CQ(re, -im); }
    CQ inv() const;

    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
    std::complex<long double> to_complexl() const;

    std::string str() const;

    friend CQ operator+(const CQ& a, const CQ& b) { return CQ(a.re + b.re, a.im + b.im); }
    friend CQ operator-(const CQ& a, const CQ& b) { return CQ(a.re - b.re, a.im - b.im); }
    friend CQ operator-(const CQ& a) { return CQ(-a.re, -a.im); }
    friend CQ operator*(const CQ& a, const CQ& b) {
        return CQ(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend CQ operator/(const CQ& a, const CQ& b) { return a * b.inv(); }
    CQ& operator+=(const CQ& b) { re += b.re; im += b.im; return *this; }
    CQ& operator-=(const CQ& b) { re -= b.re; im -= b.im; return *this; }
    CQ& operator*=(const CQ& b) { *this = *this * b; return *this; }
    friend bool operator==(const CQ& a, const CQ& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const CQ& a, const CQ& b) { return !(a == b); }
};

// total order, only for canonical sorting
int cmp(const CQ& a, const CQ& b);

CQ pow(const CQ& a, int n);

}  // namespace ssqm
