#include "ssqm/cq.hpp"

#include <sstream>

namespace ssqm {

CQ CQ::from_double(double v) {
    mpq_class q(v);  // exact binary value
    q.canonicalize();
    return CQ(q);
}

CQ CQ::inv() const {
    mpq_class d = re * re + im * im;
    if (sgn(d) == 0) throw std::domain_error("division by zero");
    return CQ(re / d, -im / d);
}

static long double to_ld(const mpq_class& q) {
    double hi = q.get_d();
    mpq_class rest = q - mpq_class(hi);
    return (long double)hi + (long double)rest.get_d();
}

std::complex<long double> CQ::to_complexl() const { return {to_ld(re), to_ld(im)}; }

std::string CQ::str() const {
    std::ostringstream os;
    if (sgn(im) == 0) {
        os << re.get_str();
    } else if (sgn(re) == 0) {
        if (im == 1) os << "i";
        else if (im == -1) os << "-i";
        else os << im.get_str() << "*i";
    } else {
        os << "(" << re.get_str() << (sgn(im) > 0 ? "+" : "-");
        mpq_class a = abs(im);
        if (a == 1) os << "i)";
        else os << a.get_str() << "*i)";
    }
    return os.str();
}

int cmp(const CQ& a, const CQ& b) {
    int c = ::cmp(a.re, b.re);
    if (c) return c < 0 ? -1 : 1;
    c = ::cmp(a.im, b.im);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

CQ pow(const CQ& a, int n) {
    if (n < 0) return pow(a.inv(), -n);
    CQ r(1), b = a;
    while (n) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

}  // namespace ssqm
