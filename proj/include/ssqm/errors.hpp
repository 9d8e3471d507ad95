#pragma once

#include <stdexcept>
#include <string>

namespace ssqm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define SSQM_ERROR(Name)                  \
    struct Name : Error {                 \
        using Error::Error;               \
    }

SSQM_ERROR(OrderTooHigh);
SSQM_ERROR(UnboundSymbol);
SSQM_ERROR(PoleHit);
SSQM_ERROR(NonSeparable);
SSQM_ERROR(OrderOverflow);
SSQM_ERROR(RankUnstable);
SSQM_ERROR(DomainError);
SSQM_ERROR(DegenerateCase);
SSQM_ERROR(NotSymmetric);
SSQM_ERROR(IllConditioned);
SSQM_ERROR(NotLinearCase);
SSQM_ERROR(AmbiguousLinearPart);

#undef SSQM_ERROR

struct SyntaxError : Error {
    size_t pos;
    SyntaxError(const std::string& msg, size_t p)
        : Error(msg + " at position " + std::to_string(p)), pos(p) {}
};

struct BlowUp : Error {
    double x;
    BlowUp(const std::string& msg, double at) : Error(msg), x(at) {}
};

}  // namespace ssqm
