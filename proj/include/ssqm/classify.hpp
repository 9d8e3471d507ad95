#pragma once

// Superpotential parsing and the even/odd/superalgebra classification.

#include "ssqm/grid.hpp"
#include "ssqm/models.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ssqm {

inline constexpr const char* kRecordSchema = "ssqm.record/1";

// Parameters are bound exactly. Throws SyntaxError or UnboundSymbol.
Superpotential parse_superpotential(const std::string& text, const std::map<std::string, CQ>& params);
// doubles are read through their shortest round-trip decimal (0.1 -> 1/10)
Superpotential parse_superpotential(const std::string& text, const std::map<std::string, double>& params);

// exact value of a constant expression such as "3", "-0.25" or "1/3"
CQ parse_constant(const std::string& text);
CQ shortest_decimal(double v);

// W = a (x - p) + c / (x - p) up to the two reductions below
enum class FormKind {
    Linear,      // a x + b
    Pole,        // c / (x - p)
    ShiftedPole, // a (x - p) + c / (x - p), a != 0
    Other
};

struct StructuralForm {
    FormKind kind = FormKind::Other;
    CQ a, b, c, p;
    bool unit_residue = false;  // c = +-1
};
StructuralForm match_form(const Expr& W);

struct ClassifyOptions {
    std::optional<double> a, b;  // declared linear part (needed for non-rational W)
    double tol = 1e-8;           // ODE-membership threshold
};

struct ClassificationResult {
    std::string input;
    std::map<std::string, double> params;
    int even = 0, odd = 0, total = 0;
    int even_upper = 0, even_lower = 0;
    int table1_class = 0;
    std::string table2_class;
    int table3_row = 0;
    std::string tag;           // empty when the row assigns none
    std::optional<int> d;
    bool consistent = true;    // counts agree with the row of the structural form
    double a = 0, b = 0;       // linear part used by the odd count
    double odd_gap = 0, odd_threshold = 0;
    StructuralForm form;
    std::vector<std::string> flags, notes;
    std::string grid;
    double tol = 0;
};

// Throws AmbiguousLinearPart when (a, b) can be neither extracted nor taken
// from the options; RankUnstable propagates from the odd count.
ClassificationResult classify(const Superpotential& W, const Grid& g, const ClassifyOptions& opt = {});

nlohmann::json to_json(const ClassificationResult& r);

}  // namespace ssqm
