#include "ssqm/parser.hpp"

#include <cctype>

namespace ssqm {

namespace {

class Parser {
public:
    Parser(const std::string& s, const std::map<std::string, CQ>& bind, bool allow_free)
        : s_(s), bind_(bind), allow_free_(allow_free) {}

    Expr run() {
        Expr e = expr();
        skip();
        if (p_ != s_.size()) throw SyntaxError(std::string("unexpected '") + s_[p_] + "'", p_);
        return e;
    }

private:
    const std::string& s_;
    const std::map<std::string, CQ>& bind_;
    bool allow_free_;
    size_t p_ = 0;

    void skip() {
        while (p_ < s_.size() && std::isspace((unsigned char)s_[p_])) ++p_;
    }
    bool eat(char c) {
        skip();
        if (p_ < s_.size() && s_[p_] == c) {
            ++p_;
            return true;
        }
        return false;
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (eat('+')) e = e + term();
            else if (eat('-')) e = e - term();
            else return e;
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (eat('*')) {
                e = e * unary();
            } else if (eat('/')) {
                size_t at = p_;
                Expr d = unary();
                if (d.is_zero()) throw SyntaxError("division by zero", at);
                e = e / d;
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    Expr power() {
        Expr b = primary();
        if (eat('^')) {
            size_t at = p_;
            Expr n = unary();
            if (!n.is_constant()) throw SyntaxError("exponent must be a constant", at);
            CQ c = n.constant_value();
            if (!c.is_real() || c.re.get_den() != 1 || !c.re.get_num().fits_slong_p())
                throw SyntaxError("exponent must be an integer", at);
            long k = c.re.get_num().get_si();
            if (k < 0 && b.is_zero()) throw SyntaxError("zero to a negative power", at);
            return pow(b, int(k));
        }
        return b;
    }

    Expr number() {
        size_t start = p_;
        std::string digits;
        long scale = 0;
        while (p_ < s_.size() && std::isdigit((unsigned char)s_[p_])) digits += s_[p_++];
        if (p_ < s_.size() && s_[p_] == '.') {
            ++p_;
            while (p_ < s_.size() && std::isdigit((unsigned char)s_[p_])) {
                digits += s_[p_++];
                --scale;
            }
        }
        if (digits.empty()) throw SyntaxError("malformed number", start);
        if (p_ < s_.size() && (s_[p_] == 'e' || s_[p_] == 'E')) {
            size_t q = p_ + 1;
            int sign = 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) sign = s_[q++] == '-' ? -1 : 1;
            if (q < s_.size() && std::isdigit((unsigned char)s_[q])) {
                long ex = 0;
                while (q < s_.size() && std::isdigit((unsigned char)s_[q])) ex = ex * 10 + (s_[q++] - '0');
                scale += sign * ex;
                p_ = q;
            }
        }
        mpz_class n(digits);
        mpz_class ten;
        mpz_ui_pow_ui(ten.get_mpz_t(), 10, (unsigned long)std::labs(scale));
        mpq_class q = scale >= 0 ? mpq_class(n * ten) : mpq_class(n, ten);
        q.canonicalize();
        return Expr(CQ(q));
    }

    Expr primary() {
        skip();
        if (p_ >= s_.size()) throw SyntaxError("unexpected end of input", p_);
        char c = s_[p_];
        if (std::isdigit((unsigned char)c) || c == '.') return number();
        if (c == '(') {
            ++p_;
            Expr e = expr();
            if (!eat(')')) throw SyntaxError("expected ')'", p_);
            return e;
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t start = p_;
            std::string id;
            while (p_ < s_.size() && (std::isalnum((unsigned char)s_[p_]) || s_[p_] == '_')) id += s_[p_++];
            skip();
            if (p_ < s_.size() && s_[p_] == '(') {
                ++p_;
                Expr a = expr();
                if (!eat(')')) throw SyntaxError("expected ')'", p_);
                if (id == "exp") return exp(a);
                if (id == "ln") return ln(a);
                if (id == "atan") return atan(a);
                throw SyntaxError("unknown function '" + id + "'", start);
            }
            if (id == "x") return Expr::x();
            if (id == "t") return Expr::t();
            if (id == "i") return Expr::I();
            auto it = bind_.find(id);
            if (it != bind_.end()) return Expr(it->second);
            if (!allow_free_) throw UnboundSymbol("unbound parameter '" + id + "'");
            return Expr::param(id);
        }
        throw SyntaxError(std::string("unexpected '") + c + "'", p_);
    }
};

}  // namespace

Expr parse_expr(const std::string& text, const std::map<std::string, CQ>& bind, bool allow_free) {
    try {
        return Parser(text, bind, allow_free).run();
    } catch (const NonSeparable& e) {
        throw SyntaxError(std::string("unsupported division: ") + e.what(), 0);
    }
}

}  // namespace ssqm
