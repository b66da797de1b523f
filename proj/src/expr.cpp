#include "monomap/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "monomap/error.hpp"

namespace monomap {

namespace {

using Op = Expression::Op;
using Instr = Expression::Instr;

// Recursive descent straight into postfix:
//   sum   := prod (('+'|'-') prod)*
//   prod  := unary (('*'|'/') unary)*
//   unary := ('-'|'+') unary | power
//   power := atom ('^' unary)?        right associative, binds tighter than unary minus on its left
//   atom  := number | name | name '(' sum ')' | '(' sum ')'
// Functions: exp log sqrt abs sin cos.
class Parser {
public:
    Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

    std::vector<Instr> run() {
        sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return std::move(out_);
    }

private:
    const std::string& s_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
    std::vector<Instr> out_;

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::ParseError, what + " at position " + std::to_string(pos_ + 1) + " in \"" + s_ + "\"");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void sum() {
        prod();
        for (;;) {
            if (eat('+')) {
                prod();
                out_.push_back({Op::Add});
            } else if (eat('-')) {
                prod();
                out_.push_back({Op::Sub});
            } else {
                return;
            }
        }
    }
    void prod() {
        unary();
        for (;;) {
            if (eat('*')) {
                unary();
                out_.push_back({Op::Mul});
            } else if (eat('/')) {
                unary();
                out_.push_back({Op::Div});
            } else {
                return;
            }
        }
    }
    void unary() {
        if (eat('-')) {
            unary();
            out_.push_back({Op::Neg});
        } else if (eat('+')) {
            unary();
        } else {
            power();
        }
    }
    void power() {
        atom();
        if (eat('^')) {
            unary();
            out_.push_back({Op::Pow});
        }
    }
    void atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            sum();
            if (!eat(')')) fail("missing ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc()) fail("bad number");
            pos_ = static_cast<std::size_t>(end - s_.data());
            out_.push_back({Op::Const, v});
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (eat('(')) {
                Op op;
                if (name == "exp") op = Op::Exp;
                else if (name == "log") op = Op::Log;
                else if (name == "sqrt") op = Op::Sqrt;
                else if (name == "abs") op = Op::Abs;
                else if (name == "sin") op = Op::Sin;
                else if (name == "cos") op = Op::Cos;
                else {
                    pos_ = start;
                    fail("unknown function '" + name + "'");
                }
                sum();
                if (!eat(')')) fail("missing ')'");
                out_.push_back({op});
                return;
            }
            const auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it == vars_.end()) {
                pos_ = start;
                fail("unknown name '" + name + "'");
            }
            out_.push_back({Op::Var, 0.0, static_cast<int>(it - vars_.begin())});
            return;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
    Expression e;
    e.text_ = text;
    e.variables_ = variables;
    e.program_ = Parser(e.text_, e.variables_).run();
    int depth = 0;
    for (const Instr& in : e.program_) {
        switch (in.op) {
            case Op::Const:
            case Op::Var: ++depth; break;
            case Op::Neg:
            case Op::Exp:
            case Op::Log:
            case Op::Sqrt:
            case Op::Abs:
            case Op::Sin:
            case Op::Cos: break;
            default: --depth;
        }
        e.max_depth_ = std::max(e.max_depth_, depth);
    }
    return e;
}

bool Expression::uses(const std::string& variable) const {
    const auto it = std::find(variables_.begin(), variables_.end(), variable);
    if (it == variables_.end()) return false;
    const int idx = static_cast<int>(it - variables_.begin());
    return std::any_of(program_.begin(), program_.end(),
                       [&](const Instr& in) { return in.op == Op::Var && in.index == idx; });
}

double Expression::operator()(std::span<const double> values) const {
    constexpr int kInline = 32;
    double small[kInline] = {};
    std::vector<double> big;
    double* st = small;
    if (max_depth_ > kInline) {
        big.resize(static_cast<std::size_t>(max_depth_));
        st = big.data();
    }
    int top = -1;
    for (const Instr& in : program_) {
        switch (in.op) {
            case Op::Const: st[++top] = in.value; break;
            case Op::Var: st[++top] = values[static_cast<std::size_t>(in.index)]; break;
            case Op::Add: st[top - 1] += st[top]; --top; break;
            case Op::Sub: st[top - 1] -= st[top]; --top; break;
            case Op::Mul: st[top - 1] *= st[top]; --top; break;
            case Op::Div: st[top - 1] /= st[top]; --top; break;
            case Op::Pow: st[top - 1] = std::pow(st[top - 1], st[top]); --top; break;
            case Op::Neg: st[top] = -st[top]; break;
            case Op::Exp: st[top] = std::exp(st[top]); break;
            case Op::Log: st[top] = std::log(st[top]); break;
            case Op::Sqrt: st[top] = std::sqrt(st[top]); break;
            case Op::Abs: st[top] = std::abs(st[top]); break;
            case Op::Sin: st[top] = std::sin(st[top]); break;
            case Op::Cos: st[top] = std::cos(st[top]); break;
        }
    }
    return st[0];
}

}  // namespace monomap
