#pragma once

#include <span>
#include <string>
#include <vector>

namespace monomap {

/// Arithmetic over named variables: + - * / ^, unary minus, parentheses,
/// exp, log, sqrt, abs, sin, cos and numeric literals. Compiled once to a stack program.
class Expression {
public:
    /// Raises ParseError naming the offending position or identifier.
    static Expression parse(const std::string& text, const std::vector<std::string>& variables);

    /// values[i] binds variables[i] from parse().
    double operator()(std::span<const double> values) const;

    const std::string& text() const { return text_; }
    const std::vector<std::string>& variables() const { return variables_; }
    bool uses(const std::string& variable) const;

    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Abs, Sin, Cos };
    struct Instr {
        Op op;
        double value = 0.0;
        int index = 0;
    };

private:
    std::string text_;
    std::vector<std::string> variables_;
    std::vector<Instr> program_;
    int max_depth_ = 0;
};

}  // namespace monomap
