#pragma once

#include <compare>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace latsym::dsl {

/// Lattice quantity attached to a stencil point. The second coordinate is
/// spelled `t` for evolution schemes and `y` for light-cone schemes; both map
/// to Var::T.
enum class Var : unsigned char { X = 0, T = 1, U = 2 };

struct Offset {
    int i = 0;
    int j = 0;
    auto operator<=>(const Offset&) const = default;
};

struct GridRef {
    Var var = Var::U;
    Offset at;
    auto operator<=>(const GridRef&) const = default;
};

std::string to_string(GridRef ref);
char var_letter(Var v);

struct SourcePos {
    int line = 1;
    int column = 1;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, SourcePos pos, std::vector<std::string> expected);
    SourcePos pos() const { return pos_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    SourcePos pos_;
    std::vector<std::string> expected_;
};

class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, SourcePos pos);
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

/// Bindings for grid references and named parameters.
struct Environment {
    std::map<GridRef, double> refs;
    std::map<std::string, double> params;
};

struct ValueGradient {
    double value = 0.0;
    std::map<GridRef, double> gradient;
};

struct Node;

/// Immutable parsed arithmetic expression.
///
/// Grid references (`u[-1,0]`, or bare `x`, `t`, `y`, `u` meaning offset
/// [0,0]) and parameters are resolved to dense slots at parse time, so
/// evaluation only needs two spans of values in `refs()` / `parameters()`
/// order.
class Expression {
public:
    Expression();  // the literal 0

    static Expression parse(std::string_view text);
    static Expression constant(double value);

    std::string to_string() const;

    /// Distinct grid references, sorted.
    const std::vector<GridRef>& refs() const { return refs_; }
    /// Distinct parameter names, sorted.
    const std::vector<std::string>& parameters() const { return params_; }

    /// True if the expression mentions no grid reference.
    bool is_constant() const { return refs_.empty(); }

    /// Evaluate with one value per slot. T is double, Dual<double> or
    /// Dual<Dual<double>>.
    template <class T>
    T evaluate(std::span<const T> ref_values, std::span<const T> param_values) const;

    /// Value plus the full gradient over refs(), one forward pass per slot.
    double value_and_gradient(std::span<const double> ref_values,
                              std::span<const double> param_values,
                              std::span<double> gradient) const;

    /// Structural equality; source positions are ignored.
    bool operator==(const Expression& other) const;

    /// Replace parameters by numeric literals for those present in `values`.
    Expression bind(const std::map<std::string, double>& values) const;

private:
    explicit Expression(std::shared_ptr<Node> root);

    std::shared_ptr<const Node> root_;
    std::vector<GridRef> refs_;
    std::vector<std::string> params_;
};

double eval(const Expression& e, const Environment& env);
ValueGradient eval_with_gradient(const Expression& e, const Environment& env);

}  // namespace latsym::dsl
