#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lde/dual.hpp"
#include "lde/error.hpp"

/// A small arithmetic language for user-defined feedback functions g(s0,...,sN).
///
/// Grammar (highest precedence first): `^` (right associative), unary `-`,
/// `*` `/`, `+` `-` (left associative). Operands are decimal numbers,
/// variables `s0`, `s1`, ... and calls `exp ln tanh abs` (one argument) and
/// `min max` (two or more arguments). With a positive smoothing width the
/// kinked functions `min`, `max` and `abs` are replaced by C^1 versions that
/// agree with the exact ones whenever their arguments differ by at least the
/// width.
namespace lde::expr {

enum class NodeKind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Exp, Ln, Tanh, Abs, Min, Max };

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;
  int variable = -1;
  Function function = Function::Exp;
  bool integer_power = false;
  std::size_t offset = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

class ParseError : public InvalidArgument {
 public:
  ParseError(const std::string& message, std::size_t offset, std::vector<std::string> expected);
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class EvalError : public ComputationError {
 public:
  EvalError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class Expr {
 public:
  static Expr parse(std::string_view text);

  double eval(std::span<const double> s, double smoothing = 0.0) const;
  Dual eval(std::span<const Dual> s, double smoothing = 0.0) const;

  /// Exact gradient with respect to s0..s_{n-1} (n = s.size()), one dual pass per variable.
  std::vector<double> grad(std::span<const double> s, double smoothing = 0.0) const;

  /// Canonical text: minimal parentheses, shortest round-trip numbers.
  std::string print() const;

  /// Largest variable index referenced, or -1 for a constant expression.
  int max_variable() const;

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }

 private:
  Expr(std::shared_ptr<const Node> root, std::string source);
  std::shared_ptr<const Node> root_;
  std::string source_;
};

bool structurally_equal(const Node& a, const Node& b);
inline bool structurally_equal(const Expr& a, const Expr& b) {
  return structurally_equal(a.root(), b.root());
}

/// Smoothed minimum: exact when |a - b| >= width, C^1 quadratic join otherwise.
double smooth_min(double a, double b, double width);

}  // namespace lde::expr
