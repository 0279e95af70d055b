#include "lde/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <type_traits>
#include <utility>

namespace lde::expr {

ParseError::ParseError(const std::string& message, std::size_t offset,
                       std::vector<std::string> expected)
    : InvalidArgument(message), offset_(offset), expected_(std::move(expected)) {}

EvalError::EvalError(const std::string& message, std::size_t offset)
    : ComputationError(message), offset_(offset) {}

namespace {

using NodePtr = std::shared_ptr<const Node>;

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

const std::vector<std::string> kOperandStart = {"number", "variable", "function", "'('", "'-'"};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= text_.size()) {
      t.kind = Tok::End;
      return t;
    }
    const char ch = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
        ++end;
      }
      t.kind = Tok::Ident;
      t.text = text_.substr(pos_, end - pos_);
      pos_ = end;
      return t;
    }
    t.text = text_.substr(pos_, 1);
    ++pos_;
    switch (ch) {
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      case '/': t.kind = Tok::Slash; break;
      case '^': t.kind = Tok::Caret; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case ',': t.kind = Tok::Comma; break;
      default:
        throw ParseError("unexpected character '" + std::string(1, ch) + "'", t.offset,
                         kOperandStart);
    }
    return t;
  }

 private:
  Token number() {
    Token t;
    t.kind = Tok::Number;
    t.offset = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t save = end;
      ++end;
      if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
      if (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
        digits();
      } else {
        end = save;
      }
    }
    t.text = text_.substr(pos_, end - pos_);
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      throw ParseError("malformed number '" + std::string(t.text) + "'", t.offset, {"number"});
    }
    pos_ = end;
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<Function> lookup_function(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, Function>, 6> table{{
      {"exp", Function::Exp},
      {"ln", Function::Ln},
      {"tanh", Function::Tanh},
      {"abs", Function::Abs},
      {"min", Function::Min},
      {"max", Function::Max},
  }};
  for (const auto& [n, f] : table) {
    if (n == name) return f;
  }
  return std::nullopt;
}

const char* function_name(Function f) {
  switch (f) {
    case Function::Exp: return "exp";
    case Function::Ln: return "ln";
    case Function::Tanh: return "tanh";
    case Function::Abs: return "abs";
    case Function::Min: return "min";
    case Function::Max: return "max";
  }
  return "?";
}

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  NodePtr parse() {
    NodePtr root = expression();
    if (cur_.kind != Tok::End) {
      if (cur_.kind == Tok::RParen) {
        throw ParseError("unmatched ')'", cur_.offset, {"operator", "end of input"});
      }
      throw ParseError("unexpected " + describe(cur_), cur_.offset,
                       {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    }
    return root;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  [[noreturn]] void fail_operand() {
    if (cur_.kind == Tok::End && !open_parens_.empty()) {
      throw ParseError("unbalanced parenthesis: '(' is never closed", open_parens_.back(),
                       kOperandStart);
    }
    throw ParseError("expected an operand but found " + describe(cur_), cur_.offset,
                     kOperandStart);
  }

  void expect_close(std::size_t open_offset) {
    if (cur_.kind == Tok::RParen) {
      advance();
      open_parens_.pop_back();
      return;
    }
    if (cur_.kind == Tok::End) {
      throw ParseError("unbalanced parenthesis: '(' is never closed", open_offset, {"')'"});
    }
    throw ParseError("expected ')' but found " + describe(cur_), cur_.offset, {"')'", "operator"});
  }

  NodePtr expression() {
    NodePtr lhs = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      Node n;
      n.kind = cur_.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
      n.offset = cur_.offset;
      advance();
      n.args = {lhs, term()};
      lhs = make_node(std::move(n));
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      Node n;
      n.kind = cur_.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
      n.offset = cur_.offset;
      advance();
      n.args = {lhs, unary()};
      lhs = make_node(std::move(n));
    }
    return lhs;
  }

  NodePtr unary() {
    if (cur_.kind == Tok::Minus) {
      Node n;
      n.kind = NodeKind::Negate;
      n.offset = cur_.offset;
      advance();
      n.args = {unary()};
      return make_node(std::move(n));
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (cur_.kind != Tok::Caret) return base;
    Node n;
    n.kind = NodeKind::Pow;
    n.offset = cur_.offset;
    advance();
    NodePtr exponent = unary();
    n.integer_power = is_integer_constant(*exponent);
    n.args = {base, exponent};
    return make_node(std::move(n));
  }

  static bool is_integer_constant(const Node& e) {
    if (e.kind == NodeKind::Number) return std::floor(e.number) == e.number;
    if (e.kind == NodeKind::Negate) return is_integer_constant(*e.args[0]);
    return false;
  }

  NodePtr primary() {
    switch (cur_.kind) {
      case Tok::Number: {
        Node n;
        n.kind = NodeKind::Number;
        n.number = cur_.number;
        n.offset = cur_.offset;
        advance();
        return make_node(std::move(n));
      }
      case Tok::LParen: {
        const std::size_t open = cur_.offset;
        open_parens_.push_back(open);
        advance();
        NodePtr inner = expression();
        expect_close(open);
        return inner;
      }
      case Tok::Ident: return identifier();
      default: fail_operand();
    }
  }

  NodePtr identifier() {
    const Token id = cur_;
    advance();
    if (id.text.size() > 1 && id.text[0] == 's' &&
        std::all_of(id.text.begin() + 1, id.text.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      Node n;
      n.kind = NodeKind::Variable;
      n.offset = id.offset;
      std::from_chars(id.text.data() + 1, id.text.data() + id.text.size(), n.variable);
      return make_node(std::move(n));
    }
    const auto fn = lookup_function(id.text);
    if (!fn) {
      throw ParseError("unknown identifier '" + std::string(id.text) + "'", id.offset,
                       {"s<index>", "exp", "ln", "tanh", "abs", "min", "max"});
    }
    if (cur_.kind != Tok::LParen) {
      throw ParseError("expected '(' after function name", cur_.offset, {"'('"});
    }
    const std::size_t open = cur_.offset;
    open_parens_.push_back(open);
    advance();
    Node n;
    n.kind = NodeKind::Call;
    n.function = *fn;
    n.offset = id.offset;
    n.args.push_back(expression());
    while (cur_.kind == Tok::Comma) {
      advance();
      n.args.push_back(expression());
    }
    expect_close(open);
    const bool variadic = *fn == Function::Min || *fn == Function::Max;
    if (variadic ? n.args.size() < 2 : n.args.size() != 1) {
      throw ParseError(std::string(function_name(*fn)) +
                           (variadic ? " takes at least two arguments" : " takes one argument"),
                       id.offset, {});
    }
    return make_node(std::move(n));
  }

  Lexer lexer_;
  Token cur_;
  std::vector<std::size_t> open_parens_;
};

// ---------------------------------------------------------------------------
// Evaluation

template <typename T>
T smooth_min_t(const T& a, const T& b, double width, std::size_t offset) {
  const T diff = a - b;
  const double gap = std::abs(value_of(diff));
  if (width <= 0.0 || gap >= width) {
    if constexpr (std::is_same_v<T, Dual>) {
      if (gap == 0.0 && a.d != b.d) {
        throw EvalError(
            "min/max evaluated exactly at a kink; set a positive smoothing width", offset);
      }
    }
    return value_of(a) <= value_of(b) ? a : b;
  }
  const T plain = value_of(a) <= value_of(b) ? a : b;
  const T abs_diff = value_of(diff) >= 0.0 ? diff : -diff;
  const T h = (T(width) - abs_diff) / T(width);
  return plain - h * h * T(width / 4.0);
}

template <typename T>
T eval_node(const Node& n, std::span<const T> s, double smoothing) {
  switch (n.kind) {
    case NodeKind::Number: return T(n.number);
    case NodeKind::Variable:
      if (n.variable < 0 || static_cast<std::size_t>(n.variable) >= s.size()) {
        throw EvalError("variable s" + std::to_string(n.variable) + " is out of range", n.offset);
      }
      return s[static_cast<std::size_t>(n.variable)];
    case NodeKind::Negate: return -eval_node<T>(*n.args[0], s, smoothing);
    case NodeKind::Add:
      return eval_node<T>(*n.args[0], s, smoothing) + eval_node<T>(*n.args[1], s, smoothing);
    case NodeKind::Sub:
      return eval_node<T>(*n.args[0], s, smoothing) - eval_node<T>(*n.args[1], s, smoothing);
    case NodeKind::Mul:
      return eval_node<T>(*n.args[0], s, smoothing) * eval_node<T>(*n.args[1], s, smoothing);
    case NodeKind::Div: {
      const T den = eval_node<T>(*n.args[1], s, smoothing);
      if (value_of(den) == 0.0) throw EvalError("division by zero", n.offset);
      return eval_node<T>(*n.args[0], s, smoothing) / den;
    }
    case NodeKind::Pow: {
      const T base = eval_node<T>(*n.args[0], s, smoothing);
      const T expo = eval_node<T>(*n.args[1], s, smoothing);
      if (n.integer_power) {
        const double k = value_of(expo);
        if (value_of(base) == 0.0 && k < 0.0) throw EvalError("zero to a negative power", n.offset);
        if constexpr (std::is_same_v<T, Dual>) {
          return pow(base, k);
        } else {
          return std::pow(base, k);
        }
      }
      if (!(value_of(base) > 0.0)) {
        throw EvalError("non-integer power of a non-positive base", n.offset);
      }
      if constexpr (std::is_same_v<T, Dual>) {
        return exp(expo * log(base));
      } else {
        return std::pow(base, expo);
      }
    }
    case NodeKind::Call: {
      const Node& a0 = *n.args[0];
      switch (n.function) {
        case Function::Exp: {
          if constexpr (std::is_same_v<T, Dual>) return exp(eval_node<T>(a0, s, smoothing));
          else return std::exp(eval_node<T>(a0, s, smoothing));
        }
        case Function::Ln: {
          const T x = eval_node<T>(a0, s, smoothing);
          if (!(value_of(x) > 0.0)) throw EvalError("ln of a non-positive value", n.offset);
          if constexpr (std::is_same_v<T, Dual>) return log(x);
          else return std::log(x);
        }
        case Function::Tanh: {
          if constexpr (std::is_same_v<T, Dual>) return tanh(eval_node<T>(a0, s, smoothing));
          else return std::tanh(eval_node<T>(a0, s, smoothing));
        }
        case Function::Abs: {
          const T x = eval_node<T>(a0, s, smoothing);
          // abs(x) = max(x, -x)
          return -smooth_min_t<T>(-x, x, smoothing, n.offset);
        }
        case Function::Min:
        case Function::Max: {
          const bool is_max = n.function == Function::Max;
          T acc = eval_node<T>(a0, s, smoothing);
          if (is_max) acc = -acc;
          for (std::size_t k = 1; k < n.args.size(); ++k) {
            T next = eval_node<T>(*n.args[k], s, smoothing);
            if (is_max) next = -next;
            acc = smooth_min_t<T>(acc, next, smoothing, n.offset);
          }
          return is_max ? -acc : acc;
        }
      }
    }
  }
  throw EvalError("corrupt expression node", n.offset);
}

// ---------------------------------------------------------------------------
// Printing

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Negate: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), n.number);
      out.append(buf, ptr);
      return;
    }
    case NodeKind::Variable: out += "s" + std::to_string(n.variable); return;
    case NodeKind::Negate:
      out += '-';
      print_child(*n.args[0], precedence(*n.args[0]) < 3, out);
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: {
      const int p = precedence(n);
      static constexpr const char* ops[] = {" + ", " - ", " * ", " / "};
      const int idx = static_cast<int>(n.kind) - static_cast<int>(NodeKind::Add);
      print_child(*n.args[0], precedence(*n.args[0]) < p, out);
      out += ops[idx];
      print_child(*n.args[1], precedence(*n.args[1]) <= p, out);
      return;
    }
    case NodeKind::Pow:
      print_child(*n.args[0], precedence(*n.args[0]) <= 4, out);
      out += '^';
      print_child(*n.args[1], precedence(*n.args[1]) < 3, out);
      return;
    case NodeKind::Call:
      out += function_name(n.function);
      out += '(';
      for (std::size_t k = 0; k < n.args.size(); ++k) {
        if (k) out += ", ";
        print_node(*n.args[k], out);
      }
      out += ')';
      return;
  }
}

int max_var(const Node& n) {
  int m = n.kind == NodeKind::Variable ? n.variable : -1;
  for (const auto& a : n.args) m = std::max(m, max_var(*a));
  return m;
}

}  // namespace

double smooth_min(double a, double b, double width) {
  return smooth_min_t<double>(a, b, width, 0);
}

Expr::Expr(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

Expr Expr::parse(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError("empty expression", 0, kOperandStart);
  }
  Parser p(text);
  return Expr(p.parse(), std::string(text));
}

double Expr::eval(std::span<const double> s, double smoothing) const {
  return eval_node<double>(*root_, s, smoothing);
}

Dual Expr::eval(std::span<const Dual> s, double smoothing) const {
  return eval_node<Dual>(*root_, s, smoothing);
}

std::vector<double> Expr::grad(std::span<const double> s, double smoothing) const {
  std::vector<Dual> x(s.begin(), s.end());
  std::vector<double> g(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    x[i].d = 1.0;
    g[i] = eval(std::span<const Dual>(x), smoothing).d;
    x[i].d = 0.0;
  }
  return g;
}

std::string Expr::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

int Expr::max_variable() const { return max_var(*root_); }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case NodeKind::Number:
      if (a.number != b.number) return false;
      break;
    case NodeKind::Variable:
      if (a.variable != b.variable) return false;
      break;
    case NodeKind::Call:
      if (a.function != b.function) return false;
      break;
    case NodeKind::Pow:
      if (a.integer_power != b.integer_power) return false;
      break;
    default: break;
  }
  for (std::size_t k = 0; k < a.args.size(); ++k) {
    if (!structurally_equal(*a.args[k], *b.args[k])) return false;
  }
  return true;
}

}  // namespace lde::expr
