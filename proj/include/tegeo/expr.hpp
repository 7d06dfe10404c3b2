#pragma once

// Scalar field expressions over the coordinates (x0..x{n-1}) and velocities
// (v0..v{n-1}) of a tangent-bundle chart. Grammar: docs/dsl-grammar.md.

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "tegeo/jet.hpp"

namespace tegeo {

enum class SymbolKind { Coordinate, Velocity };
enum class UnaryFn { Negate, Sin, Cos, Exp, Log, Sqrt, Abs, Tanh };
enum class BinaryOp { Add, Sub, Mul, Div };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Literal {
  double value;
};
struct Symbol {
  SymbolKind kind;
  int index;
};
struct Unary {
  UnaryFn fn;
  NodePtr arg;
};
struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};
/// Base raised to a constant exponent.
struct Power {
  NodePtr base;
  double exponent;
};

struct Node {
  std::variant<Literal, Symbol, Unary, Binary, Power> data;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownSymbol, SymbolOutOfRange };

  ParseError(Kind kind, std::size_t offset, const std::string& what)
      : std::runtime_error(what + " at byte " + std::to_string(offset)),
        kind_(kind),
        offset_(offset) {}

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Raised when evaluation leaves the domain of an operation. Carries the
/// canonical print of the offending subexpression.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : std::runtime_error(what + " in " + subexpression), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline const char* function_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Log: return "log";
    case UnaryFn::Sqrt: return "sqrt";
    case UnaryFn::Abs: return "abs";
    case UnaryFn::Tanh: return "tanh";
    case UnaryFn::Negate: return "-";
  }
  return "?";
}

inline void print_node(const Node& node, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          out += format_double(n.value);
        } else if constexpr (std::is_same_v<T, Symbol>) {
          out += n.kind == SymbolKind::Coordinate ? 'x' : 'v';
          out += std::to_string(n.index);
        } else if constexpr (std::is_same_v<T, Unary>) {
          if (n.fn == UnaryFn::Negate) {
            out += "(-";
            print_node(*n.arg, out);
            out += ')';
          } else {
            out += function_name(n.fn);
            out += '(';
            print_node(*n.arg, out);
            out += ')';
          }
        } else if constexpr (std::is_same_v<T, Binary>) {
          static constexpr const char* ops[] = {" + ", " - ", " * ", " / "};
          out += '(';
          print_node(*n.lhs, out);
          out += ops[static_cast<int>(n.op)];
          print_node(*n.rhs, out);
          out += ')';
        } else {
          out += '(';
          print_node(*n.base, out);
          out += " ^ ";
          if (n.exponent < 0) {
            out += "(-" + format_double(-n.exponent) + ")";
          } else {
            out += format_double(n.exponent);
          }
          out += ')';
        }
      },
      node.data);
}

inline bool same_structure(const Node& a, const Node& b) {
  if (a.data.index() != b.data.index()) return false;
  return std::visit(
      [&b](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        const auto& m = std::get<T>(b.data);
        if constexpr (std::is_same_v<T, Literal>) {
          return std::bit_cast<std::uint64_t>(n.value) == std::bit_cast<std::uint64_t>(m.value);
        } else if constexpr (std::is_same_v<T, Symbol>) {
          return n.kind == m.kind && n.index == m.index;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return n.fn == m.fn && same_structure(*n.arg, *m.arg);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return n.op == m.op && same_structure(*n.lhs, *m.lhs) && same_structure(*n.rhs, *m.rhs);
        } else {
          return std::bit_cast<std::uint64_t>(n.exponent) ==
                     std::bit_cast<std::uint64_t>(m.exponent) &&
                 same_structure(*n.base, *m.base);
        }
      },
      a.data);
}

template <class Pred>
bool any_symbol(const Node& node, Pred pred) {
  return std::visit(
      [&pred](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return false;
        } else if constexpr (std::is_same_v<T, Symbol>) {
          return pred(n);
        } else if constexpr (std::is_same_v<T, Unary>) {
          return any_symbol(*n.arg, pred);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return any_symbol(*n.lhs, pred) || any_symbol(*n.rhs, pred);
        } else {
          return any_symbol(*n.base, pred);
        }
      },
      node.data);
}

}  // namespace detail

/// Immutable expression tree bound to a chart dimension. Copies share the
/// tree, so expressions are cheap to pass around and safe to evaluate from
/// several threads at once.
class Expression {
 public:
  Expression() : Expression(0.0, 1) {}
  Expression(NodePtr root, int dim) : root_(std::move(root)), dim_(dim) {}
  Expression(double constant, int dim)
      : root_(std::make_shared<const Node>(Node{Literal{constant}})), dim_(dim) {}

  static Expression coordinate(int index, int dim) {
    return {std::make_shared<const Node>(Node{Symbol{SymbolKind::Coordinate, index}}), dim};
  }
  static Expression velocity(int index, int dim) {
    return {std::make_shared<const Node>(Node{Symbol{SymbolKind::Velocity, index}}), dim};
  }

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  int dim() const { return dim_; }

  /// Canonical fully parenthesized form; parses back to the same tree.
  std::string print() const {
    std::string out;
    detail::print_node(*root_, out);
    return out;
  }

  bool uses_velocity() const {
    return detail::any_symbol(*root_, [](const Symbol& s) { return s.kind == SymbolKind::Velocity; });
  }
  bool is_constant() const {
    return !detail::any_symbol(*root_, [](const Symbol&) { return true; });
  }
  bool is_zero_literal() const {
    const auto* lit = std::get_if<Literal>(&root_->data);
    return lit != nullptr && lit->value == 0.0;
  }

  friend bool operator==(const Expression& a, const Expression& b) {
    return a.dim_ == b.dim_ && detail::same_structure(*a.root_, *b.root_);
  }

  friend Expression operator+(const Expression& a, const Expression& b) {
    return binary(BinaryOp::Add, a, b);
  }
  friend Expression operator-(const Expression& a, const Expression& b) {
    return binary(BinaryOp::Sub, a, b);
  }
  friend Expression operator*(const Expression& a, const Expression& b) {
    return binary(BinaryOp::Mul, a, b);
  }
  friend Expression operator/(const Expression& a, const Expression& b) {
    return binary(BinaryOp::Div, a, b);
  }

 private:
  static Expression binary(BinaryOp op, const Expression& a, const Expression& b) {
    return {std::make_shared<const Node>(Node{Binary{op, a.root_, b.root_}}), a.dim_};
  }

  NodePtr root_;
  int dim_;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

  NodePtr parse() {
    skip_space();
    if (pos_ == src_.size()) fail("empty expression");
    NodePtr e = parse_sum();
    skip_space();
    if (pos_ != src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t at = std::string::npos) const {
    throw ParseError(ParseError::Kind::Syntax, at == std::string::npos ? pos_ : at, msg);
  }

  void skip_space() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(auto&& payload) {
    return std::make_shared<const Node>(Node{std::forward<decltype(payload)>(payload)});
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make(Binary{BinaryOp::Add, lhs, parse_product()});
      } else if (accept('-')) {
        lhs = make(Binary{BinaryOp::Sub, lhs, parse_product()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Binary{BinaryOp::Mul, lhs, parse_unary()});
      } else if (accept('/')) {
        lhs = make(Binary{BinaryOp::Div, lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make(Unary{UnaryFn::Negate, parse_unary()});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    while (accept('^')) {
      skip_space();
      const std::size_t at = pos_;
      NodePtr exponent;
      if (accept('-')) {
        exponent = make(Unary{UnaryFn::Negate, parse_primary()});
      } else {
        accept('+');
        exponent = parse_primary();
      }
      if (any_symbol(*exponent, [](const Symbol&) { return true; })) {
        fail("exponent must be constant", at);
      }
      base = make(Power{base, fold_constant(*exponent)});
    }
    return base;
  }

  static double fold_constant(const Node& node);

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [this] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      const std::size_t exp_start = pos_;
      digits();
      if (pos_ == exp_start) fail("malformed exponent in number", start);
    }
    double value = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) fail("malformed number", start);
    return make(Literal{value});
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, UnaryFn> functions[] = {
        {"sin", UnaryFn::Sin},   {"cos", UnaryFn::Cos}, {"exp", UnaryFn::Exp},
        {"log", UnaryFn::Log},   {"sqrt", UnaryFn::Sqrt}, {"abs", UnaryFn::Abs},
        {"tanh", UnaryFn::Tanh}};
    for (const auto& [fname, fn] : functions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after function name");
        NodePtr arg = parse_sum();
        if (!accept(')')) fail("expected ')'");
        return make(Unary{fn, arg});
      }
    }
    if (name == "pi") return make(Literal{std::numbers::pi});

    if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'v')) {
      const std::string_view digits = name.substr(1);
      const bool numeric = digits.find_first_not_of("0123456789") == std::string_view::npos;
      if (numeric && (digits.size() == 1 || digits[0] != '0')) {
        int index = 0;
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), index);
        if (res.ec != std::errc() || index >= dim_) {
          throw ParseError(ParseError::Kind::SymbolOutOfRange, start,
                           "symbol index out of range: " + std::string(name) +
                               " (dimension " + std::to_string(dim_) + ")");
        }
        return make(Symbol{name[0] == 'x' ? SymbolKind::Coordinate : SymbolKind::Velocity, index});
      }
    }
    throw ParseError(ParseError::Kind::UnknownSymbol, start,
                     "unknown symbol '" + std::string(name) + "'");
  }

  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `source` against a chart of dimension `dim`.
inline Expression parse(std::string_view source, int dim) {
  if (dim < 1) throw std::invalid_argument("expression dimension must be positive");
  return {detail::Parser(source, dim).parse(), dim};
}

namespace detail {

template <class T, class SymbolValue>
T evaluate_node(const Node& node, const SymbolValue& symbol_value, int nvars) {
  auto constant = [nvars](double v) {
    if constexpr (std::is_same_v<T, double>) {
      (void)nvars;
      return v;
    } else {
      return T::constant(v, nvars);
    }
  };
  auto domain_error = [&node](const std::string& what) -> DomainError {
    std::string sub;
    print_node(node, sub);
    return DomainError(what, sub);
  };

  return std::visit(
      [&](const auto& n) -> T {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Literal>) {
          return constant(n.value);
        } else if constexpr (std::is_same_v<N, Symbol>) {
          return symbol_value(n);
        } else if constexpr (std::is_same_v<N, Unary>) {
          using std::abs, std::cos, std::exp, std::log, std::sin, std::sqrt, std::tanh;
          T a = evaluate_node<T>(*n.arg, symbol_value, nvars);
          const double av = value_of(a);
          switch (n.fn) {
            case UnaryFn::Negate: return -a;
            case UnaryFn::Sin: return sin(a);
            case UnaryFn::Cos: return cos(a);
            case UnaryFn::Exp: return exp(a);
            case UnaryFn::Log:
              if (!(av > 0.0)) throw domain_error("log of nonpositive value");
              return log(a);
            case UnaryFn::Sqrt:
              if (av < 0.0) throw domain_error("sqrt of negative value");
              if constexpr (!std::is_same_v<T, double>) {
                if (av == 0.0) throw domain_error("sqrt is not differentiable at zero");
              }
              return sqrt(a);
            case UnaryFn::Abs: return abs(a);
            case UnaryFn::Tanh: return tanh(a);
          }
          throw domain_error("unknown function");
        } else if constexpr (std::is_same_v<N, Binary>) {
          T a = evaluate_node<T>(*n.lhs, symbol_value, nvars);
          T b = evaluate_node<T>(*n.rhs, symbol_value, nvars);
          switch (n.op) {
            case BinaryOp::Add: return a + b;
            case BinaryOp::Sub: return a - b;
            case BinaryOp::Mul: return a * b;
            case BinaryOp::Div:
              if (value_of(b) == 0.0) throw domain_error("division by zero");
              return a / b;
          }
          throw domain_error("unknown operator");
        } else {
          using std::pow;
          T a = evaluate_node<T>(*n.base, symbol_value, nvars);
          const double av = value_of(a);
          const double c = n.exponent;
          const bool integral = std::trunc(c) == c;
          if (integral) {
            if (av == 0.0 && c < 0.0) throw domain_error("zero raised to a negative power");
          } else if (av < 0.0) {
            throw domain_error("negative base with non-integer exponent");
          } else if (av == 0.0 && c < 2.0 && !std::is_same_v<T, double>) {
            throw domain_error("power is not twice differentiable at zero");
          }
          return pow(a, c);
        }
      },
      node.data);
}

inline double Parser::fold_constant(const Node& node) {
  return evaluate_node<double>(node, [](const Symbol&) { return 0.0; }, 0);
}

}  // namespace detail

/// Plain value at base coordinates x and fiber coordinates xdot.
inline double eval_value(const Expression& e, std::span<const double> x,
                         std::span<const double> xdot) {
  return detail::evaluate_node<double>(
      e.root(),
      [&](const Symbol& s) {
        return s.kind == SymbolKind::Coordinate ? x[static_cast<std::size_t>(s.index)]
                                                : xdot[static_cast<std::size_t>(s.index)];
      },
      0);
}

/// Value, gradient and Hessian with respect to (x0..x{n-1}, v0..v{n-1}).
inline Jet2 eval_jet2(const Expression& e, std::span<const double> x, std::span<const double> xdot) {
  const int n = static_cast<int>(x.size());
  const int nvars = 2 * n;
  return detail::evaluate_node<Jet2>(
      e.root(),
      [&](const Symbol& s) {
        const auto i = static_cast<std::size_t>(s.index);
        return s.kind == SymbolKind::Coordinate ? Jet2::variable(x[i], s.index, nvars)
                                                : Jet2::variable(xdot[i], n + s.index, nvars);
      },
      nvars);
}

}  // namespace tegeo
