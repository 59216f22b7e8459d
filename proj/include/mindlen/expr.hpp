#pragma once

// Textual deformation functions: parsing, printing and evaluation.
//
// Grammar (see docs/expression-grammar.md):
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := ('-' | '+') unary | power
//   power   := primary [ '^' unary ]          (right-associative)
//   primary := number | identifier | identifier '(' expr { ',' expr } ')'
//            | '(' expr ')'

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mindlen::expr {

using ParameterMap = std::map<std::string, double, std::less<>>;

enum class NodeKind { Constant, Variable, Parameter, Unary, Binary, Call };

enum class Op { Add, Sub, Mul, Div, Pow, Neg };

enum class Function { Exp, Ln, Sqrt, Abs, Sin, Cos, Tan, Sinh, Cosh, Tanh, Pow };

struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;  // Constant
  std::string name;    // Variable, Parameter, named Constant
  Op op = Op::Add;     // Unary, Binary
  Function function = Function::Exp;
  std::vector<Node> args;

  bool operator==(const Node&) const = default;

  static Node constant(double v, std::string name = {});
  static Node variable(std::string name);
  static Node parameter(std::string name);
  static Node unary(Op op, Node child);
  static Node binary(Op op, Node lhs, Node rhs);
  static Node call(Function fn, std::vector<Node> args);
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class Expression {
 public:
  /// Parses `source`; identifiers other than `variable`, `pi` and `e` become
  /// named parameters.
  static Expression parse(std::string_view source, std::string_view variable = "p");

  const Node& root() const noexcept { return root_; }
  const std::string& source() const noexcept { return source_; }
  const std::string& variable() const noexcept { return variable_; }

  /// Infix form with minimal parentheses; parsing it yields an identical tree.
  std::string to_string() const;
  /// Prefix form, e.g. add(1, mul(param b, pow(p, 2))).
  std::string to_prefix() const;
  std::set<std::string> parameters() const;

 private:
  Expression(Node root, std::string source, std::string variable);

  Node root_;
  std::string source_;
  std::string variable_;
};

std::string to_string(const Node& node);
std::string to_prefix(const Node& node);
std::string_view function_name(Function fn);

enum class EvalStatus { Ok, Domain, Pole, Overflow };

std::string_view describe(EvalStatus status);

template <class T>
struct Evaluation {
  T value{};
  EvalStatus status = EvalStatus::Ok;
  bool underflow = false;  // a nonzero quantity flushed to zero on the way

  bool ok() const noexcept { return status == EvalStatus::Ok; }
};

class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, EvalStatus status);
  EvalStatus status() const noexcept { return status_; }

 private:
  EvalStatus status_;
};

class UnboundParameter : public std::runtime_error {
 public:
  explicit UnboundParameter(const std::string& name);
};

/// Postfix program with every parameter folded to a constant. Immutable and
/// safe to run concurrently.
class Program {
 public:
  static Program compile(const Expression& expression, const ParameterMap& params);

  template <class T>
  Evaluation<T> run(T x) const;

  std::size_t size() const noexcept { return code_.size(); }

 private:
  enum class Code : unsigned char {
    Push, Var, Neg, Add, Sub, Mul, Div, Pow,
    Exp, Ln, Sqrt, Abs, Sin, Cos, Tan, Sinh, Cosh, Tanh
  };
  struct Instr {
    Code code;
    double value;
  };

  void emit(const Node& node, const ParameterMap& params);

  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
};

/// Evaluates with every parameter bound. Throws UnboundParameter or
/// EvaluationError; never returns NaN or an infinity.
double evaluate(const Expression& expression, double x, const ParameterMap& params);

}  // namespace mindlen::expr
