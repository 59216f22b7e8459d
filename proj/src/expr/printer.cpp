#include "mindlen/expr.hpp"

#include <cstdio>
#include <cstdlib>

namespace mindlen::expr {

namespace {

std::string format_number(double v) {
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Binary:
      switch (n.op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        default: return 4;
      }
    case NodeKind::Unary: return 3;
    case NodeKind::Constant: return n.value < 0 ? 3 : 5;
    default: return 5;
  }
}

std::string_view op_symbol(Op op) {
  switch (op) {
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Mul: return " * ";
    case Op::Div: return " / ";
    case Op::Pow: return "^";
    case Op::Neg: return "-";
  }
  return "?";
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
    case Op::Neg: return "neg";
  }
  return "?";
}

std::string wrap(const Node& n, bool parens) {
  return parens ? "(" + to_string(n) + ")" : to_string(n);
}

}  // namespace

std::string to_string(const Node& n) {
  switch (n.kind) {
    case NodeKind::Constant:
      if (!n.name.empty()) return n.name;
      return format_number(n.value);
    case NodeKind::Variable:
    case NodeKind::Parameter: return n.name;
    case NodeKind::Unary: return "-" + wrap(n.args[0], precedence(n.args[0]) < 3);
    case NodeKind::Binary: {
      const int p = precedence(n);
      const bool right_assoc = n.op == Op::Pow;
      const int lp = precedence(n.args[0]);
      const int rp = precedence(n.args[1]);
      const bool left_parens = right_assoc ? lp <= p : lp < p;
      const bool right_parens = right_assoc ? rp < p : rp <= p;
      return wrap(n.args[0], left_parens) + std::string(op_symbol(n.op)) +
             wrap(n.args[1], right_parens);
    }
    case NodeKind::Call: {
      std::string out(function_name(n.function));
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(n.args[i]);
      }
      return out + ')';
    }
  }
  return {};
}

std::string to_prefix(const Node& n) {
  switch (n.kind) {
    case NodeKind::Constant: return n.name.empty() ? format_number(n.value) : n.name;
    case NodeKind::Variable: return n.name;
    case NodeKind::Parameter: return "param " + n.name;
    case NodeKind::Unary: return "neg(" + to_prefix(n.args[0]) + ")";
    case NodeKind::Binary:
      return std::string(op_name(n.op)) + "(" + to_prefix(n.args[0]) + ", " +
             to_prefix(n.args[1]) + ")";
    case NodeKind::Call: {
      std::string out(function_name(n.function));
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        out += to_prefix(n.args[i]);
      }
      return out + ')';
    }
  }
  return {};
}

}  // namespace mindlen::expr
