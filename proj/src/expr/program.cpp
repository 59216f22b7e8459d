#include "mindlen/expr.hpp"
#include "mindlen/extended.hpp"

#include <algorithm>

namespace mindlen::expr {

std::string_view describe(EvalStatus status) {
  switch (status) {
    case EvalStatus::Ok: return "ok";
    case EvalStatus::Domain: return "domain error";
    case EvalStatus::Pole: return "pole";
    case EvalStatus::Overflow: return "overflow";
  }
  return "?";
}

EvaluationError::EvaluationError(const std::string& what, EvalStatus status)
    : std::runtime_error(what), status_(status) {}

UnboundParameter::UnboundParameter(const std::string& name)
    : std::runtime_error("unbound parameter '" + name + "'") {}

Program Program::compile(const Expression& expression, const ParameterMap& params) {
  Program prog;
  prog.emit(expression.root(), params);
  std::size_t depth = 0;
  for (const auto& ins : prog.code_) {
    switch (ins.code) {
      case Code::Push:
      case Code::Var: ++depth; break;
      case Code::Add:
      case Code::Sub:
      case Code::Mul:
      case Code::Div:
      case Code::Pow: --depth; break;
      default: break;
    }
    prog.max_depth_ = std::max(prog.max_depth_, depth);
  }
  return prog;
}

void Program::emit(const Node& node, const ParameterMap& params) {
  switch (node.kind) {
    case NodeKind::Constant:
      code_.push_back({Code::Push, node.value});
      return;
    case NodeKind::Variable:
      code_.push_back({Code::Var, 0.0});
      return;
    case NodeKind::Parameter: {
      const auto it = params.find(node.name);
      if (it == params.end()) throw UnboundParameter(node.name);
      code_.push_back({Code::Push, it->second});
      return;
    }
    case NodeKind::Unary:
      emit(node.args[0], params);
      code_.push_back({Code::Neg, 0.0});
      return;
    case NodeKind::Binary: {
      emit(node.args[0], params);
      emit(node.args[1], params);
      Code c = Code::Add;
      switch (node.op) {
        case Op::Add: c = Code::Add; break;
        case Op::Sub: c = Code::Sub; break;
        case Op::Mul: c = Code::Mul; break;
        case Op::Div: c = Code::Div; break;
        case Op::Pow: c = Code::Pow; break;
        case Op::Neg: break;
      }
      code_.push_back({c, 0.0});
      return;
    }
    case NodeKind::Call: {
      for (const auto& a : node.args) emit(a, params);
      Code c = Code::Exp;
      switch (node.function) {
        case Function::Exp: c = Code::Exp; break;
        case Function::Ln: c = Code::Ln; break;
        case Function::Sqrt: c = Code::Sqrt; break;
        case Function::Abs: c = Code::Abs; break;
        case Function::Sin: c = Code::Sin; break;
        case Function::Cos: c = Code::Cos; break;
        case Function::Tan: c = Code::Tan; break;
        case Function::Sinh: c = Code::Sinh; break;
        case Function::Cosh: c = Code::Cosh; break;
        case Function::Tanh: c = Code::Tanh; break;
        case Function::Pow: c = Code::Pow; break;
      }
      code_.push_back({c, 0.0});
      return;
    }
  }
}

namespace {

template <class T>
bool is_integer(T y) {
  return num::floor(y) == y;
}

// Classifies a result computed from finite operands.
template <class T>
EvalStatus check(T result, bool& underflow, bool nonzero_expected) {
  if (num::isnan(result)) return EvalStatus::Domain;
  if (num::isinf(result)) return EvalStatus::Overflow;
  if (result == T(0) && nonzero_expected) underflow = true;
  return EvalStatus::Ok;
}

}  // namespace

template <class T>
Evaluation<T> Program::run(T x) const {
  constexpr std::size_t kInline = 32;
  T inline_stack[kInline];
  std::vector<T> heap_stack;
  T* stack = inline_stack;
  if (max_depth_ > kInline) {
    heap_stack.resize(max_depth_);
    stack = heap_stack.data();
  }

  Evaluation<T> out;
  std::size_t top = 0;
  auto fail = [&](EvalStatus s) {
    out.status = s;
    out.value = T(0);
    return out;
  };

  for (const auto& ins : code_) {
    EvalStatus s = EvalStatus::Ok;
    switch (ins.code) {
      case Code::Push: stack[top++] = static_cast<T>(ins.value); continue;
      case Code::Var: stack[top++] = x; continue;
      case Code::Neg: stack[top - 1] = -stack[top - 1]; continue;
      case Code::Add:
      case Code::Sub:
      case Code::Mul:
      case Code::Div:
      case Code::Pow: {
        const T b = stack[--top];
        const T a = stack[top - 1];
        T r{};
        bool nonzero = false;
        switch (ins.code) {
          case Code::Add: r = a + b; break;
          case Code::Sub: r = a - b; break;
          case Code::Mul:
            r = a * b;
            nonzero = a != T(0) && b != T(0);
            break;
          case Code::Div:
            if (b == T(0)) return fail(EvalStatus::Pole);
            r = a / b;
            nonzero = a != T(0);
            break;
          default:
            if (a < T(0) && !is_integer(b)) return fail(EvalStatus::Domain);
            if (a == T(0) && b < T(0)) return fail(EvalStatus::Pole);
            r = num::pow(a, b);
            nonzero = a != T(0);
            break;
        }
        s = check(r, out.underflow, nonzero);
        stack[top - 1] = r;
        break;
      }
      default: {
        const T a = stack[top - 1];
        T r{};
        bool nonzero = false;
        switch (ins.code) {
          case Code::Exp:
            r = num::exp(a);
            nonzero = true;
            break;
          case Code::Ln:
            if (a < T(0)) return fail(EvalStatus::Domain);
            if (a == T(0)) return fail(EvalStatus::Pole);
            r = num::log(a);
            break;
          case Code::Sqrt:
            if (a < T(0)) return fail(EvalStatus::Domain);
            r = num::sqrt(a);
            break;
          case Code::Abs: r = num::fabs(a); break;
          case Code::Sin: r = num::sin(a); break;
          case Code::Cos: r = num::cos(a); break;
          case Code::Tan: r = num::tan(a); break;
          case Code::Sinh: r = num::sinh(a); break;
          case Code::Cosh: r = num::cosh(a); break;
          case Code::Tanh: r = num::tanh(a); break;
          default: break;
        }
        s = check(r, out.underflow, nonzero);
        stack[top - 1] = r;
        break;
      }
    }
    if (s != EvalStatus::Ok) {
      // keep the signed infinity so callers can tell +overflow from -overflow
      out.status = s;
      out.value = s == EvalStatus::Overflow ? stack[top - 1] : T(0);
      return out;
    }
  }
  out.value = stack[0];
  return out;
}

template Evaluation<double> Program::run<double>(double) const;
template Evaluation<quad> Program::run<quad>(quad) const;

double evaluate(const Expression& expression, double x, const ParameterMap& params) {
  const Program prog = Program::compile(expression, params);
  const auto r = prog.run(x);
  if (!r.ok())
    throw EvaluationError(std::string(describe(r.status)) + " evaluating '" + expression.source() +
                              "' at " + expression.variable() + " = " + std::to_string(x),
                          r.status);
  return r.value;
}

}  // namespace mindlen::expr
