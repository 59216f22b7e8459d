#include "mindlen/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace mindlen::expr {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, start, {}};

    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      return {Tok::Ident, start, src_.substr(start, pos_ - start)};
    }

    ++pos_;
    const auto text = src_.substr(start, 1);
    switch (c) {
      case '+': return {Tok::Plus, start, text};
      case '-': return {Tok::Minus, start, text};
      case '*': return {Tok::Star, start, text};
      case '/': return {Tok::Slash, start, text};
      case '^': return {Tok::Caret, start, text};
      case '(': return {Tok::LParen, start, text};
      case ')': return {Tok::RParen, start, text};
      case ',': return {Tok::Comma, start, text};
      default:
        throw ParseError("unexpected character '" + std::string(text) + "'", start);
    }
  }

 private:
  Token number(std::size_t start) {
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is the number 2 followed by the constant e
    }
    const auto text = src_.substr(start, pos_ - start);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(value))
      throw ParseError("malformed number '" + std::string(text) + "'", start);
    return {Tok::Number, start, text, value};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

struct FunctionInfo {
  std::string_view name;
  Function fn;
  int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"exp", Function::Exp, 1},   {"ln", Function::Ln, 1},     {"sqrt", Function::Sqrt, 1},
    {"abs", Function::Abs, 1},   {"sin", Function::Sin, 1},   {"cos", Function::Cos, 1},
    {"tan", Function::Tan, 1},   {"sinh", Function::Sinh, 1}, {"cosh", Function::Cosh, 1},
    {"tanh", Function::Tanh, 1}, {"pow", Function::Pow, 2},
};

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& info : kFunctions)
    if (info.name == name) return &info;
  return nullptr;
}

std::string token_text(const Token& t) {
  return t.kind == Tok::End ? std::string("end of input") : "'" + std::string(t.text) + "'";
}

class Parser {
 public:
  Parser(std::string_view src, std::string_view variable) : lex_(src), variable_(variable) {
    advance();
  }

  Node parse() {
    Node root = expression();
    if (cur_.kind != Tok::End) throw ParseError("unexpected " + token_text(cur_), cur_.offset);
    return root;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  Node expression() {
    Node lhs = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const Op op = cur_.kind == Tok::Plus ? Op::Add : Op::Sub;
      advance();
      lhs = Node::binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  Node term() {
    Node lhs = unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const Op op = cur_.kind == Tok::Star ? Op::Mul : Op::Div;
      advance();
      lhs = Node::binary(op, std::move(lhs), unary());
    }
    return lhs;
  }

  Node unary() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return Node::unary(Op::Neg, unary());
    }
    if (cur_.kind == Tok::Plus) {
      advance();
      return unary();
    }
    return power();
  }

  Node power() {
    Node base = primary();
    if (cur_.kind == Tok::Caret) {
      advance();
      return Node::binary(Op::Pow, std::move(base), unary());
    }
    return base;
  }

  Node primary() {
    const Token tok = cur_;
    switch (tok.kind) {
      case Tok::Number:
        advance();
        return Node::constant(tok.number);
      case Tok::LParen: {
        advance();
        Node inner = expression();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        advance();
        if (cur_.kind == Tok::LParen) return call(tok);
        if (tok.text == variable_) return Node::variable(std::string(tok.text));
        if (tok.text == "pi") return Node::constant(M_PI, "pi");
        if (tok.text == "e") return Node::constant(M_E, "e");
        if (find_function(tok.text))
          throw ParseError("function '" + std::string(tok.text) + "' needs an argument list",
                           tok.offset);
        return Node::parameter(std::string(tok.text));
      }
      default:
        throw ParseError("unexpected " + token_text(tok), tok.offset);
    }
  }

  Node call(const Token& name) {
    const FunctionInfo* info = find_function(name.text);
    if (!info) throw ParseError("unknown function '" + std::string(name.text) + "'", name.offset);
    advance();  // '('
    std::vector<Node> args;
    args.push_back(expression());
    while (cur_.kind == Tok::Comma) {
      advance();
      args.push_back(expression());
    }
    expect(Tok::RParen, "')'");
    if (static_cast<int>(args.size()) != info->arity)
      throw ParseError("function '" + std::string(info->name) + "' takes " +
                           std::to_string(info->arity) + " argument(s), got " +
                           std::to_string(args.size()),
                       name.offset);
    return Node::call(info->fn, std::move(args));
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind)
      throw ParseError(std::string("expected ") + what + ", found " + token_text(cur_), cur_.offset);
    advance();
  }

  Lexer lex_;
  std::string_view variable_;
  Token cur_{Tok::End, 0, {}};
};

void collect_parameters(const Node& node, std::set<std::string>& out) {
  if (node.kind == NodeKind::Parameter) out.insert(node.name);
  for (const auto& child : node.args) collect_parameters(child, out);
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

Node Node::constant(double v, std::string name) {
  Node n;
  n.kind = NodeKind::Constant;
  n.value = v;
  n.name = std::move(name);
  return n;
}

Node Node::variable(std::string name) {
  Node n;
  n.kind = NodeKind::Variable;
  n.name = std::move(name);
  return n;
}

Node Node::parameter(std::string name) {
  Node n;
  n.kind = NodeKind::Parameter;
  n.name = std::move(name);
  return n;
}

Node Node::unary(Op op, Node child) {
  Node n;
  n.kind = NodeKind::Unary;
  n.op = op;
  n.args.push_back(std::move(child));
  return n;
}

Node Node::binary(Op op, Node lhs, Node rhs) {
  Node n;
  n.kind = NodeKind::Binary;
  n.op = op;
  n.args.push_back(std::move(lhs));
  n.args.push_back(std::move(rhs));
  return n;
}

Node Node::call(Function fn, std::vector<Node> args) {
  Node n;
  n.kind = NodeKind::Call;
  n.function = fn;
  n.args = std::move(args);
  return n;
}

std::string_view function_name(Function fn) {
  for (const auto& info : kFunctions)
    if (info.fn == fn) return info.name;
  return "?";
}

Expression::Expression(Node root, std::string source, std::string variable)
    : root_(std::move(root)), source_(std::move(source)), variable_(std::move(variable)) {}

Expression Expression::parse(std::string_view source, std::string_view variable) {
  bool blank = true;
  for (char c : source) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) throw ParseError("empty expression", 0);
  Parser parser(source, variable);
  return Expression(parser.parse(), std::string(source), std::string(variable));
}

std::string Expression::to_string() const { return expr::to_string(root_); }

std::string Expression::to_prefix() const { return expr::to_prefix(root_); }

std::set<std::string> Expression::parameters() const {
  std::set<std::string> out;
  collect_parameters(root_, out);
  return out;
}

}  // namespace mindlen::expr
