#include "gverify/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace gverify {

namespace {

enum class Tok { word, string, lbrace, rbrace, eq, neq, dose_up, dose_down, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourceLoc loc;
};

const std::unordered_set<std::string> kReserved = {
    "kb",      "variable", "when",   "components", "treatment",
    "exclude", "rule",     "first",  "second",     "and",
    "in"};

bool atom_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

class Lexer {
 public:
  Lexer(std::string_view text, std::string_view filename)
      : text_(text), filename_(filename) {}

  Token next() {
    skip_ws();
    Token t;
    t.loc = {line_, col_};
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (c == '{') return take(Tok::lbrace, 1);
    if (c == '}') return take(Tok::rbrace, 1);
    if (c == '=') return take(Tok::eq, 1);
    if (c == '!' && peek(1) == '=') return take(Tok::neq, 2);
    if (c == '^' && peek(1) == '+') return take(Tok::dose_up, 2);
    if (c == '^' && peek(1) == '-') return take(Tok::dose_down, 2);
    if (c == '"') return take_string();
    if (atom_char(c)) return take_word();
    fail(t.loc, std::string("unexpected character '") + c + "'");
    return t;  // unreachable
  }

  [[noreturn]] void fail(SourceLoc loc, const std::string& message) const {
    std::ostringstream os;
    os << filename_ << ':' << loc.line << ':' << loc.col << ": " << message;
    throw Error(Errc::syntax, os.str());
  }

  std::string_view filename() const { return filename_; }

 private:
  char peek(size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token take(Tok kind, size_t len) {
    Token t;
    t.kind = kind;
    t.loc = {line_, col_};
    t.text = text_.substr(pos_, len);
    for (size_t i = 0; i < len; ++i) advance();
    return t;
  }

  Token take_word() {
    Token t;
    t.kind = Tok::word;
    t.loc = {line_, col_};
    size_t start = pos_;
    while (pos_ < text_.size() && atom_char(text_[pos_])) advance();
    t.text = text_.substr(start, pos_ - start);
    return t;
  }

  Token take_string() {
    Token t;
    t.kind = Tok::string;
    t.loc = {line_, col_};
    advance();  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n')
        fail(t.loc, "unterminated string literal");
      char c = text_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) fail(t.loc, "unterminated string literal");
        c = text_[pos_];
      }
      out += c;
      advance();
    }
    t.text = std::move(out);
    return t;
  }

  std::string_view text_;
  std::string filename_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, std::string_view filename)
      : lex_(text, filename) {
    advance();
  }

  KnowledgeBase parse() {
    expect_keyword("kb");
    kb_.version = expect(Tok::string, "version string").text;
    expect(Tok::lbrace, "'{'");
    while (cur_.kind != Tok::rbrace) {
      if (cur_.kind == Tok::end) fail(cur_.loc, "unexpected end of input, expected '}'");
      section();
    }
    advance();  // '}'
    if (cur_.kind != Tok::end) fail(cur_.loc, "trailing content after closing '}'");
    kb_.finalize();
    return std::move(kb_);
  }

 private:
  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(SourceLoc loc, const std::string& message) const {
    lex_.fail(loc, message);
  }

  [[noreturn]] void fail_at(SourceLoc loc, Errc code, const std::string& message) const {
    std::ostringstream os;
    os << lex_.filename() << ':' << loc.line << ':' << loc.col << ": " << message;
    throw Error(code, os.str());
  }

  Token expect(Tok kind, const std::string& what) {
    if (cur_.kind != kind)
      fail(cur_.loc, "expected " + what + describe_current());
    Token t = cur_;
    advance();
    return t;
  }

  std::string describe_current() const {
    if (cur_.kind == Tok::end) return ", found end of input";
    return ", found '" + cur_.text + "'";
  }

  void expect_keyword(const std::string& kw) {
    if (cur_.kind != Tok::word || cur_.text != kw)
      fail(cur_.loc, "expected '" + kw + "'" + describe_current());
    advance();
  }

  bool at_keyword(const std::string& kw) const {
    return cur_.kind == Tok::word && cur_.text == kw;
  }

  Token ident(const std::string& what) {
    Token t = expect(Tok::word, what);
    if (kReserved.count(t.text))
      fail(t.loc, "reserved word '" + t.text + "' cannot be used as " + what);
    bool ok = !t.text.empty() &&
              (std::isalpha(static_cast<unsigned char>(t.text[0])) || t.text[0] == '_');
    for (char c : t.text)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) ok = false;
    if (!ok) fail(t.loc, "'" + t.text + "' is not a valid identifier for " + what);
    return t;
  }

  Token value_token() {
    if (cur_.kind != Tok::word && cur_.kind != Tok::string)
      fail(cur_.loc, "expected a value" + describe_current());
    Token t = cur_;
    advance();
    return t;
  }

  void section() {
    if (at_keyword("components")) return components_section();
    if (at_keyword("treatment")) return treatment_section();
    if (at_keyword("variable")) return variable_section();
    if (at_keyword("exclude")) return exclude_section();
    if (at_keyword("rule")) return rule_section();
    fail(cur_.loc,
         "expected a section (components, treatment, variable, exclude, rule)" +
             describe_current());
  }

  void components_section() {
    advance();
    expect(Tok::lbrace, "'{'");
    while (cur_.kind != Tok::rbrace) {
      Token t = ident("a component name");
      if (kb_.component_index(t.text) >= 0)
        fail_at(t.loc, Errc::duplicate, "duplicate component '" + t.text + "'");
      kb_.components.push_back(t.text);
    }
    advance();
  }

  void treatment_section() {
    advance();
    Token name = ident("a treatment name");
    if (kb_.treatment_index(name.text) >= 0)
      fail_at(name.loc, Errc::duplicate, "duplicate treatment '" + name.text + "'");
    Treatment t;
    t.name = name.text;
    t.loc = name.loc;
    expect(Tok::lbrace, "'{'");
    while (cur_.kind != Tok::rbrace) {
      Token c = ident("a component reference");
      int idx = kb_.component_index(c.text);
      if (idx < 0)
        fail_at(c.loc, Errc::reference, "undeclared component '" + c.text + "'");
      t.components.push_back(idx);
    }
    advance();
    kb_.catalog.push_back(std::move(t));
  }

  void variable_section() {
    advance();
    Token name = ident("a variable name");
    if (kb_.variable_index(name.text) >= 0)
      fail_at(name.loc, Errc::duplicate, "duplicate variable '" + name.text + "'");
    VariableDef v;
    v.name = name.text;
    v.loc = name.loc;
    if (at_keyword("when")) {
      advance();
      Token gv = ident("a variable reference");
      v.guard_var = kb_.variable_index(gv.text);
      if (v.guard_var < 0)
        fail_at(gv.loc, Errc::reference,
                "applicability guard references undeclared variable '" + gv.text + "'");
      expect(Tok::eq, "'='");
      Token val = value_token();
      v.guard_value = kb_.value_index(v.guard_var, val.text);
      if (v.guard_value < 0)
        fail_at(val.loc, Errc::reference,
                "variable '" + gv.text + "' has no value '" + val.text + "'");
    }
    expect(Tok::lbrace, "'{'");
    while (cur_.kind != Tok::rbrace) {
      Token val = value_token();
      for (const auto& existing : v.domain)
        if (existing == val.text)
          fail_at(val.loc, Errc::duplicate,
                  "duplicate value '" + val.text + "' in variable '" + v.name + "'");
      v.domain.push_back(val.text);
    }
    advance();
    if (v.domain.empty()) fail(name.loc, "variable '" + v.name + "' has an empty domain");
    kb_.variables.push_back(std::move(v));
  }

  GuardTest parse_test() {
    Token var = ident("a variable reference");
    GuardTest t;
    t.loc = var.loc;
    t.var = kb_.variable_index(var.text);
    if (t.var < 0)
      fail_at(var.loc, Errc::reference, "undeclared variable '" + var.text + "'");
    auto lookup_value = [&](const Token& val) {
      int idx = kb_.value_index(t.var, val.text);
      if (idx < 0)
        fail_at(val.loc, Errc::reference,
                "variable '" + var.text + "' has no value '" + val.text + "'");
      return idx;
    };
    if (cur_.kind == Tok::eq) {
      advance();
      t.op = TestOp::eq;
      t.values.push_back(lookup_value(value_token()));
    } else if (cur_.kind == Tok::neq) {
      advance();
      t.op = TestOp::neq;
      t.values.push_back(lookup_value(value_token()));
    } else if (at_keyword("in")) {
      advance();
      t.op = TestOp::in_set;
      expect(Tok::lbrace, "'{'");
      while (cur_.kind != Tok::rbrace) t.values.push_back(lookup_value(value_token()));
      advance();
      if (t.values.empty()) fail(var.loc, "empty value set in membership test");
    } else {
      fail(cur_.loc, "expected '=', '!=' or 'in'" + describe_current());
    }
    return t;
  }

  std::vector<GuardTest> parse_tests() {
    std::vector<GuardTest> out;
    out.push_back(parse_test());
    while (at_keyword("and")) {
      advance();
      out.push_back(parse_test());
    }
    return out;
  }

  void exclude_section() {
    advance();
    Token name = ident("a constraint name");
    for (const auto& c : kb_.constraints)
      if (c.name == name.text)
        fail_at(name.loc, Errc::duplicate, "duplicate constraint '" + name.text + "'");
    ConstraintRule c;
    c.name = name.text;
    c.loc = name.loc;
    expect_keyword("when");
    c.tests = parse_tests();
    kb_.constraints.push_back(std::move(c));
  }

  std::vector<RecElem> parse_elems(bool allow_empty) {
    expect(Tok::lbrace, "'{'");
    std::vector<RecElem> out;
    while (cur_.kind != Tok::rbrace) {
      Token t = ident("a treatment reference");
      RecElem e;
      e.treatment = kb_.treatment_index(t.text);
      if (e.treatment < 0)
        fail_at(t.loc, Errc::reference, "undeclared treatment '" + t.text + "'");
      if (cur_.kind == Tok::dose_up) {
        e.dose = DoseMod::increase;
        advance();
      } else if (cur_.kind == Tok::dose_down) {
        e.dose = DoseMod::decrease;
        advance();
      }
      out.push_back(e);
    }
    Token close = cur_;
    advance();
    if (out.empty() && !allow_empty)
      fail(close.loc, "recommendation line must name at least one treatment");
    return out;
  }

  void rule_section() {
    advance();
    Token name = ident("a rule name");
    for (const auto& r : kb_.rules)
      if (r.name == name.text)
        fail_at(name.loc, Errc::duplicate, "duplicate rule '" + name.text + "'");
    TherapyRule r;
    r.name = name.text;
    r.loc = name.loc;
    expect(Tok::lbrace, "'{'");
    expect_keyword("when");
    r.guard = parse_tests();
    expect_keyword("first");
    r.first_line = parse_elems(false);
    expect_keyword("second");
    r.second_line = parse_elems(true);
    expect(Tok::rbrace, "'}'");
    kb_.rules.push_back(std::move(r));
  }

  Lexer lex_;
  Token cur_;
  KnowledgeBase kb_;
};

}  // namespace

KnowledgeBase parse_kb(std::string_view text, std::string_view filename) {
  return Parser(text, filename).parse();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(Errc::io, "short write to '" + path + "'");
}

KnowledgeBase load_kb_file(const std::string& path) {
  return parse_kb(read_file(path), path);
}

}  // namespace gverify
