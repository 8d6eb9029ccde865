#include "tirsec/rules.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

namespace tirsec {

std::string_view privilege_mode_name(PrivilegeMode m) {
  switch (m) {
    case PrivilegeMode::ForbidExtra: return "forbid-extra";
    case PrivilegeMode::RequireAll: return "require-all";
    case PrivilegeMode::ReportUnchecked: return "report-unchecked";
  }
  return "?";
}

namespace {

struct Word {
  std::string text;
  std::uint32_t line = 0;
  std::uint32_t column = 0;
};

std::vector<Word> split(std::string_view src) {
  std::vector<Word> out;
  std::uint32_t line = 1;
  std::uint32_t col = 1;
  std::size_t i = 0;
  auto step = [&] {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') step();
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      step();
    } else if (c == '{' || c == '}') {
      out.push_back({std::string(1, c), line, col});
      step();
    } else {
      Word w{{}, line, col};
      while (i < src.size() && !std::isspace(static_cast<unsigned char>(src[i])) && src[i] != '{' && src[i] != '}' &&
             src[i] != '#') {
        w.text += src[i];
        step();
      }
      out.push_back(std::move(w));
    }
  }
  out.push_back({"", line, col});
  return out;
}

class RuleParser {
public:
  RuleParser(std::vector<Word> words, std::string file) : w_(std::move(words)), file_(std::move(file)) {}

  RuleSet run() {
    RuleSet rs;
    std::set<std::string> names;
    while (!at_end()) {
      const Word& kw = next();
      if (kw.text == "taint-rule") {
        TaintRule r = taint_rule(kw);
        if (!names.insert(r.name).second) fail(kw, "duplicate rule name '" + r.name + "'");
        rs.taint_rules.push_back(std::move(r));
      } else if (kw.text == "priv-rule") {
        PrivilegeRule r = priv_rule(kw);
        if (!names.insert(r.name).second) fail(kw, "duplicate rule name '" + r.name + "'");
        rs.privilege_rules.push_back(std::move(r));
      } else {
        fail(kw, "expected 'taint-rule' or 'priv-rule', found " + describe(kw));
      }
    }
    return rs;
  }

private:
  [[noreturn]] void fail(const Word& w, const std::string& msg) const {
    throw ParseError(SourceLocation{file_, w.line, w.column}, msg);
  }
  static std::string describe(const Word& w) { return w.text.empty() ? "end of input" : "'" + w.text + "'"; }
  bool at_end() const { return w_[pos_].text.empty(); }
  const Word& peek() const { return w_[pos_]; }
  const Word& next() {
    const Word& w = w_[pos_];
    if (pos_ + 1 < w_.size()) ++pos_;
    return w;
  }
  static bool keyword(const std::string& s) {
    return s == "source" || s == "sink" || s == "pair" || s == "privs" || s == "checker" || s == "{" || s == "}";
  }
  const Word& name(const char* what) {
    const Word& w = next();
    if (w.text.empty() || keyword(w.text)) fail(w, std::string("expected ") + what + ", found " + describe(w));
    return w;
  }
  void expect(const char* text) {
    const Word& w = next();
    if (w.text != text) fail(w, std::string("expected '") + text + "', found " + describe(w));
  }
  // Reads `key=VALUE` and returns VALUE.
  std::string keyed(const Word& w, std::string_view key) {
    if (w.text.size() <= key.size() + 1 || w.text.compare(0, key.size(), key) != 0 || w.text[key.size()] != '=')
      fail(w, "expected '" + std::string(key) + "=...', found " + describe(w));
    return w.text.substr(key.size() + 1);
  }
  std::int64_t integer(const Word& w, const std::string& s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail(w, "expected integer, found '" + s + "'");
    return v;
  }
  std::uint32_t param_index(const Word& w) {
    std::int64_t v = integer(w, keyed(w, "param"));
    if (v < 0 || v > 1'000'000) fail(w, "parameter position out of range");
    return static_cast<std::uint32_t>(v);
  }

  TaintRule taint_rule(const Word& kw) {
    TaintRule r;
    r.line = kw.line;
    r.name = name("rule name").text;
    const Word& sev = next();
    std::int64_t s = integer(sev, keyed(sev, "severity"));
    if (s < 1 || s > 10) fail(sev, "severity " + std::to_string(s) + " out of range 1..10");
    r.severity = static_cast<int>(s);
    expect("{");
    const Word& src = next();
    if (src.text != "source") fail(src, "expected 'source', found " + describe(src));
    r.source.function = name("source function").text;
    const Word& pos = next();
    if (pos.text == "return") {
      r.source.is_return = true;
    } else {
      r.source.is_return = false;
      r.source.param = param_index(pos);
    }
    if (peek().text.rfind("type=", 0) == 0) {
      const Word& t = next();
      if (keyed(t, "type") != "event") fail(t, "unknown source type '" + t.text.substr(5) + "'");
      r.source.event = true;
    }
    while (peek().text == "sink") {
      next();
      TaintSink sk;
      sk.function = name("sink function").text;
      const Word& pw = next();
      sk.param = param_index(pw);
      if (peek().text.rfind("type=", 0) == 0) fail(peek(), "'type=' is only allowed on sources");
      r.sinks.push_back(std::move(sk));
    }
    if (r.sinks.empty()) fail(peek(), "taint rule '" + r.name + "' needs at least one sink");
    if (peek().text == "pair") {
      next();
      const Word& role = next();
      PairTag tag;
      if (role.text == "producer") {
        tag.role = PairRole::Producer;
      } else if (role.text == "consumer") {
        tag.role = PairRole::Consumer;
      } else {
        fail(role, "expected 'producer' or 'consumer', found " + describe(role));
      }
      tag.tag = name("pair tag").text;
      r.pair = std::move(tag);
    }
    expect("}");
    return r;
  }

  PrivilegeRule priv_rule(const Word& kw) {
    PrivilegeRule r;
    r.line = kw.line;
    r.name = name("rule name").text;
    const Word& mw = next();
    std::string mode = keyed(mw, "mode");
    if (mode == "forbid-extra") {
      r.mode = PrivilegeMode::ForbidExtra;
    } else if (mode == "require-all") {
      r.mode = PrivilegeMode::RequireAll;
    } else if (mode == "report-unchecked") {
      r.mode = PrivilegeMode::ReportUnchecked;
    } else {
      fail(mw, "unknown mode '" + mode + "'");
    }
    expect("{");
    expect("source");
    r.source = name("source function").text;
    expect("sink");
    r.sink = name("sink function").text;
    if (peek().text == "privs") {
      const Word& pw = next();
      while (!keyword(peek().text) && !at_end()) r.privileges.push_back(next().text);
      if (r.privileges.empty()) fail(pw, "'privs' needs at least one privilege");
      std::sort(r.privileges.begin(), r.privileges.end());
      r.privileges.erase(std::unique(r.privileges.begin(), r.privileges.end()), r.privileges.end());
    }
    if (peek().text == "checker") {
      next();
      r.checker = name("checker function").text;
    }
    const Word& close = peek();
    expect("}");
    if (r.privileges.empty() && r.mode != PrivilegeMode::ReportUnchecked)
      fail(close, "rule '" + r.name + "' in mode " + mode + " needs a 'privs' list");
    return r;
  }

  std::vector<Word> w_;
  std::string file_;
  std::size_t pos_ = 0;
};

}  // namespace

RuleSet parse_rules(std::string_view text, std::string_view file_name) {
  return RuleParser(split(text), std::string(file_name)).run();
}

std::string print_rules(const RuleSet& rs) {
  std::string out;
  for (const auto& r : rs.taint_rules) {
    out += "taint-rule " + r.name + " severity=" + std::to_string(r.severity) + " {\n";
    out += "  source " + r.source.function + (r.source.is_return ? " return" : " param=" + std::to_string(r.source.param));
    if (r.source.event) out += " type=event";
    out += "\n";
    for (const auto& s : r.sinks) out += "  sink " + s.function + " param=" + std::to_string(s.param) + "\n";
    if (r.pair)
      out += std::string("  pair ") + (r.pair->role == PairRole::Producer ? "producer " : "consumer ") + r.pair->tag + "\n";
    out += "}\n";
  }
  for (const auto& r : rs.privilege_rules) {
    out += "priv-rule " + r.name + " mode=" + std::string(privilege_mode_name(r.mode)) + " {\n";
    out += "  source " + r.source + "\n  sink " + r.sink + "\n";
    if (!r.privileges.empty()) {
      out += "  privs";
      for (const auto& pv : r.privileges) out += " " + pv;
      out += "\n";
    }
    if (r.checker != kDefaultChecker) out += "  checker " + r.checker + "\n";
    out += "}\n";
  }
  return out;
}

std::vector<Diagnostic> validate_rules(const RuleSet& rs, const Program& p) {
  // Arity of every present function: declared parameters, or the widest call
  // site for functions that are only called.
  std::map<std::string, std::size_t, std::less<>> arity;
  for (const auto& f : p.functions) arity[f.name] = f.params.size();
  for (const auto& f : p.functions) {
    for (const auto& b : f.blocks) {
      for (const auto& inst : b.instructions) {
        if (inst.op != Opcode::Call || p.find_function(inst.symbol)) continue;
        auto& a = arity[inst.symbol];
        a = std::max(a, inst.operands.size());
      }
    }
  }
  std::vector<Diagnostic> out;
  auto check = [&](const std::string& rule, std::uint32_t line, const std::string& fn, bool has_param,
                   std::uint32_t param, const char* role) {
    auto it = arity.find(fn);
    if (it == arity.end()) {
      out.push_back({Severity::Warning, rule, std::string(role) + " function '" + fn + "' does not occur in the program", line});
      return;
    }
    if (has_param && param >= it->second)
      out.push_back({Severity::Error, rule,
                     std::string(role) + " position param=" + std::to_string(param) + " out of range for '" + fn +
                         "' with " + std::to_string(it->second) + " parameter(s)",
                     line});
  };
  for (const auto& r : rs.taint_rules) {
    if (r.source.event && r.source.is_return)
      out.push_back({Severity::Error, r.name, "event sources must name a parameter, not a return value", r.line});
    check(r.name, r.line, r.source.function, !r.source.is_return, r.source.param, "source");
    for (const auto& s : r.sinks) check(r.name, r.line, s.function, true, s.param, "sink");
  }
  for (const auto& r : rs.privilege_rules) {
    check(r.name, r.line, r.source, false, 0, "source");
    check(r.name, r.line, r.sink, false, 0, "sink");
  }
  return out;
}

}  // namespace tirsec
