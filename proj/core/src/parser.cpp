#include "tirsec/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace tirsec {
namespace {

enum class Tok { Ident, Value, FuncRef, Int, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  std::uint32_t line = 0;
  std::uint32_t column = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

class Lexer {
public:
  Lexer(std::string_view src, std::string file) : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (c == '%') {
        advance();
        t.kind = Tok::Value;
        t.text = read_ident(t);
      } else if (c == '@' && pos_ + 1 < src_.size() && ident_start(src_[pos_ + 1])) {
        advance();
        t.kind = Tok::FuncRef;
        t.text = read_ident(t);
      } else if (ident_start(c)) {
        t.kind = Tok::Ident;
        t.text = read_ident(t);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        t.kind = Tok::Int;
        std::size_t start = pos_;
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (ec != std::errc{}) fail(t, "integer literal out of range");
      } else if (c == '"') {
        t.kind = Tok::String;
        t.text = read_string(t);
      } else if (std::string_view("{}()[],:=@").find(c) != std::string_view::npos) {
        t.kind = Tok::Punct;
        t.text = std::string(1, c);
        advance();
      } else {
        fail(t, std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(SourceLocation{file_, t.line, t.column}, msg);
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  // Identifiers may contain `::` scope separators (e.g. `B::foo`); a single
  // colon terminates the identifier so that `L0:` lexes as label + colon.
  std::string read_ident(const Token& t) {
    std::size_t start = pos_;
    if (pos_ >= src_.size() || !ident_start(src_[pos_])) fail(t, "expected identifier");
    for (;;) {
      while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
      if (pos_ + 2 < src_.size() + 0 && src_[pos_] == ':' && src_[pos_ + 1] == ':' && ident_start(src_[pos_ + 2])) {
        advance();
        advance();
        continue;
      }
      break;
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string read_string(const Token& t) {
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') fail(t, "unterminated string literal");
      char c = src_[pos_];
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) fail(t, "unterminated string literal");
        char e = src_[pos_];
        advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default: fail(t, std::string("unknown escape '\\") + e + "'");
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

class Parser {
public:
  Parser(std::vector<Token> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

  Program run() {
    Program p;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (is_word(t, "class")) {
        p.classes.push_back(parse_class());
      } else if (is_word(t, "func")) {
        p.functions.push_back(parse_function());
      } else {
        fail(t, "expected 'class' or 'func', found " + describe(t));
      }
    }
    return p;
  }

private:
  static bool is_word(const Token& t, std::string_view w) { return t.kind == Tok::Ident && t.text == w; }
  static bool is_punct(const Token& t, char c) { return t.kind == Tok::Punct && t.text.size() == 1 && t.text[0] == c; }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Value: return "'%" + t.text + "'";
      case Tok::FuncRef: return "'@" + t.text + "'";
      case Tok::String: return "string literal";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(SourceLocation{file_, t.line, t.column}, msg);
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  void expect_punct(char c) {
    const Token& t = peek();
    if (!is_punct(t, c)) fail(t, std::string("expected '") + c + "', found " + describe(t));
    next();
  }
  void expect_word(std::string_view w) {
    const Token& t = peek();
    if (!is_word(t, w)) fail(t, "expected '" + std::string(w) + "', found " + describe(t));
    next();
  }
  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind) fail(t, std::string("expected ") + what + ", found " + describe(t));
    return next();
  }

  ClassDecl parse_class() {
    const Token& kw = next();
    ClassDecl c;
    c.line = kw.line;
    c.name = expect(Tok::Ident, "class name").text;
    if (is_punct(peek(), ':')) {
      next();
      c.parent = expect(Tok::Ident, "parent class name").text;
    }
    expect_punct('{');
    std::set<std::int64_t> offsets;
    std::set<std::string> names;
    while (is_word(peek(), "field")) {
      next();
      const Token& name = expect(Tok::Ident, "field name");
      expect_punct('@');
      const Token& off = expect(Tok::Int, "field offset");
      if (off.number < 0) fail(off, "field offset must be non-negative");
      if (!offsets.insert(off.number).second) fail(off, "duplicate field offset " + off.text + " in class " + c.name);
      if (!names.insert(name.text).second) fail(name, "duplicate field '" + name.text + "' in class " + c.name);
      c.fields.push_back(Field{name.text, off.number});
    }
    if (is_word(peek(), "vtable")) {
      next();
      expect_punct('{');
      if (is_punct(peek(), '}')) fail(peek(), "vtable must declare at least one slot");
      while (!is_punct(peek(), '}')) {
        const Token& slot = expect(Tok::Int, "vtable slot");
        if (slot.number < 0) fail(slot, "vtable slot must be non-negative");
        expect_punct(':');
        const Token& fn = expect(Tok::Ident, "function name");
        if (!c.vtable.emplace(slot.number, fn.text).second) fail(slot, "duplicate vtable slot " + slot.text);
      }
      expect_punct('}');
    }
    expect_punct('}');
    return c;
  }

  ValueId intern(Function& f, const std::string& name) {
    auto [it, inserted] = values_.emplace(name, static_cast<ValueId>(f.value_names.size()));
    if (inserted) f.value_names.push_back(name);
    return it->second;
  }

  ValueId value_operand(Function& f) { return intern(f, expect(Tok::Value, "SSA value").text); }


  Function parse_function() {
    const Token& kw = next();
    Function f;
    f.line = kw.line;
    values_.clear();
    labels_.clear();
    fixups_.clear();
    f.name = expect(Tok::Ident, "function name").text;
    expect_punct('(');
    if (!is_punct(peek(), ')')) {
      for (;;) {
        const Token& t = expect(Tok::Value, "parameter");
        f.params.push_back(intern(f, t.text));
        if (is_punct(peek(), ',')) {
          next();
          continue;
        }
        break;
      }
    }
    expect_punct(')');
    for (;;) {
      if (is_word(peek(), "entry")) {
        next();
        f.is_entry = true;
      } else if (is_word(peek(), "event")) {
        next();
        f.is_event = true;
      } else {
        break;
      }
    }
    expect_punct('{');
    if (is_punct(peek(), '}')) fail(peek(), "function '" + f.name + "' has no blocks");

    while (!is_punct(peek(), '}')) {
      const Token& lbl = peek();
      if (lbl.kind != Tok::Ident || !is_punct(peek(1), ':')) fail(lbl, "expected block label, found " + describe(lbl));
      next();
      next();
      if (labels_.count(lbl.text)) fail(lbl, "duplicate label '" + lbl.text + "'");
      BlockId id = static_cast<BlockId>(f.blocks.size());
      labels_.emplace(lbl.text, id);
      f.blocks.push_back(BasicBlock{lbl.text, {}});
      parse_block_body(f, f.blocks.back(), lbl);
    }
    expect_punct('}');

    for (const auto& fx : fixups_) {
      auto it = labels_.find(fx.where.text);
      if (it == labels_.end()) fail(fx.where, "undefined label '" + fx.where.text + "'");
      f.blocks[fx.block].instructions[fx.index].targets[fx.slot] = it->second;
    }
    f.index_definitions();
    return f;
  }

  bool at_block_end() const {
    const Token& t = peek();
    if (is_punct(t, '}')) return true;
    return t.kind == Tok::Ident && is_punct(peek(1), ':');
  }

  void parse_block_body(Function& f, BasicBlock& block, const Token& lbl) {
    bool terminated = false;
    while (!at_block_end()) {
      const Token& start = peek();
      if (start.kind == Tok::End) fail(start, "unexpected end of input inside function '" + f.name + "'");
      if (terminated) fail(start, "instruction after terminator in block '" + block.label + "'");
      current_block_ = static_cast<BlockId>(f.blocks.size() - 1);
      current_index_ = static_cast<std::uint32_t>(block.instructions.size());
      block.instructions.push_back(parse_instruction(f));
      terminated = is_terminator(block.instructions.back().op);
    }
    if (!terminated) fail(lbl, "block '" + block.label + "' does not end in br, jmp or ret");
  }

  // Labels may be referenced before they are declared; all targets are
  // patched once the closing brace of the function is reached.
  void add_target(Instruction& inst, const Token& t) {
    fixups_.push_back(Fixup{current_block_, current_index_, static_cast<std::uint32_t>(inst.targets.size()), t});
    inst.targets.push_back(kNone);
  }

  std::vector<ValueId> arg_list(Function& f) {
    std::vector<ValueId> args;
    expect_punct('(');
    if (!is_punct(peek(), ')')) {
      for (;;) {
        args.push_back(value_operand(f));
        if (is_punct(peek(), ',')) {
          next();
          continue;
        }
        break;
      }
    }
    expect_punct(')');
    return args;
  }

  void parse_call_tail(Function& f, Instruction& inst, const Token& kw) {
    if (kw.text == "call") {
      inst.op = Opcode::Call;
      inst.symbol = expect(Tok::FuncRef, "callee '@name'").text;
      inst.operands = arg_list(f);
    } else if (kw.text == "vcall") {
      inst.op = Opcode::VCall;
      inst.operands.push_back(value_operand(f));
      expect_word("slot");
      const Token& slot = expect(Tok::Int, "vtable slot");
      if (slot.number < 0) fail(slot, "vtable slot must be non-negative");
      inst.imm = slot.number;
      auto args = arg_list(f);
      inst.operands.insert(inst.operands.end(), args.begin(), args.end());
    } else {
      inst.op = Opcode::ICall;
      inst.operands.push_back(value_operand(f));
      auto args = arg_list(f);
      inst.operands.insert(inst.operands.end(), args.begin(), args.end());
    }
  }

  std::int64_t offset_operand() {
    expect_punct('@');
    const Token& off = expect(Tok::Int, "offset");
    if (off.number < 0) fail(off, "offset must be non-negative");
    return off.number;
  }

  Instruction parse_instruction(Function& f) {
    Instruction inst;
    const Token& first = peek();
    inst.line = first.line;

    if (first.kind == Tok::Value) {
      inst.result = intern(f, next().text);
      expect_punct('=');
      const Token& kw = peek();
      if (kw.kind == Tok::Value) {
        inst.op = Opcode::Copy;
        inst.operands.push_back(value_operand(f));
        return inst;
      }
      if (kw.kind != Tok::Ident) fail(kw, "expected instruction, found " + describe(kw));
      next();
      if (kw.text == "phi") {
        inst.op = Opcode::Phi;
        for (;;) {
          expect_punct('[');
          inst.operands.push_back(value_operand(f));
          expect_punct(',');
          add_target(inst, expect(Tok::Ident, "incoming label"));
          expect_punct(']');
          if (is_punct(peek(), ',')) {
            next();
            continue;
          }
          break;
        }
      } else if (kw.text == "new") {
        inst.op = Opcode::New;
        inst.symbol = expect(Tok::Ident, "class name").text;
      } else if (kw.text == "const") {
        if (is_word(peek(), "str")) {
          next();
          inst.op = Opcode::ConstStr;
          inst.symbol = expect(Tok::String, "string literal").text;
        } else {
          inst.op = Opcode::Const;
          inst.imm = expect(Tok::Int, "integer").number;
        }
      } else if (kw.text == "binop") {
        inst.op = Opcode::Binop;
        inst.operands.push_back(value_operand(f));
        expect_punct(',');
        inst.operands.push_back(value_operand(f));
      } else if (kw.text == "load") {
        inst.op = Opcode::Load;
        inst.operands.push_back(value_operand(f));
        inst.imm = offset_operand();
      } else if (kw.text == "loadidx") {
        inst.op = Opcode::LoadIdx;
        inst.operands.push_back(value_operand(f));
        expect_punct(',');
        inst.operands.push_back(value_operand(f));
      } else if (kw.text == "call" || kw.text == "vcall" || kw.text == "icall") {
        parse_call_tail(f, inst, kw);
      } else if (kw.text == "funcaddr") {
        inst.op = Opcode::FuncAddr;
        inst.symbol = expect(Tok::FuncRef, "'@function'").text;
      } else {
        fail(kw, "unknown instruction '" + kw.text + "'");
      }
      return inst;
    }

    if (first.kind != Tok::Ident) fail(first, "expected instruction, found " + describe(first));
    const Token& kw = next();
    if (kw.text == "store") {
      inst.op = Opcode::Store;
      inst.operands.push_back(value_operand(f));
      inst.imm = offset_operand();
      expect_punct(',');
      inst.operands.push_back(value_operand(f));
    } else if (kw.text == "storeidx") {
      inst.op = Opcode::StoreIdx;
      inst.operands.push_back(value_operand(f));
      expect_punct(',');
      inst.operands.push_back(value_operand(f));
      expect_punct(',');
      inst.operands.push_back(value_operand(f));
    } else if (kw.text == "call" || kw.text == "vcall" || kw.text == "icall") {
      parse_call_tail(f, inst, kw);
    } else if (kw.text == "br") {
      inst.op = Opcode::Br;
      inst.operands.push_back(value_operand(f));
      int labels = 0;
      while (is_punct(peek(), ',') && peek(1).kind == Tok::Ident && peek(1).line == kw.line && labels < 2) {
        next();
        add_target(inst, next());
        ++labels;
      }
      if (labels != 2) fail(kw, "br expects 2 target labels, found " + std::to_string(labels));
    } else if (kw.text == "jmp") {
      inst.op = Opcode::Jmp;
      add_target(inst, expect(Tok::Ident, "target label"));
    } else if (kw.text == "ret") {
      inst.op = Opcode::Ret;
      if (peek().kind == Tok::Value) inst.operands.push_back(value_operand(f));
    } else if (kw.text == "phi" || kw.text == "new" || kw.text == "const" || kw.text == "binop" ||
               kw.text == "load" || kw.text == "loadidx" || kw.text == "funcaddr") {
      fail(kw, "'" + kw.text + "' requires a result ('%x = " + kw.text + " ...')");
    } else {
      fail(kw, "unknown instruction '" + kw.text + "'");
    }
    return inst;
  }

  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
  std::unordered_map<std::string, ValueId> values_;
  std::unordered_map<std::string, BlockId> labels_;
  struct Fixup {
    BlockId block;
    std::uint32_t index;
    std::uint32_t slot;
    Token where;
  };
  std::vector<Fixup> fixups_;
  BlockId current_block_ = 0;
  std::uint32_t current_index_ = 0;
};

// Checks cross-declaration references once every unit has been read.
void resolve(Program& p, const std::vector<std::string>& class_files, const std::vector<std::string>& function_files) {
  auto err = [](const std::string& file, std::uint32_t line, const std::string& msg) {
    throw ParseError(SourceLocation{file, line, 1}, msg);
  };
  {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < p.classes.size(); ++i) {
      if (!seen.insert(p.classes[i].name).second)
        err(class_files[i], p.classes[i].line, "duplicate class '" + p.classes[i].name + "'");
    }
  }
  {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < p.functions.size(); ++i) {
      if (!seen.insert(p.functions[i].name).second)
        err(function_files[i], p.functions[i].line, "duplicate function '" + p.functions[i].name + "'");
    }
  }
  p.reindex();
  for (std::size_t i = 0; i < p.classes.size(); ++i) {
    const ClassDecl& c = p.classes[i];
    if (!c.parent.empty() && !p.find_class(c.parent))
      err(class_files[i], c.line, "class '" + c.name + "' names undefined parent '" + c.parent + "'");
    for (const auto& [slot, fn] : c.vtable) {
      if (!p.find_function(fn))
        err(class_files[i], c.line, "vtable slot " + std::to_string(slot) + " of class '" + c.name +
                                        "' references undefined function '" + fn + "'");
    }
  }
  for (std::size_t i = 0; i < p.functions.size(); ++i) {
    const Function& f = p.functions[i];
    for (const auto& b : f.blocks) {
      for (const auto& inst : b.instructions) {
        if (inst.op == Opcode::New && !p.find_class(inst.symbol))
          err(function_files[i], inst.line, "undefined class '" + inst.symbol + "'");
        if (inst.op == Opcode::FuncAddr && !p.find_function(inst.symbol))
          err(function_files[i], inst.line, "funcaddr of undefined function '" + inst.symbol + "'");
      }
    }
  }
}

}  // namespace

Program parse_program(std::string_view text, std::string_view file_name) {
  SourceText src{std::string(file_name), std::string(text)};
  return parse_program(std::span<const SourceText>(&src, 1));
}

Program parse_program(std::span<const SourceText> sources) {
  Program merged;
  std::vector<std::string> class_files;
  std::vector<std::string> function_files;
  for (const auto& src : sources) {
    Lexer lex(src.text, src.name);
    Parser parser(lex.run(), src.name);
    Program unit = parser.run();
    for (auto& c : unit.classes) {
      merged.classes.push_back(std::move(c));
      class_files.push_back(src.name);
    }
    for (auto& f : unit.functions) {
      merged.functions.push_back(std::move(f));
      function_files.push_back(src.name);
    }
  }
  resolve(merged, class_files, function_files);
  return merged;
}

}  // namespace tirsec
