#include "hybrid_aoi/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace hybrid_aoi {

namespace {

constexpr int kTermsPerLine = 6;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string bound_value(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  return number(v);
}

void write_terms(std::ostream& out, const LinearModel& model,
                 const std::vector<Term>& terms) {
  int on_line = 0;
  for (const Term& t : terms) {
    if (on_line == kTermsPerLine) {
      out << "\n   ";
      on_line = 0;
    }
    out << (std::signbit(t.coef) ? " - " : " + ") << number(std::abs(t.coef))
        << " " << model.variables()[t.var].name;
    ++on_line;
  }
}

const char* sense_text(Sense sense) {
  switch (sense) {
    case Sense::kLessEqual:
      return "<=";
    case Sense::kGreaterEqual:
      return ">=";
    case Sense::kEqual:
      return "=";
  }
  return "=";
}

}  // namespace

void write_lp(const LinearModel& model, std::ostream& out) {
  out << "\\ hybrid RF/OC transmission scheduling model\n";
  out << "\\ variables: " << model.variables().size()
      << ", constraints: " << model.rows().size() << "\n";
  out << "Minimize\n obj:";
  write_terms(out, model, model.objective());
  if (model.objective_constant() != 0.0 || model.objective().empty()) {
    const double c = model.objective_constant();
    out << (std::signbit(c) ? " - " : " + ") << number(std::abs(c));
  }
  out << "\nSubject To\n";
  for (const Row& row : model.rows()) {
    out << " " << row.name << ":";
    write_terms(out, model, row.terms);
    out << " " << sense_text(row.sense) << " " << number(row.rhs) << "\n";
  }

  out << "Bounds\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kBinary) continue;
    if (v.lower == -kInf && v.upper == kInf) {
      out << " " << v.name << " free\n";
    } else if (v.upper == kInf) {
      out << " " << v.name << " >= " << bound_value(v.lower) << "\n";
    } else {
      out << " " << bound_value(v.lower) << " <= " << v.name
          << " <= " << bound_value(v.upper) << "\n";
    }
  }
  auto write_names = [&](const char* header, VarKind kind) {
    std::vector<const Variable*> selected;
    for (const Variable& v : model.variables()) {
      if (v.kind == kind) selected.push_back(&v);
    }
    if (selected.empty()) return;
    out << header << "\n";
    for (std::size_t p = 0; p < selected.size(); ++p) {
      out << (p % 8 == 0 ? " " : " ") << selected[p]->name;
      if (p % 8 == 7 || p + 1 == selected.size()) out << "\n";
    }
  };
  write_names("Binaries", VarKind::kBinary);
  write_names("Generals", VarKind::kInteger);
  out << "End\n";
}

void export_lp(const LinearModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_lp(model, out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

enum class TokenKind { kName, kNumber, kSense, kColon, kPlus, kMinus };

struct Token {
  TokenKind kind;
  std::string text;
  double value = 0.0;
  Sense sense = Sense::kLessEqual;
  int line = 0;
  bool line_start = false;
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) ||
         std::string_view("_.[]{}!\"#$%&()/,;?@'`|~").find(c) !=
             std::string_view::npos;
}

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto cut = line.find('\\'); cut != std::string::npos) line.resize(cut);
    bool first = true;
    std::size_t p = 0;
    while (p < line.size()) {
      const char c = line[p];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++p;
        continue;
      }
      Token t;
      t.line = line_no;
      t.line_start = first;
      first = false;
      if (c == '<' || c == '>' || c == '=') {
        std::size_t q = p + 1;
        if (q < line.size() && (line[q] == '=' || line[q] == '<' ||
                                line[q] == '>')) {
          ++q;
        }
        const std::string op = line.substr(p, q - p);
        t.kind = TokenKind::kSense;
        t.text = op;
        if (op == "<" || op == "<=" || op == "=<") {
          t.sense = Sense::kLessEqual;
        } else if (op == ">" || op == ">=" || op == "=>") {
          t.sense = Sense::kGreaterEqual;
        } else if (op == "=") {
          t.sense = Sense::kEqual;
        } else {
          throw LpParseError(line_no, "bad operator '" + op + "'");
        }
        p = q;
      } else if (c == ':') {
        t.kind = TokenKind::kColon;
        ++p;
      } else if (c == '+') {
        t.kind = TokenKind::kPlus;
        ++p;
      } else if (c == '-') {
        t.kind = TokenKind::kMinus;
        ++p;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        try {
          t.value = std::stod(line.substr(p), &used);
        } catch (const std::exception&) {
          throw LpParseError(line_no, "bad number");
        }
        t.kind = TokenKind::kNumber;
        p += used;
      } else if (name_char(c)) {
        std::size_t q = p;
        while (q < line.size() && name_char(line[q])) ++q;
        t.kind = TokenKind::kName;
        t.text = line.substr(p, q - p);
        p = q;
      } else {
        throw LpParseError(line_no, std::string("unexpected character '") + c +
                                        "'");
      }
      tokens.push_back(std::move(t));
    }
  }
  return tokens;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_infinity(const Token& t) {
  if (t.kind != TokenKind::kName) return false;
  const std::string l = lower(t.text);
  return l == "inf" || l == "infinity";
}

enum class Section {
  kNone,
  kObjective,
  kConstraints,
  kBounds,
  kBinaries,
  kGenerals,
  kEnd
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  LinearModel parse() {
    while (pos_ < tokens_.size()) {
      const Section section = section_at(pos_);
      if (section == Section::kNone) {
        throw LpParseError(tokens_[pos_].line,
                           "expected a section keyword, got '" +
                               tokens_[pos_].text + "'");
      }
      switch (section) {
        case Section::kObjective:
          parse_objective();
          break;
        case Section::kConstraints:
          parse_constraints();
          break;
        case Section::kBounds:
          parse_bounds();
          break;
        case Section::kBinaries:
          parse_names(VarKind::kBinary);
          break;
        case Section::kGenerals:
          parse_names(VarKind::kInteger);
          break;
        case Section::kEnd:
          pos_ = tokens_.size();
          break;
        case Section::kNone:
          break;
      }
    }
    return build();
  }

 private:
  struct PendingVar {
    std::string name;
    VarKind kind = VarKind::kContinuous;
    double lower = 0.0;
    double upper = kInf;
    bool bounds_set = false;
  };

  // Recognizes a section keyword at token p (only at line starts) and
  // advances pos_ past it.
  Section section_at(std::size_t p) {
    const Token& t = tokens_[p];
    if (t.kind != TokenKind::kName || !t.line_start) return Section::kNone;
    const std::string word = lower(t.text);
    auto next_is = [&](const char* w) {
      return p + 1 < tokens_.size() && tokens_[p + 1].kind == TokenKind::kName &&
             lower(tokens_[p + 1].text) == w;
    };
    if (word == "minimize" || word == "minimise" || word == "minimum" ||
        word == "min") {
      pos_ = p + 1;
      return Section::kObjective;
    }
    if (word == "maximize" || word == "maximise" || word == "max") {
      throw LpParseError(t.line, "only minimization models are supported");
    }
    if (word == "subject" && next_is("to")) {
      pos_ = p + 2;
      return Section::kConstraints;
    }
    if (word == "such" && next_is("that")) {
      pos_ = p + 2;
      return Section::kConstraints;
    }
    if (word == "st" || word == "s.t.") {
      pos_ = p + 1;
      return Section::kConstraints;
    }
    if (word == "bounds" || word == "bound") {
      pos_ = p + 1;
      return Section::kBounds;
    }
    if (word == "binaries" || word == "binary" || word == "bin") {
      pos_ = p + 1;
      return Section::kBinaries;
    }
    if (word == "generals" || word == "general" || word == "gen") {
      pos_ = p + 1;
      return Section::kGenerals;
    }
    if (word == "end") {
      pos_ = p + 1;
      return Section::kEnd;
    }
    return Section::kNone;
  }

  bool at_section() const {
    if (pos_ >= tokens_.size()) return true;
    const Token& t = tokens_[pos_];
    if (t.kind != TokenKind::kName || !t.line_start) return false;
    const std::string w = lower(t.text);
    static const char* kWords[] = {
        "minimize", "minimise", "minimum", "min",     "maximize", "maximise",
        "max",      "st",       "s.t.",    "bounds",  "bound",    "binaries",
        "binary",   "bin",      "generals", "general", "gen",      "end"};
    for (const char* k : kWords) {
      if (w == k) return true;
    }
    auto next_is = [&](const char* word) {
      return pos_ + 1 < tokens_.size() &&
             tokens_[pos_ + 1].kind == TokenKind::kName &&
             lower(tokens_[pos_ + 1].text) == word;
    };
    return (w == "subject" && next_is("to")) || (w == "such" && next_is("that"));
  }

  int variable(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const int id = static_cast<int>(vars_.size());
    vars_.push_back({name});
    index_.emplace(name, id);
    return id;
  }

  bool label_ahead() const {
    return pos_ + 1 < tokens_.size() &&
           tokens_[pos_].kind == TokenKind::kName &&
           tokens_[pos_ + 1].kind == TokenKind::kColon;
  }

  // Parses "[+|-] [coef] [name]" terms until a sense, section, or (when
  // stop_at_label) a new "name:" label.
  void parse_expression(std::vector<Term>& terms, double& constant,
                        bool stop_at_label) {
    while (pos_ < tokens_.size() && !at_section()) {
      if (stop_at_label && label_ahead() && !terms.empty()) return;
      const Token& t = tokens_[pos_];
      if (t.kind == TokenKind::kSense) return;
      double sign = 1.0;
      bool saw_sign = false;
      while (pos_ < tokens_.size() && (tokens_[pos_].kind == TokenKind::kPlus ||
                                       tokens_[pos_].kind == TokenKind::kMinus)) {
        if (tokens_[pos_].kind == TokenKind::kMinus) sign = -sign;
        saw_sign = true;
        ++pos_;
      }
      if (pos_ >= tokens_.size()) throw LpParseError(t.line, "dangling sign");
      double coef = 1.0;
      bool saw_number = false;
      if (tokens_[pos_].kind == TokenKind::kNumber) {
        coef = tokens_[pos_].value;
        saw_number = true;
        ++pos_;
      }
      if (pos_ < tokens_.size() && tokens_[pos_].kind == TokenKind::kName &&
          !at_section() && !(stop_at_label && label_ahead())) {
        terms.push_back({variable(tokens_[pos_].text), sign * coef});
        ++pos_;
      } else if (saw_number) {
        constant += sign * coef;
      } else if (!saw_sign) {
        throw LpParseError(tokens_[pos_].line,
                           "unexpected token '" + tokens_[pos_].text + "'");
      } else {
        throw LpParseError(t.line, "sign without a term");
      }
    }
  }

  void parse_objective() {
    if (label_ahead()) pos_ += 2;
    parse_expression(objective_, objective_constant_, false);
  }

  double signed_number() {
    double sign = 1.0;
    while (pos_ < tokens_.size() && (tokens_[pos_].kind == TokenKind::kPlus ||
                                     tokens_[pos_].kind == TokenKind::kMinus)) {
      if (tokens_[pos_].kind == TokenKind::kMinus) sign = -sign;
      ++pos_;
    }
    if (pos_ >= tokens_.size()) throw LpParseError(0, "missing number");
    const Token& t = tokens_[pos_];
    ++pos_;
    if (t.kind == TokenKind::kNumber) return sign * t.value;
    if (is_infinity(t)) return sign * kInf;
    throw LpParseError(t.line, "expected a number, got '" + t.text + "'");
  }

  void parse_constraints() {
    int unnamed = 0;
    while (pos_ < tokens_.size() && !at_section()) {
      Row row;
      if (label_ahead()) {
        row.name = tokens_[pos_].text;
        pos_ += 2;
      } else {
        row.name = "R" + std::to_string(++unnamed);
      }
      double constant = 0.0;
      parse_expression(row.terms, constant, true);
      if (pos_ >= tokens_.size() || tokens_[pos_].kind != TokenKind::kSense) {
        throw LpParseError(pos_ < tokens_.size() ? tokens_[pos_].line : 0,
                           "constraint " + row.name + " has no sense");
      }
      row.sense = tokens_[pos_].sense;
      ++pos_;
      row.rhs = signed_number() - constant;
      rows_.push_back(std::move(row));
    }
  }

  void apply_bound(int var, Sense sense, double value, bool var_on_left) {
    PendingVar& v = vars_[var];
    v.bounds_set = true;
    if (sense == Sense::kEqual) {
      v.lower = v.upper = value;
      return;
    }
    const bool upper = (sense == Sense::kLessEqual) == var_on_left;
    (upper ? v.upper : v.lower) = value;
  }

  void parse_bounds() {
    while (pos_ < tokens_.size() && !at_section()) {
      const Token& t = tokens_[pos_];
      const bool leading_value = t.kind == TokenKind::kNumber ||
                                 t.kind == TokenKind::kPlus ||
                                 t.kind == TokenKind::kMinus || is_infinity(t);
      if (leading_value) {
        const double value = signed_number();
        if (pos_ + 1 >= tokens_.size() ||
            tokens_[pos_].kind != TokenKind::kSense ||
            tokens_[pos_ + 1].kind != TokenKind::kName) {
          throw LpParseError(t.line, "malformed bound");
        }
        const Sense sense = tokens_[pos_].sense;
        const int var = variable(tokens_[pos_ + 1].text);
        pos_ += 2;
        apply_bound(var, sense, value, false);
        if (pos_ < tokens_.size() && tokens_[pos_].kind == TokenKind::kSense) {
          const Sense second = tokens_[pos_].sense;
          ++pos_;
          apply_bound(var, second, signed_number(), true);
        }
      } else if (t.kind == TokenKind::kName) {
        const int var = variable(t.text);
        ++pos_;
        if (pos_ < tokens_.size() && tokens_[pos_].kind == TokenKind::kName &&
            lower(tokens_[pos_].text) == "free") {
          vars_[var].lower = -kInf;
          vars_[var].upper = kInf;
          vars_[var].bounds_set = true;
          ++pos_;
        } else if (pos_ < tokens_.size() &&
                   tokens_[pos_].kind == TokenKind::kSense) {
          const Sense sense = tokens_[pos_].sense;
          ++pos_;
          apply_bound(var, sense, signed_number(), true);
        } else {
          throw LpParseError(t.line, "malformed bound for " + t.text);
        }
      } else {
        throw LpParseError(t.line, "malformed bound");
      }
    }
  }

  void parse_names(VarKind kind) {
    while (pos_ < tokens_.size() && !at_section()) {
      const Token& t = tokens_[pos_];
      if (t.kind != TokenKind::kName) {
        throw LpParseError(t.line, "expected a variable name");
      }
      PendingVar& v = vars_[variable(t.text)];
      v.kind = kind;
      if (kind == VarKind::kBinary && !v.bounds_set) {
        v.lower = 0.0;
        v.upper = 1.0;
      }
      ++pos_;
    }
  }

  static void recover_role(Variable& v) {
    std::vector<std::string> parts;
    std::stringstream ss(v.name);
    for (std::string part; std::getline(ss, part, '_');) parts.push_back(part);
    auto all_digits = [](const std::string& s) {
      return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      });
    };
    if (parts.size() == 5 && parts[0] == "x" && all_digits(parts[1]) &&
        all_digits(parts[2]) && (parts[3] == "RF" || parts[3] == "OC") &&
        all_digits(parts[4])) {
      v.role = VarRole::kTransmission;
      v.i = std::stoi(parts[1]);
      v.j = std::stoi(parts[2]);
      v.m = index_of(technology_from_name(parts[3]));
      v.k = std::stoi(parts[4]);
    } else if (parts.size() == 3 && all_digits(parts[1]) &&
               all_digits(parts[2]) &&
               (parts[0] == "s" || parts[0] == "z" || parts[0] == "w")) {
      v.role = parts[0] == "s"   ? VarRole::kRegister
               : parts[0] == "z" ? VarRole::kSwitch
                                 : VarRole::kHold;
      v.i = std::stoi(parts[1]);
      v.k = std::stoi(parts[2]);
    }
  }

  LinearModel build() {
    LinearModel model;
    for (const PendingVar& p : vars_) {
      Variable v;
      v.name = p.name;
      v.kind = p.kind;
      v.lower = p.lower;
      v.upper = p.upper;
      recover_role(v);
      model.add_variable(std::move(v));
    }
    for (const Term& t : objective_) model.add_objective_term(t.var, t.coef);
    model.set_objective_constant(objective_constant_);
    for (Row& row : rows_) model.add_row(std::move(row));
    return model;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<PendingVar> vars_;
  std::unordered_map<std::string, int> index_;
  std::vector<Term> objective_;
  double objective_constant_ = 0.0;
  std::vector<Row> rows_;
};

}  // namespace

LinearModel read_lp(std::istream& in) {
  return Parser(tokenize(in)).parse();
}

LinearModel import_lp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_lp(in);
}

}  // namespace hybrid_aoi
