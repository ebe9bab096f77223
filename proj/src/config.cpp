#include "qsync/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace qsync {
namespace {

struct Value {
  enum class Type { number, string, boolean, array };
  Type type = Type::number;
  Real number = 0.0;
  std::string text;
  bool flag = false;
  std::vector<Value> items;
};

struct Entry {
  Value value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;
using Document = std::map<std::string, Section>;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

class ValueParser {
 public:
  ValueParser(std::string_view text, int line, std::string field)
      : text_(text), line_(line), field_(std::move(field)) {}

  Value parse() {
    Value v = parse_value();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line_, field_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Value parse_value() {
    skip_ws();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '[') return parse_array();
    if (c == '"') return parse_string();
    return parse_scalar();
  }

  Value parse_array() {
    Value v;
    v.type = Value::Type::array;
    ++pos_;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      v.items.push_back(parse_value());
      skip_ws();
      if (pos_ >= text_.size()) fail("unterminated array");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      fail("expected ',' or ']' in array");
    }
  }

  Value parse_string() {
    Value v;
    v.type = Value::Type::string;
    const auto end = text_.find('"', pos_ + 1);
    if (end == std::string_view::npos) fail("unterminated string");
    v.text = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return v;
  }

  Value parse_scalar() {
    const auto end = text_.find_first_of(",]", pos_);
    const std::string token = trim(text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_));
    pos_ = end == std::string_view::npos ? text_.size() : end;
    Value v;
    if (token == "true" || token == "false") {
      v.type = Value::Type::boolean;
      v.flag = token == "true";
      return v;
    }
    v.number = parse_number(token);
    return v;
  }

  Real parse_plain(std::string_view s) const {
    Real out = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    if (!s.empty() && *begin == '+') ++begin;
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end) fail("invalid number '" + std::string(s) + "'");
    return out;
  }

  // Accepts plain decimals and the forms pi, k*pi, pi/m, k*pi/m (optionally signed).
  Real parse_number(const std::string& token) const {
    if (token.empty()) fail("missing number");
    const auto at = token.find("pi");
    if (at == std::string::npos) return parse_plain(token);

    std::string head = trim(std::string_view(token).substr(0, at));
    std::string tail = trim(std::string_view(token).substr(at + 2));
    Real scale = 1.0;
    if (head == "-") {
      scale = -1.0;
    } else if (!head.empty() && head != "+") {
      if (head.back() != '*') fail("invalid pi expression '" + token + "'");
      head.pop_back();
      scale = parse_plain(trim(head));
    }
    Real divisor = 1.0;
    if (!tail.empty()) {
      if (tail.front() != '/') fail("invalid pi expression '" + token + "'");
      divisor = parse_plain(trim(std::string_view(tail).substr(1)));
    }
    return scale * std::numbers::pi / divisor;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  std::string field_;
};

Document parse_document(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ConfigError("missing key", line_no);
    if (section.empty()) throw ConfigError("key outside of any section", line_no, key);
    std::string value_text = trim(std::string_view(line).substr(eq + 1));
    const int start_line = line_no;
    // Arrays may continue over several lines until the brackets balance.
    auto depth = [](const std::string& s) {
      int d = 0;
      bool quoted = false;
      for (char c : s) {
        if (c == '"') quoted = !quoted;
        if (!quoted && c == '[') ++d;
        if (!quoted && c == ']') --d;
      }
      return d;
    };
    while (depth(value_text) > 0 && std::getline(in, raw)) {
      ++line_no;
      value_text += " " + trim(strip_comment(raw));
    }
    const std::string field = section + "." + key;
    if (doc[section].count(key)) throw ConfigError("duplicate key", start_line, field);
    doc[section][key] = Entry{ValueParser(value_text, start_line, field).parse(), start_line, false};
  }
  return doc;
}

class Reader {
 public:
  explicit Reader(Document& doc) : doc_(doc) {}

  Entry* find(const std::string& section, const std::string& key) {
    auto s = doc_.find(section);
    if (s == doc_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  Entry& require(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) throw ConfigError("missing required key", 0, section + "." + key);
    return *e;
  }

  static Real number(const Entry& e, const std::string& field) {
    if (e.value.type != Value::Type::number) throw ConfigError("expected a number", e.line, field);
    return e.value.number;
  }

  static std::string string(const Entry& e, const std::string& field) {
    if (e.value.type != Value::Type::string) throw ConfigError("expected a quoted string", e.line, field);
    return e.value.text;
  }

  static bool boolean(const Entry& e, const std::string& field) {
    if (e.value.type != Value::Type::boolean) throw ConfigError("expected true or false", e.line, field);
    return e.value.flag;
  }

  static std::vector<Real> numbers(const Entry& e, const std::string& field) {
    if (e.value.type != Value::Type::array) throw ConfigError("expected an array", e.line, field);
    std::vector<Real> out;
    for (const auto& item : e.value.items) {
      if (item.type != Value::Type::number) throw ConfigError("expected an array of numbers", e.line, field);
      out.push_back(item.number);
    }
    return out;
  }

  static RMatrix matrix(const Entry& e, const std::string& field) {
    if (e.value.type != Value::Type::array || e.value.items.empty())
      throw ConfigError("expected a non-empty array of rows", e.line, field);
    std::vector<std::vector<Real>> rows;
    for (const auto& row : e.value.items) {
      Entry tmp{row, e.line, true};
      rows.push_back(numbers(tmp, field));
    }
    const std::size_t cols = rows.front().size();
    RMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw ConfigError("ragged matrix rows", e.line, field);
      for (std::size_t j = 0; j < cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return m;
  }

  static Index integer(const Entry& e, const std::string& field) {
    const Real v = number(e, field);
    if (v != std::floor(v)) throw ConfigError("expected an integer", e.line, field);
    return static_cast<Index>(v);
  }

  void reject_unused() const {
    for (const auto& [name, section] : doc_)
      for (const auto& [key, entry] : section)
        if (!entry.used) throw ConfigError("unknown key", entry.line, name + "." + key);
  }

 private:
  Document& doc_;
};

const std::vector<std::string> kSections = {"scenario", "system", "initial_state", "time",
                                            "solver",   "fit",    "outputs",       "sweep"};

void rebuild_chain(ScenarioConfig& c) {
  const Real gamma = c.system.gamma_decay.empty() ? 0.0 : c.system.gamma_decay.front();
  const Index n_max = c.system.n_max;
  c.system = chain_spec(c.system.omega, c.system.omega0, c.chain_g, gamma, n_max);
}

// Parses "<prefix><k>" with 1-based k.
std::optional<std::size_t> indexed_field(const std::string& field, const std::string& prefix) {
  if (field.size() <= prefix.size() || field.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  std::size_t k = 0;
  const auto* begin = field.data() + prefix.size();
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(begin, end, k);
  if (res.ec != std::errc() || res.ptr != end || k == 0) return std::nullopt;
  return k - 1;
}

std::string format_array(const std::vector<Real>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_real(v[i]);
  return out + "]";
}

std::string format_matrix(const RMatrix& m) {
  std::string out = "[";
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<Real> row(m.cols());
    for (Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    out += (i ? ", " : "") + format_array(row);
  }
  return out + "]";
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, std::string field)
    : Error([&] {
        std::string s = "config error";
        if (line > 0) s += " (line " + std::to_string(line) + ")";
        if (!field.empty()) s += " [" + field + "]";
        return s + ": " + message;
      }()),
      line_(line),
      field_(std::move(field)) {}

std::string format_real(Real value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void ScenarioConfig::validate() const {
  try {
    system.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what(), 0, "system");
  }
  if (model == ModelKind::chain && chain_g.size() + 1 != system.omega.size())
    throw ConfigError("chain_g must have one entry fewer than omega", 0, "system.chain_g");
  const std::size_t n = static_cast<std::size_t>(system.num_oscillators());
  if (initial_state.kind == InitialState::Kind::coherent && initial_state.alphas.size() != n)
    throw ConfigError("one coherent amplitude per oscillator required", 0, "initial_state.alpha");
  if (initial_state.kind == InitialState::Kind::fock) {
    if (initial_state.levels.size() != n)
      throw ConfigError("one Fock level per oscillator required", 0, "initial_state.fock");
    for (Index lv : initial_state.levels)
      if (lv < 0 || lv > system.n_max) throw ConfigError("Fock level outside truncation", 0, "initial_state.fock");
  }
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive", 0, "time.t_end");
  if (n_points < 2) throw ConfigError("n_points must be >= 2", 0, "time.n_points");
  if (!(solver.rel_tol > 0.0) || !(solver.abs_tol > 0.0)) throw ConfigError("tolerances must be positive", 0, "solver");
  if (solver.max_step < 0.0) throw ConfigError("max_step must be >= 0", 0, "solver.max_step");
  if (solver.positivity_check_stride < 1) throw ConfigError("stride must be >= 1", 0, "solver.positivity_check_stride");
  if (!(window_fraction > 0.0 && window_fraction <= 0.5))
    throw ConfigError("window_fraction must be in (0, 0.5]", 0, "fit.window_fraction");
  if (!(tolerances.frequency_rel > 0 && tolerances.phase > 0 && tolerances.amplitude_rel > 0 &&
        tolerances.amplitude_abs > 0))
    throw ConfigError("fit tolerances must be positive", 0, "fit");
  if (sweep) {
    if (!is_sweep_field(sweep->field)) throw ConfigError("unknown sweep field '" + sweep->field + "'", 0, "sweep.field");
    if (sweep->values.empty()) throw ConfigError("sweep needs at least one value", 0, "sweep.values");
  }
}

ScenarioConfig parse_config(const std::string& text) {
  Document doc = parse_document(text);
  for (const auto& [name, section] : doc)
    if (std::find(kSections.begin(), kSections.end(), name) == kSections.end())
      throw ConfigError("unknown section", section.empty() ? 0 : section.begin()->second.line, name);

  Reader r(doc);
  ScenarioConfig c;
  if (auto* e = r.find("scenario", "name")) c.name = Reader::string(*e, "scenario.name");

  // [system]
  if (auto* e = r.find("system", "model")) {
    const std::string m = Reader::string(*e, "system.model");
    if (m == "general") c.model = ModelKind::general;
    else if (m == "chain") c.model = ModelKind::chain;
    else throw ConfigError("model must be \"general\" or \"chain\"", e->line, "system.model");
  }
  c.system.omega = Reader::numbers(r.require("system", "omega"), "system.omega");
  if (auto* e = r.find("system", "omega0")) c.system.omega0 = Reader::number(*e, "system.omega0");
  if (auto* e = r.find("system", "n_max")) c.system.n_max = Reader::integer(*e, "system.n_max");

  Entry& gamma = r.require("system", "gamma_decay");
  if (c.model == ModelKind::chain) {
    c.chain_g = Reader::numbers(r.require("system", "chain_g"), "system.chain_g");
    if (c.chain_g.size() + 1 != c.system.omega.size())
      throw ConfigError("chain_g must have one entry fewer than omega", 0, "system.chain_g");
    c.system.gamma_decay = {Reader::number(gamma, "system.gamma_decay")};
    rebuild_chain(c);
  } else {
    c.system.couplings = Reader::matrix(r.require("system", "couplings"), "system.couplings");
    if (auto* e = r.find("system", "phases")) c.system.phases = Reader::matrix(*e, "system.phases");
    else c.system.phases = RMatrix::Zero(c.system.couplings.rows(), c.system.couplings.cols());
    if (gamma.value.type == Value::Type::array) c.system.gamma_decay = Reader::numbers(gamma, "system.gamma_decay");
    else c.system.gamma_decay.assign(c.system.couplings.rows(), Reader::number(gamma, "system.gamma_decay"));
  }

  // [initial_state]
  const std::size_t n = c.system.omega.size();
  std::string kind = "coherent";
  if (auto* e = r.find("initial_state", "kind")) kind = Reader::string(*e, "initial_state.kind");
  if (kind == "coherent") {
    c.initial_state.kind = InitialState::Kind::coherent;
    std::vector<Real> re(n, 0.0), im(n, 0.0);
    if (auto* e = r.find("initial_state", "alpha")) re = Reader::numbers(*e, "initial_state.alpha");
    if (auto* e = r.find("initial_state", "alpha_im")) im = Reader::numbers(*e, "initial_state.alpha_im");
    if (re.size() != n || im.size() != n)
      throw ConfigError("one amplitude per oscillator required", 0, "initial_state.alpha");
    for (std::size_t k = 0; k < n; ++k) c.initial_state.alphas.emplace_back(re[k], im[k]);
  } else if (kind == "fock") {
    c.initial_state.kind = InitialState::Kind::fock;
    Entry& e = r.require("initial_state", "fock");
    for (Real v : Reader::numbers(e, "initial_state.fock")) {
      if (v != std::floor(v) || v < 0) throw ConfigError("Fock levels must be non-negative integers", e.line, "initial_state.fock");
      c.initial_state.levels.push_back(static_cast<Index>(v));
    }
  } else {
    throw ConfigError("kind must be \"coherent\" or \"fock\"", 0, "initial_state.kind");
  }
  if (auto* e = r.find("initial_state", "tls")) {
    const std::string t = Reader::string(*e, "initial_state.tls");
    if (t == "minus") c.initial_state.tls = TlsLevel::minus;
    else if (t == "plus") c.initial_state.tls = TlsLevel::plus;
    else throw ConfigError("tls must be \"minus\" or \"plus\"", e->line, "initial_state.tls");
  }

  // [time]
  if (auto* e = r.find("time", "t_end")) c.t_end = Reader::number(*e, "time.t_end");
  if (auto* e = r.find("time", "n_points")) {
    const Index np = Reader::integer(*e, "time.n_points");
    if (np < 2) throw ConfigError("n_points must be >= 2", e->line, "time.n_points");
    c.n_points = static_cast<std::size_t>(np);
  }

  // [solver]
  if (auto* e = r.find("solver", "rel_tol")) c.solver.rel_tol = Reader::number(*e, "solver.rel_tol");
  if (auto* e = r.find("solver", "abs_tol")) c.solver.abs_tol = Reader::number(*e, "solver.abs_tol");
  if (auto* e = r.find("solver", "max_step")) c.solver.max_step = Reader::number(*e, "solver.max_step");
  if (auto* e = r.find("solver", "positivity_check_stride"))
    c.solver.positivity_check_stride = static_cast<int>(Reader::integer(*e, "solver.positivity_check_stride"));

  // [fit]
  if (auto* e = r.find("fit", "window_fraction")) c.window_fraction = Reader::number(*e, "fit.window_fraction");
  if (auto* e = r.find("fit", "frequency_tol")) c.tolerances.frequency_rel = Reader::number(*e, "fit.frequency_tol");
  if (auto* e = r.find("fit", "phase_tol")) c.tolerances.phase = Reader::number(*e, "fit.phase_tol");
  if (auto* e = r.find("fit", "amplitude_tol")) c.tolerances.amplitude_rel = Reader::number(*e, "fit.amplitude_tol");
  if (auto* e = r.find("fit", "amplitude_abs_tol"))
    c.tolerances.amplitude_abs = Reader::number(*e, "fit.amplitude_abs_tol");
  if (auto* e = r.find("fit", "condition_threshold"))
    c.condition_threshold = Reader::number(*e, "fit.condition_threshold");

  // [outputs]
  if (auto* e = r.find("outputs", "csv_path")) c.csv_path = Reader::string(*e, "outputs.csv_path");
  if (auto* e = r.find("outputs", "report_path")) c.report_path = Reader::string(*e, "outputs.report_path");

  // [sweep]
  if (doc.count("sweep")) {
    SweepSettings s;
    s.field = Reader::string(r.require("sweep", "field"), "sweep.field");
    s.values = Reader::numbers(r.require("sweep", "values"), "sweep.values");
    c.sweep = std::move(s);
  }

  r.reject_unused();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "[scenario]\nname = \"" << c.name << "\"\n\n[system]\n";
  os << "model = \"" << (c.model == ModelKind::chain ? "chain" : "general") << "\"\n";
  os << "omega = " << format_array(c.system.omega) << "\n";
  os << "omega0 = " << format_real(c.system.omega0) << "\n";
  if (c.model == ModelKind::chain) {
    os << "chain_g = " << format_array(c.chain_g) << "\n";
    os << "gamma_decay = " << format_real(c.system.gamma_decay.front()) << "\n";
  } else {
    os << "couplings = " << format_matrix(c.system.couplings) << "\n";
    os << "phases = " << format_matrix(c.system.phases) << "\n";
    os << "gamma_decay = " << format_array(c.system.gamma_decay) << "\n";
  }
  os << "n_max = " << c.system.n_max << "\n\n[initial_state]\n";
  if (c.initial_state.kind == InitialState::Kind::coherent) {
    std::vector<Real> re, im;
    for (const auto& a : c.initial_state.alphas) {
      re.push_back(a.real());
      im.push_back(a.imag());
    }
    os << "kind = \"coherent\"\nalpha = " << format_array(re) << "\nalpha_im = " << format_array(im) << "\n";
  } else {
    std::vector<Real> lv(c.initial_state.levels.begin(), c.initial_state.levels.end());
    os << "kind = \"fock\"\nfock = " << format_array(lv) << "\n";
  }
  os << "tls = \"" << (c.initial_state.tls == TlsLevel::plus ? "plus" : "minus") << "\"\n\n";
  os << "[time]\nt_end = " << format_real(c.t_end) << "\nn_points = " << c.n_points << "\n\n";
  os << "[solver]\nrel_tol = " << format_real(c.solver.rel_tol) << "\nabs_tol = " << format_real(c.solver.abs_tol)
     << "\nmax_step = " << format_real(c.solver.max_step)
     << "\npositivity_check_stride = " << c.solver.positivity_check_stride << "\n\n";
  os << "[fit]\nwindow_fraction = " << format_real(c.window_fraction)
     << "\nfrequency_tol = " << format_real(c.tolerances.frequency_rel)
     << "\nphase_tol = " << format_real(c.tolerances.phase)
     << "\namplitude_tol = " << format_real(c.tolerances.amplitude_rel)
     << "\namplitude_abs_tol = " << format_real(c.tolerances.amplitude_abs)
     << "\ncondition_threshold = " << format_real(c.condition_threshold) << "\n\n";
  os << "[outputs]\ncsv_path = \"" << c.csv_path << "\"\nreport_path = \"" << c.report_path << "\"\n";
  if (c.sweep) os << "\n[sweep]\nfield = \"" << c.sweep->field << "\"\nvalues = " << format_array(c.sweep->values) << "\n";
  return os.str();
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  const auto& sa = a.system;
  const auto& sb = b.system;
  const bool system_equal = sa.omega == sb.omega && sa.omega0 == sb.omega0 && sa.couplings == sb.couplings &&
                            sa.phases == sb.phases && sa.gamma_decay == sb.gamma_decay && sa.n_max == sb.n_max;
  const bool init_equal = a.initial_state.kind == b.initial_state.kind &&
                          a.initial_state.alphas == b.initial_state.alphas &&
                          a.initial_state.levels == b.initial_state.levels && a.initial_state.tls == b.initial_state.tls;
  const bool solver_equal = a.solver.rel_tol == b.solver.rel_tol && a.solver.abs_tol == b.solver.abs_tol &&
                            a.solver.max_step == b.solver.max_step &&
                            a.solver.positivity_check_stride == b.solver.positivity_check_stride;
  const bool tol_equal = a.tolerances.frequency_rel == b.tolerances.frequency_rel &&
                         a.tolerances.phase == b.tolerances.phase &&
                         a.tolerances.amplitude_rel == b.tolerances.amplitude_rel &&
                         a.tolerances.amplitude_abs == b.tolerances.amplitude_abs;
  const bool sweep_equal = a.sweep.has_value() == b.sweep.has_value() &&
                           (!a.sweep || (a.sweep->field == b.sweep->field && a.sweep->values == b.sweep->values));
  return a.name == b.name && a.model == b.model && system_equal && a.chain_g == b.chain_g && init_equal &&
         a.t_end == b.t_end && a.n_points == b.n_points && solver_equal && a.window_fraction == b.window_fraction &&
         tol_equal && a.condition_threshold == b.condition_threshold && a.csv_path == b.csv_path &&
         a.report_path == b.report_path && sweep_equal;
}

bool is_sweep_field(const std::string& field) {
  if (field == "omega0" || field == "gamma_decay" || field == "n_max") return true;
  return indexed_field(field, "omega").has_value() || indexed_field(field, "g").has_value() ||
         indexed_field(field, "theta").has_value();
}

void apply_sweep_value(ScenarioConfig& c, const std::string& field, Real value) {
  auto& s = c.system;
  auto out_of_range = [&] { throw ConfigError("sweep field index out of range", 0, field); };
  if (field == "omega0") {
    s.omega0 = value;
  } else if (field == "gamma_decay") {
    std::fill(s.gamma_decay.begin(), s.gamma_decay.end(), value);
  } else if (field == "n_max") {
    s.n_max = static_cast<Index>(value);
  } else if (auto k = indexed_field(field, "omega")) {
    if (*k >= s.omega.size()) out_of_range();
    s.omega[*k] = value;
  } else if (auto k = indexed_field(field, "g")) {
    if (c.model == ModelKind::chain) {
      if (*k >= c.chain_g.size()) out_of_range();
      c.chain_g[*k] = value;
    } else {
      if (static_cast<Index>(*k) >= s.couplings.cols()) out_of_range();
      s.couplings(0, static_cast<Index>(*k)) = value;
    }
  } else if (auto k = indexed_field(field, "theta")) {
    if (c.model == ModelKind::chain) throw ConfigError("chain phases are fixed", 0, field);
    if (static_cast<Index>(*k) >= s.phases.cols()) out_of_range();
    s.phases(0, static_cast<Index>(*k)) = value;
  } else {
    throw ConfigError("unknown sweep field", 0, field);
  }
  if (c.model == ModelKind::chain) rebuild_chain(c);
  c.validate();
}

}  // namespace qsync
