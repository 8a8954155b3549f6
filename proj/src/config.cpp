#include "reachlab/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <variant>

namespace reachlab {

ConfigError::ConfigError(std::size_t line, const std::string& field, const std::string& message)
    : Error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
            (field.empty() ? std::string() : "field '" + field + "': ") + message),
      line_(line),
      field_(field) {}

namespace {

struct Value;
using Array = std::vector<Value>;

// Keys keep insertion order for deterministic diagnostics.
struct Table {
  std::vector<std::pair<std::string, std::shared_ptr<Value>>> entries;

  const Value* find(const std::string& key) const {
    for (const auto& [k, v] : entries) {
      if (k == key) return v.get();
    }
    return nullptr;
  }
};

struct Number {
  std::string text;
  double value = 0.0;
};

struct Value {
  std::variant<Number, std::string, bool, Array, Table> data;
  std::size_t line = 0;
};

const char* type_name(const Value& v) {
  switch (v.data.index()) {
    case 0: return "number";
    case 1: return "string";
    case 2: return "boolean";
    case 3: return "array";
    default: return "table";
  }
}

class DocumentParser {
 public:
  explicit DocumentParser(const std::string& text) : text_(text) {}

  Table parse() {
    Table root;
    Table* current = &root;
    std::string section_name;
    std::set<std::string> sections;
    for (;;) {
      skip_blank_lines();
      if (pos_ >= text_.size()) break;
      if (text_[pos_] == '[') {
        ++pos_;
        skip_inline_ws();
        const std::string name = parse_key("section name");
        skip_inline_ws();
        expect(']', "expected ']' after section name");
        end_of_line();
        if (!sections.insert(name).second || root.find(name) != nullptr) {
          throw ConfigError(line_, name, "duplicate key '" + name + "'");
        }
        auto value = std::make_shared<Value>();
        value->data = Table{};
        value->line = line_;
        root.entries.emplace_back(name, value);
        current = &std::get<Table>(value->data);
        section_name = name;
        continue;
      }
      const std::size_t key_line = line_;
      const std::string key = parse_key("key");
      skip_inline_ws();
      expect('=', "expected '=' after key '" + key + "'");
      skip_inline_ws();
      auto value = std::make_shared<Value>(parse_value());
      value->line = key_line;
      end_of_line();
      const std::string full = section_name.empty() ? key : section_name + "." + key;
      if (current->find(key) != nullptr) throw ConfigError(key_line, full, "duplicate key '" + full + "'");
      current->entries.emplace_back(key, value);
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(line_, "", msg); }

  void expect(char c, const std::string& msg) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(msg);
    ++pos_;
  }

  void skip_inline_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }

  void skip_comment() {
    if (pos_ < text_.size() && text_[pos_] == '#') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }
  }

  // Whitespace, comments and newlines (used inside arrays and between entries).
  void skip_blank_lines() {
    for (;;) {
      skip_inline_ws();
      skip_comment();
      if (pos_ < text_.size() && text_[pos_] == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (pos_ < text_.size()) {
      if (text_[pos_] != '\n') fail("unexpected text after value");
      ++pos_;
      ++line_;
    }
  }

  std::string parse_key(const char* what) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail(std::string("expected a ") + what);
    return text_.substr(start, pos_ - start);
  }

  Value parse_value() {
    Value v;
    v.line = line_;
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];
    if (c == '"') {
      v.data = parse_string();
    } else if (c == '[') {
      v.data = parse_array();
    } else if (c == '{') {
      v.data = parse_inline_table();
    } else if (text_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      v.data = true;
    } else if (text_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      v.data = false;
    } else {
      v.data = parse_number();
    }
    return v;
  }

  std::string parse_string() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\n') fail("unterminated string");
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unknown escape '\\") + e + "'");
        }
      }
      out.push_back(c);
    }
    expect('"', "unterminated string");
    return out;
  }

  Number parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '.' || text_[pos_] == '+' || text_[pos_] == '-' ||
                                   text_[pos_] == '_')) {
      ++pos_;
    }
    Number n;
    n.text = text_.substr(start, pos_ - start);
    std::string digits;
    for (char ch : n.text) {
      if (ch != '_') digits.push_back(ch);
    }
    const char* first = digits.data();
    if (!digits.empty() && digits[0] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), n.value);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || !std::isfinite(n.value)) {
      fail("invalid value '" + n.text + "'");
    }
    return n;
  }

  Array parse_array() {
    ++pos_;
    Array out;
    for (;;) {
      skip_blank_lines();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return out;
      }
      out.push_back(parse_value());
      skip_blank_lines();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      skip_blank_lines();
      expect(']', "expected ',' or ']' in array");
      return out;
    }
  }

  Table parse_inline_table() {
    ++pos_;
    Table out;
    skip_blank_lines();
    if (pos_ < text_.size() && text_[pos_] == '}') {
      ++pos_;
      return out;
    }
    for (;;) {
      skip_blank_lines();
      const std::size_t key_line = line_;
      const std::string key = parse_key("key");
      skip_inline_ws();
      expect('=', "expected '=' after key '" + key + "'");
      skip_inline_ws();
      auto value = std::make_shared<Value>(parse_value());
      value->line = key_line;
      if (out.find(key) != nullptr) throw ConfigError(key_line, key, "duplicate key '" + key + "'");
      out.entries.emplace_back(key, value);
      skip_blank_lines();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      expect('}', "expected ',' or '}' in inline table");
      return out;
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

// Typed accessors that report the dotted field path on failure.
class Reader {
 public:
  Reader(const Table& table, std::string prefix, std::size_t line)
      : table_(table), prefix_(std::move(prefix)), line_(line) {}

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  const Value* get(const std::string& key) {
    seen_.insert(key);
    return table_.find(key);
  }

  [[noreturn]] void type_error(const std::string& key, const Value& v, const char* want) const {
    throw ConfigError(v.line, path(key), std::string("expected ") + want + ", got " + type_name(v));
  }

  const Value& require(const std::string& key) {
    const Value* v = get(key);
    if (!v) throw ConfigError(line_, path(key), "missing required key");
    return *v;
  }

  double number(const Value& v, const std::string& key) const {
    if (const auto* n = std::get_if<Number>(&v.data)) return n->value;
    type_error(key, v, "a number");
  }

  long long integer(const Value& v, const std::string& key) const {
    const double d = number(v, key);
    if (std::trunc(d) != d || std::fabs(d) > 9.0e15) throw ConfigError(v.line, path(key), "expected an integer");
    return static_cast<long long>(d);
  }

  std::uint64_t unsigned64(const Value& v, const std::string& key) const {
    const auto* n = std::get_if<Number>(&v.data);
    if (!n) type_error(key, v, "an unsigned integer");
    std::uint64_t out = 0;
    std::string digits;
    for (char c : n->text) {
      if (c != '_') digits.push_back(c);
    }
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw ConfigError(v.line, path(key), "expected an unsigned integer");
    }
    return out;
  }

  std::string string(const Value& v, const std::string& key) const {
    if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
    type_error(key, v, "a string");
  }

  bool boolean(const Value& v, const std::string& key) const {
    if (const auto* b = std::get_if<bool>(&v.data)) return *b;
    type_error(key, v, "a boolean");
  }

  const Array& array(const Value& v, const std::string& key) const {
    if (const auto* a = std::get_if<Array>(&v.data)) return *a;
    type_error(key, v, "an array");
  }

  Vector numbers(const Value& v, const std::string& key) const {
    Vector out;
    for (const auto& item : array(v, key)) out.push_back(number(item, key));
    return out;
  }

  std::vector<std::string> strings(const Value& v, const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& item : array(v, key)) out.push_back(string(item, key));
    return out;
  }

  const Table& table(const Value& v, const std::string& key) const {
    if (const auto* t = std::get_if<Table>(&v.data)) return *t;
    type_error(key, v, "a table");
  }

  // Every key not consumed by the schema is a typo.
  void reject_unknown() const {
    for (const auto& [k, v] : table_.entries) {
      if (!seen_.count(k)) throw ConfigError(v->line, path(k), "unknown key '" + path(k) + "'");
    }
  }

 private:
  const Table& table_;
  std::string prefix_;
  std::size_t line_;
  std::set<std::string> seen_;
};

OmegaSet read_omega(const Table& table, const std::string& prefix, std::size_t line) {
  Reader r(table, prefix, line);
  const std::string kind = r.string(r.require("kind"), "kind");
  try {
    if (kind == "box") {
      Vector lower = r.numbers(r.require("lower"), "lower");
      Vector upper = r.numbers(r.require("upper"), "upper");
      r.reject_unknown();
      return OmegaSet::box(std::move(lower), std::move(upper));
    }
    if (kind == "ball") {
      Vector center = r.numbers(r.require("center"), "center");
      const double radius = r.number(r.require("radius"), "radius");
      r.reject_unknown();
      return OmegaSet::ball(std::move(center), radius);
    }
    if (kind == "hull") {
      const Value& verts = r.require("vertices");
      std::vector<Vector> vertices;
      for (const auto& item : r.array(verts, "vertices")) vertices.push_back(r.numbers(item, "vertices"));
      r.reject_unknown();
      return OmegaSet::hull(std::move(vertices));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(line, prefix, e.what());
  }
  throw ConfigError(line, prefix + ".kind", "unknown omega kind '" + kind + "' (box, ball, hull)");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  Table root;
  try {
    root = DocumentParser(text).parse();
  } catch (const ConfigError& e) {
    throw ConfigError(e.line(), e.field(), origin + ": " + std::string(e.what()));
  }
  ExperimentConfig cfg;
  cfg.name = origin;
  Reader top(root, "", 0);

  if (const Value* v = top.get("name")) cfg.name = top.string(*v, "name");
  if (const Value* v = top.get("out")) cfg.output_dir = top.string(*v, "out");
  if (const Value* v = top.get("t")) {
    cfg.t = top.number(*v, "t");
    if (!(cfg.t > 0.0)) throw ConfigError(v->line, "t", "horizon must be positive");
  }

  // system
  const Value* sys_value = top.get("system");
  if (!sys_value) throw ConfigError(0, "system", "system block required");
  {
    Reader r(top.table(*sys_value, "system"), "system", sys_value->line);
    const long long n = r.integer(r.require("n"), "n");
    const long long m = r.integer(r.require("m"), "m");
    if (n < 1) throw ConfigError(sys_value->line, "system.n", "must be a positive integer");
    if (m < 1) throw ConfigError(sys_value->line, "system.m", "must be a positive integer");
    cfg.system_source.n = static_cast<std::size_t>(n);
    cfg.system_source.m = static_cast<std::size_t>(m);
    const Value& drift = r.require("drift");
    cfg.system_source.drift = r.strings(drift, "drift");
    if (cfg.system_source.drift.size() != cfg.system_source.n) {
      throw ConfigError(drift.line, "system.drift",
                        "has " + std::to_string(cfg.system_source.drift.size()) +
                            " components but n = " + std::to_string(n));
    }
    for (long long i = 1; i <= m; ++i) {
      const std::string key = "f" + std::to_string(i);
      const Value* f = r.get(key);
      if (!f) {
        throw ConfigError(sys_value->line, "system." + key,
                          "controlled field missing (m = " + std::to_string(m) + " requires f1..f" +
                              std::to_string(m) + ")");
      }
      auto comps = r.strings(*f, key);
      if (comps.size() != cfg.system_source.n) {
        throw ConfigError(f->line, "system." + key,
                          "has " + std::to_string(comps.size()) + " components but n = " + std::to_string(n));
      }
      cfg.system_source.controlled.push_back(std::move(comps));
    }
    r.reject_unknown();

    const auto names = state_variable_names(cfg.system_source.n);
    auto check_expr = [&](const std::string& src, const std::string& field, std::size_t line) {
      try {
        (void)Expr::parse(src, names);
      } catch (const ExprError& e) {
        throw ConfigError(line, field, e.what());
      }
    };
    for (std::size_t j = 0; j < cfg.system_source.n; ++j) {
      check_expr(cfg.system_source.drift[j], "system.drift[" + std::to_string(j) + "]", drift.line);
      for (std::size_t i = 0; i < cfg.system_source.m; ++i) {
        check_expr(cfg.system_source.controlled[i][j],
                   "system.f" + std::to_string(i + 1) + "[" + std::to_string(j) + "]",
                   root.find("system") ? sys_value->line : 0);
      }
    }
    cfg.system.emplace(cfg.system_source.n, cfg.system_source.m, cfg.system_source.drift,
                       cfg.system_source.controlled);
  }

  // omega
  const Value* omega_value = top.get("omega");
  if (!omega_value) throw ConfigError(0, "omega", "omega block required");
  cfg.omega = read_omega(top.table(*omega_value, "omega"), "omega", omega_value->line);
  if (cfg.omega->dim() != cfg.system_source.m) {
    throw ConfigError(omega_value->line, "omega",
                      "lives in R^" + std::to_string(cfg.omega->dim()) + " but system.m = " +
                          std::to_string(cfg.system_source.m));
  }

  // initial state
  cfg.x0.assign(cfg.system_source.n, 0.0);
  if (const Value* v = top.get("x0")) {
    cfg.x0 = top.numbers(*v, "x0");
    if (cfg.x0.size() != cfg.system_source.n) {
      throw ConfigError(v->line, "x0",
                        "has " + std::to_string(cfg.x0.size()) + " components but n = " +
                            std::to_string(cfg.system_source.n));
    }
  }

  // spec
  if (const Value* spec_value = top.get("spec")) {
    Reader r(top.table(*spec_value, "spec"), "spec", spec_value->line);
    auto positive_int = [&](const char* key, int& out) {
      if (const Value* v = r.get(key)) {
        const long long x = r.integer(*v, key);
        if (x < 1 || x > 1'000'000) throw ConfigError(v->line, r.path(key), "must be a positive integer");
        out = static_cast<int>(x);
      }
    };
    positive_int("N", cfg.spec.switches);
    positive_int("k", cfg.spec.value_resolution);
    if (const Value* v = r.get("h")) {
      cfg.spec.step = r.number(*v, "h");
      if (!(cfg.spec.step > 0.0)) throw ConfigError(v->line, "spec.h", "must be positive");
    }
    if (const Value* v = r.get("r")) {
      cfg.spec.resolution = r.number(*v, "r");
      if (!(cfg.spec.resolution >= 0.0)) throw ConfigError(v->line, "spec.r", "must be nonnegative");
    }
    if (const Value* v = r.get("mode")) {
      const std::string mode = r.string(*v, "mode");
      if (mode == "exhaustive") {
        cfg.spec.mode = SamplingMode::Exhaustive;
      } else if (mode == "random") {
        cfg.spec.mode = SamplingMode::Random;
      } else {
        throw ConfigError(v->line, "spec.mode", "expected \"exhaustive\" or \"random\"");
      }
    }
    if (const Value* v = r.get("seed")) cfg.spec.seed = r.unsigned64(*v, "seed");
    if (const Value* v = r.get("samples")) cfg.spec.samples = r.unsigned64(*v, "samples");
    if (const Value* v = r.get("budget")) cfg.spec.budget = r.unsigned64(*v, "budget");
    r.reject_unknown();
  }

  // experiment
  if (const Value* exp_value = top.get("experiment")) {
    Reader r(top.table(*exp_value, "experiment"), "experiment", exp_value->line);
    auto& e = cfg.experiment;
    if (const Value* v = r.get("deltas")) {
      e.deltas = r.numbers(*v, "deltas");
      if (e.deltas.empty()) throw ConfigError(v->line, "experiment.deltas", "must not be empty");
      for (double d : e.deltas) {
        if (!(d >= 0.0)) throw ConfigError(v->line, "experiment.deltas", "entries must be >= 0");
      }
    }
    if (const Value* v = r.get("probes")) {
      const long long p = r.integer(*v, "probes");
      if (p < 1) throw ConfigError(v->line, "experiment.probes", "must be positive");
      e.probes = static_cast<int>(p);
    }
    if (const Value* v = r.get("functional")) {
      e.functional = r.string(*v, "functional");
      try {
        (void)Expr::parse(e.functional, state_variable_names(cfg.system_source.n));
      } catch (const ExprError& err) {
        throw ConfigError(v->line, "experiment.functional", err.what());
      }
    }
    if (const Value* v = r.get("dictionary_depth")) {
      const long long d = r.integer(*v, "dictionary_depth");
      if (d < 0 || d > 20) throw ConfigError(v->line, "experiment.dictionary_depth", "must be in 0..20");
      e.dictionary_depth = static_cast<int>(d);
    }
    if (const Value* v = r.get("levels")) {
      const long long l = r.integer(*v, "levels");
      if (l < 1) throw ConfigError(v->line, "experiment.levels", "must be positive");
      e.levels = static_cast<int>(l);
    }
    if (const Value* v = r.get("square_waves")) {
      e.square_waves.clear();
      for (const auto& item : r.array(*v, "square_waves")) {
        const long long k = r.integer(item, "square_waves");
        if (k < 1) throw ConfigError(v->line, "experiment.square_waves", "entries must be positive");
        e.square_waves.push_back(static_cast<int>(k));
      }
      if (e.square_waves.empty()) throw ConfigError(v->line, "experiment.square_waves", "must not be empty");
    }
    if (const Value* v = r.get("amplitude")) e.amplitude = r.number(*v, "amplitude");
    if (const Value* v = r.get("dump_clouds")) e.dump_clouds = r.boolean(*v, "dump_clouds");
    if (const Value* v = r.get("omega_b")) {
      e.omega_b = read_omega(r.table(*v, "omega_b"), "experiment.omega_b", v->line);
      if (e.omega_b->dim() != cfg.system_source.m) {
        throw ConfigError(v->line, "experiment.omega_b", "dimension differs from system.m");
      }
    }
    r.reject_unknown();
  }

  top.reject_unknown();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    const auto& demos = builtin_demos();
    if (auto it = demos.find(path); it != demos.end()) return parse_config(it->second, path);
    throw ConfigError(0, "", "cannot open config '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string config_schema_help() {
  return R"(Config document (TOML subset):

  name = "label"                   # optional, defaults to the file name
  t    = 1.0                       # horizon, default 1.0
  x0   = [0.0, ...]                # initial state, default zero vector
  out  = "out"                     # output directory, default "out"
  omega = { kind = "box", lower = [...], upper = [...] }   # required
        # or { kind = "ball", center = [...], radius = r }
        # or { kind = "hull", vertices = [[...], ...] }
        # ([omega] section syntax is accepted too)

  [system]                         # required
  n = 2                            # state dimension
  m = 1                            # control dimension
  drift = ["x1", "-x0"]            # f0, n expressions in x0..x{n-1}
  f1 = ["0", "1"]                  # f1..fm, n expressions each

  [spec]
  N = 4              # control pieces on [0, t]
  k = 2              # omega-net resolution
  h = 0.01           # RK4 step
  r = 0.005          # cloud dedup resolution (0 = exact duplicates only)
  mode = "exhaustive"  # or "random"
  seed = 1
  samples = 100000   # random mode
  budget = 2000000   # max trajectories

  [experiment]
  deltas = [0.4, 0.2, 0.1, 0.05]
  probes = 4                 # sweep-state probe directions
  functional = "x0"          # optimize
  dictionary_depth = 4       # weakstar dyadic test functions
  levels = 3                 # converge: number of refinement gaps
  square_waves = [4, 8, 16, 32]
  amplitude = 1.0            # weakstar square-wave amplitude
  dump_clouds = false        # sweeps: also write per-row cloud CSVs
  omega_b = { ... }          # hausdorff: second control range
)";
}

}  // namespace reachlab
