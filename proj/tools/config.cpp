#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace signalflow::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_name(const std::string& s, bool dots) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || (dots && c == '.'))) return false;
  return s.front() != '.' && s.back() != '.';
}

bool plain_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.c_str();
  char* e = nullptr;
  out = std::strtod(b, &e);
  if (e != b + s.size()) return false;
  // strtod accepts nan/inf spellings; only allow those through parse_number
  for (char c : s)
    if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E') return false;
  return true;
}

ConfigValue::Scalar parse_scalar(const std::string& tok) {
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
      if (tok[i] == '\\' && i + 2 < tok.size()) {
        ++i;
        out.push_back(tok[i] == 'n' ? '\n' : tok[i]);
      } else {
        out.push_back(tok[i]);
      }
    }
    return out;
  }
  if (tok == "true") return true;
  if (tok == "false") return false;
  if (tok == "inf" || tok == "+inf") return kInf;
  if (tok == "-inf") return -kInf;
  double v = 0.0;
  if (plain_double(tok, v)) return v;
  throw std::invalid_argument("cannot parse value '" + tok + "'");
}

std::vector<std::string> split_array(const std::string& body) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : body) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw std::invalid_argument("unterminated string in array");
  const std::string last = trim(cur);
  if (!last.empty()) out.push_back(last);
  for (const auto& s : out)
    if (s.empty()) throw std::invalid_argument("empty array element");
  return out;
}

const char* kind_name(const ConfigValue::Scalar& s) {
  if (std::holds_alternative<double>(s)) return "number";
  if (std::holds_alternative<std::string>(s)) return "string";
  return "boolean";
}

double scalar_number(const ConfigValue::Scalar& s, const std::string& key, int line) {
  if (const double* d = std::get_if<double>(&s)) return *d;
  if (const std::string* str = std::get_if<std::string>(&s)) {
    try {
      return parse_number(*str);
    } catch (const std::exception& e) {
      throw ConfigError(key, line, e.what());
    }
  }
  throw ConfigError(key, line, std::string("expected a number, found ") + kind_name(s));
}

}  // namespace

ConfigError::ConfigError(std::string field, int line, const std::string& message)
    : std::runtime_error([&] {
        std::ostringstream os;
        if (line > 0) os << "line " << line << ": ";
        if (!field.empty()) os << field << ": ";
        os << message;
        return os.str();
      }()),
      field_(std::move(field)),
      line_(line) {}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  if (plain_double(s, v)) return v;
  auto ratio = [](const std::string& t) {
    const auto slash = t.find('/');
    double a = 0.0, b = 0.0;
    if (slash == std::string::npos) {
      if (plain_double(trim(t), a)) return a;
      throw std::invalid_argument("cannot parse number '" + t + "'");
    }
    if (!plain_double(trim(t.substr(0, slash)), a) || !plain_double(trim(t.substr(slash + 1)), b))
      throw std::invalid_argument("cannot parse ratio '" + t + "'");
    if (b == 0.0) throw std::invalid_argument("zero denominator in '" + t + "'");
    return a / b;
  };
  if (s.size() > 4 && s.compare(0, 3, "ln(") == 0 && s.back() == ')') {
    const double x = ratio(s.substr(3, s.size() - 4));
    if (!(x > 0.0)) throw std::invalid_argument("ln of a non-positive number in '" + s + "'");
    return std::log(x);
  }
  if (s.size() > 4 && s.compare(0, 4, "-ln(") == 0 && s.back() == ')') return -parse_number(s.substr(1));
  return ratio(s);
}

Document Document::parse(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string raw_line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_name(section, true)) throw ConfigError("", line_no, "bad section name '" + section + "'");
      if (std::find(doc.sections_.begin(), doc.sections_.end(), section) != doc.sections_.end())
        throw ConfigError(section, line_no, "section defined twice");
      doc.sections_.push_back(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!valid_name(key, false)) throw ConfigError("", line_no, "bad key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (doc.entries_.count(full)) throw ConfigError(full, line_no, "key defined twice");
    if (val.empty()) throw ConfigError(full, line_no, "missing value");
    ConfigValue cv;
    cv.line = line_no;
    cv.raw = val;
    try {
      if (val.front() == '[') {
        if (val.back() != ']') throw std::invalid_argument("unterminated array");
        std::vector<ConfigValue::Scalar> items;
        for (const auto& tok : split_array(val.substr(1, val.size() - 2)))
          items.push_back(parse_scalar(tok));
        cv.data = std::move(items);
      } else {
        cv.data = parse_scalar(val);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(full, line_no, e.what());
    }
    doc.entries_[full] = std::move(cv);
  }
  return doc;
}

bool Document::has_section(const std::string& section) const {
  const std::string prefix = section + ".";
  for (const auto& [k, v] : entries_)
    if (k.compare(0, prefix.size(), prefix) == 0) return true;
  return std::find(sections_.begin(), sections_.end(), section) != sections_.end();
}

const ConfigValue& Document::at(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key, 0, "required field missing");
  return it->second;
}

int Document::line_of(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

void Document::set(const std::string& key, const std::string& raw_value) {
  const int line = line_of(key);
  const std::string section = key.find('.') == std::string::npos ? "" : key.substr(0, key.rfind('.'));
  const std::string name = key.substr(key.rfind('.') + 1);
  Document one = parse((section.empty() ? "" : "[" + section + "]\n") + name + " = " + raw_value + "\n");
  ConfigValue v = one.entries_.begin()->second;
  v.line = line;
  entries_[key] = std::move(v);
}

double Document::number(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (const auto* s = std::get_if<ConfigValue::Scalar>(&v.data)) return scalar_number(*s, key, v.line);
  throw ConfigError(key, v.line, "expected a number, found an array");
}

double Document::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string Document::string_or(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const ConfigValue& v = at(key);
  if (const auto* s = std::get_if<ConfigValue::Scalar>(&v.data))
    if (const auto* str = std::get_if<std::string>(s)) return *str;
  throw ConfigError(key, v.line, "expected a string");
}

bool Document::bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const ConfigValue& v = at(key);
  if (const auto* s = std::get_if<ConfigValue::Scalar>(&v.data))
    if (const auto* b = std::get_if<bool>(s)) return *b;
  throw ConfigError(key, v.line, "expected true or false");
}

std::vector<double> Document::numbers(const std::string& key) const {
  const ConfigValue& v = at(key);
  std::vector<double> out;
  if (const auto* s = std::get_if<ConfigValue::Scalar>(&v.data)) {
    out.push_back(scalar_number(*s, key, v.line));
  } else {
    for (const auto& x : std::get<std::vector<ConfigValue::Scalar>>(v.data))
      out.push_back(scalar_number(x, key, v.line));
  }
  return out;
}

namespace {

double from_mu(double mu, const std::string& key, int line) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError(key, line, "belief must lie in [0,1]");
  return LogOdds::from_belief(mu).value();
}

}  // namespace

std::optional<double> Document::log_odds(const std::string& section, const std::string& name) const {
  const std::string lk = section + ".l_" + name;
  const std::string mk = section + ".mu_" + name;
  if (has(lk) && has(mk)) throw ConfigError(mk, line_of(mk), "give either l_" + name + " or mu_" + name);
  if (has(lk)) {
    const double v = number(lk);
    if (std::isnan(v)) throw ConfigError(lk, line_of(lk), "NaN log-odds");
    return v;
  }
  if (has(mk)) return from_mu(number(mk), mk, line_of(mk));
  return std::nullopt;
}

std::optional<std::pair<double, double>> Document::log_odds_range(const std::string& section,
                                                                  const std::string& name) const {
  const std::string lk = section + ".l_" + name;
  const std::string mk = section + ".mu_" + name;
  if (has(lk) && has(mk)) throw ConfigError(mk, line_of(mk), "give either l_" + name + " or mu_" + name);
  const std::string key = has(lk) ? lk : mk;
  if (!has(key)) return std::nullopt;
  std::vector<double> xs = numbers(key);
  if (xs.size() == 1) xs.push_back(xs[0]);
  if (xs.size() != 2) throw ConfigError(key, line_of(key), "expected a value or [lo, hi]");
  if (key == mk)
    for (double& x : xs) x = from_mu(x, key, line_of(key));
  if (!(xs[0] <= xs[1])) throw ConfigError(key, line_of(key), "range must satisfy lo <= hi");
  return std::make_pair(xs[0], xs[1]);
}

void Document::reject_unknown(const std::vector<std::string>& allowed) const {
  for (const auto& [k, v] : entries_)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError(k, v.line, "unknown field");
}

namespace {

std::vector<std::string> allowed_keys() {
  std::vector<std::string> keys{
      "model.lambda", "model.d", "model.d_good", "model.d_bad", "model.r",
      "benefit.family", "benefit.k", "benefit.m", "benefit.s",
      "cost.good.a", "cost.good.b", "cost.bad.a", "cost.bad.b",
      "profile.kind",
      "search.grid_points", "search.refine_rounds", "search.refine_halvings",
      "numerics.curve_step", "numerics.switched_steps", "numerics.boundary_offset",
      "numerics.foc_tolerance", "numerics.stasis_tolerance", "numerics.max_stasis_iterations",
      "numerics.br_tolerance", "numerics.grace", "numerics.strict", "numerics.dtheta_deltas",
      "simulation.horizon", "simulation.paths", "simulation.seed", "simulation.l_start",
      "simulation.mu_start", "simulation.deviations", "simulation.rk_step",
      "discrete.delta", "discrete.cost_good", "discrete.cost_bad", "discrete.l0", "discrete.mu0",
      "discrete.e0", "discrete.q", "discrete.e1", "discrete.e0_max", "discrete.e1_max",
      "discrete.divisions",
      "sweep.field", "sweep.values",
      "output.dir"};
  for (const char* sec : {"profile", "search"})
    for (const char* n : {"under", "0", "1", "over"})
      for (const char* p : {"l_", "mu_"}) keys.push_back(std::string(sec) + "." + p + n);
  return keys;
}

int positive_int(const Document& d, const std::string& key, int fallback) {
  if (!d.has(key)) return fallback;
  const double v = d.number(key);
  if (!(v >= 1.0 && v == std::floor(v) && v < 2147483647.0))
    throw ConfigError(key, d.line_of(key), "expected a positive integer");
  return static_cast<int>(v);
}

double positive(const Document& d, const std::string& key, double fallback) {
  if (!d.has(key)) return fallback;
  const double v = d.number(key);
  if (!(v > 0.0 && std::isfinite(v))) throw ConfigError(key, d.line_of(key), "must be positive");
  return v;
}

template <class F>
void wrap(const std::string& field, int line, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field, line, e.what());
  }
}

Game build_game(const Document& d) {
  for (const char* k : {"model.lambda", "model.r"})
    if (!d.has(k)) throw ConfigError(k, 0, "required field missing");
  const double lambda = d.number("model.lambda");
  const double r = d.number("model.r");
  if (!(r > 0.0)) throw ConfigError("model.r", d.line_of("model.r"), "discount rate must be > 0");
  if (!(lambda > 0.0)) throw ConfigError("model.lambda", d.line_of("model.lambda"), "must be > 0");
  const double dd = d.number_or("model.d", 0.0);
  const double dg = d.number_or("model.d_good", dd);
  const double db = d.number_or("model.d_bad", dd);
  Game g;
  g.params = ModelParams::type_dependent(lambda, dd, dg, db, r);
  wrap("model", d.line_of("model.lambda"), [&] { g.params.validate(); });

  const std::string fam = d.string_or("benefit.family", "shifted_logistic");
  const int fl = d.line_of("benefit.family");
  if (fam == "shifted_logistic") {
    if (d.has("benefit.m") || d.has("benefit.s"))
      throw ConfigError("benefit", d.line_of(d.has("benefit.m") ? "benefit.m" : "benefit.s"),
                        "m and s belong to the affine_logistic family");
    g.benefit = BenefitFn::shifted_logistic(d.number_or("benefit.k", 0.0));
  } else if (fam == "affine_logistic") {
    g.benefit = BenefitFn::affine_logistic(d.number_or("benefit.k", 0.0), d.number_or("benefit.m", 0.0),
                                           d.number_or("benefit.s", 1.0));
  } else {
    throw ConfigError("benefit.family", fl, "unknown family '" + fam + "'");
  }
  wrap("benefit", fl, [&] { g.benefit.validate(); });

  for (const char* t : {"good", "bad"}) {
    const std::string base = std::string("cost.") + t;
    if (!d.has(base + ".a") && !d.has(base + ".b")) throw ConfigError(base, 0, "required section missing");
    CostFn c{d.number_or(base + ".a", 0.0), d.number_or(base + ".b", 0.0)};
    wrap(base, d.line_of(base + ".a"), [&] { c.validate(); });
    (std::string(t) == "good" ? g.cost_good : g.cost_bad) = c;
  }
  return g;
}

ProfileSpec build_profile(const Document& d) {
  ProfileSpec p;
  const std::string kind = d.string_or("profile.kind", "switched");
  const int line = d.line_of("profile.kind");
  auto need = [&](const std::string& name) {
    const auto v = d.log_odds("profile", name);
    if (!v) throw ConfigError("profile.l_" + name, line, "required for a " + kind + " profile");
    return *v;
  };
  if (kind == "pooling") {
    p.kind = ProfileKind::Pooling;
  } else if (kind == "extremal") {
    p.kind = ProfileKind::Extremal;
    p.l_1 = need("1");
    p.l_over = d.log_odds("profile", "over").value_or(kInf);
    if (!(std::isfinite(p.l_1) && p.l_1 < p.l_over)) throw ConfigError("profile", line, "need finite l_1 < l_over");
  } else if (kind == "switched") {
    p.kind = ProfileKind::Switched;
    p.l_under = need("under");
    p.l_0 = need("0");
    p.l_1 = d.log_odds("profile", "1").value_or(p.l_0);
    p.l_over = d.log_odds("profile", "over").value_or(kInf);
  } else {
    throw ConfigError("profile.kind", line, "expected pooling, switched or extremal");
  }
  return p;
}

}  // namespace

RunConfig config_from_document(Document doc, const std::string& text, const std::string& path) {
  doc.reject_unknown(allowed_keys());
  RunConfig c;
  c.path = path;
  c.text = text;

  if (doc.has_section("model") || doc.has_section("benefit") || doc.has_section("cost.good") ||
      doc.has_section("cost.bad"))
    c.game = build_game(doc);

  if (doc.has_section("profile")) c.profile = build_profile(doc);

  if (doc.has_section("search")) {
    SearchSpec s;
    auto range = [&](const std::string& name, ThresholdRange& out, std::optional<double> fallback) {
      if (auto r = doc.log_odds_range("search", name)) {
        out = {r->first, r->second};
      } else if (fallback) {
        out = ThresholdRange::at(*fallback);
      } else {
        throw ConfigError("search.l_" + name, 0, "needs a range or a profile value");
      }
    };
    const ProfileSpec* p = c.profile ? &*c.profile : nullptr;
    auto pv = [&](double ProfileSpec::*m) -> std::optional<double> {
      if (p && p->kind == ProfileKind::Switched) return p->*m;
      return std::nullopt;
    };
    range("under", s.l_under, pv(&ProfileSpec::l_under));
    range("0", s.l_0, pv(&ProfileSpec::l_0));
    range("1", s.l_1, pv(&ProfileSpec::l_1));
    std::optional<double> over = pv(&ProfileSpec::l_over);
    if (!over) over = kInf;
    range("over", s.l_over, over);
    s.grid_points = positive_int(doc, "search.grid_points", s.grid_points);
    if (doc.has("search.refine_rounds")) {
      const double v = doc.number("search.refine_rounds");
      if (!(v >= 0.0 && v == std::floor(v)))
        throw ConfigError("search.refine_rounds", doc.line_of("search.refine_rounds"), "expected an integer >= 0");
      s.refine_rounds = static_cast<int>(v);
    }
    s.refine_halvings = positive_int(doc, "search.refine_halvings", s.refine_halvings);
    c.search = s;
  }

  ValueOptions& n = c.numerics;
  n.curve_step = positive(doc, "numerics.curve_step", n.curve_step);
  n.switched_steps = positive_int(doc, "numerics.switched_steps", n.switched_steps);
  n.boundary_offset = positive(doc, "numerics.boundary_offset", n.boundary_offset);
  n.foc_tolerance = positive(doc, "numerics.foc_tolerance", n.foc_tolerance);
  n.stasis_tolerance = positive(doc, "numerics.stasis_tolerance", n.stasis_tolerance);
  n.max_stasis_iterations = positive_int(doc, "numerics.max_stasis_iterations", n.max_stasis_iterations);
  c.br_tolerance = positive(doc, "numerics.br_tolerance", c.br_tolerance);
  c.tolerances.grace = positive(doc, "numerics.grace", c.tolerances.grace);
  if (doc.has("numerics.strict")) {
    c.tolerances.strict = doc.number("numerics.strict");
    if (!(c.tolerances.strict >= 0.0))
      throw ConfigError("numerics.strict", doc.line_of("numerics.strict"), "must be >= 0");
  }
  if (doc.has("numerics.dtheta_deltas")) {
    c.dtheta_deltas = doc.numbers("numerics.dtheta_deltas");
    for (double x : c.dtheta_deltas)
      if (!(x > 0.0)) throw ConfigError("numerics.dtheta_deltas", doc.line_of("numerics.dtheta_deltas"), "entries must be positive");
  }

  SimulationSpec& sim = c.simulation;
  if (doc.has("simulation.horizon")) {
    sim.horizon = doc.number("simulation.horizon");
    if (!(sim.horizon >= 0.0 && std::isfinite(sim.horizon)))
      throw ConfigError("simulation.horizon", doc.line_of("simulation.horizon"), "must be >= 0 (0 picks a default)");
  }
  sim.paths = static_cast<std::size_t>(positive_int(doc, "simulation.paths", static_cast<int>(sim.paths)));
  if (doc.has("simulation.seed")) {
    const ConfigValue& v = doc.at("simulation.seed");
    std::string digits = v.raw;
    if (!digits.empty() && digits.front() == '"') digits = digits.substr(1, digits.size() - 2);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
      throw ConfigError("simulation.seed", v.line, "expected a non-negative integer");
    try {
      sim.seed = std::stoull(digits);
    } catch (const std::exception&) {
      throw ConfigError("simulation.seed", v.line, "seed out of range");
    }
  }
  sim.l0 = doc.log_odds("simulation", "start");
  sim.deviations = doc.bool_or("simulation.deviations", sim.deviations);
  sim.rk_step = positive(doc, "simulation.rk_step", sim.rk_step);

  if (doc.has_section("discrete")) {
    DiscreteSpec ds;
    ds.params.delta = doc.number_or("discrete.delta", ds.params.delta);
    ds.params.cost_good = doc.number_or("discrete.cost_good", ds.params.cost_good);
    ds.params.cost_bad = doc.number_or("discrete.cost_bad", ds.params.cost_bad);
    if (doc.has("discrete.l0") && doc.has("discrete.mu0"))
      throw ConfigError("discrete.mu0", doc.line_of("discrete.mu0"), "give either l0 or mu0");
    if (doc.has("discrete.l0")) ds.params.l0 = doc.number("discrete.l0");
    if (doc.has("discrete.mu0")) ds.params.l0 = from_mu(doc.number("discrete.mu0"), "discrete.mu0", doc.line_of("discrete.mu0"));
    if (!(ds.params.delta > 0.0 && ds.params.delta < 1.0))
      throw ConfigError("discrete.delta", doc.line_of("discrete.delta"), "must lie in (0,1)");
    if (!(ds.params.cost_good > 0.0))
      throw ConfigError("discrete.cost_good", doc.line_of("discrete.cost_good"), "must be positive");
    if (!std::isfinite(ds.params.l0)) throw ConfigError("discrete.l0", doc.line_of("discrete.l0"), "must be finite");
    const int cl = doc.line_of("discrete.e0");
    const bool any = doc.has("discrete.e0") || doc.has("discrete.q") || doc.has("discrete.e1");
    if (any) {
      for (const char* k : {"discrete.e0", "discrete.e1"})
        if (!doc.has(k)) throw ConfigError(k, cl, "candidate needs e0 and e1");
      DiscreteCandidate cand{doc.number("discrete.e0"), doc.number_or("discrete.q", -1.0), doc.number("discrete.e1")};
      if (cand.e0 < 0.0 || cand.e1 < 0.0) throw ConfigError("discrete", cl, "efforts must be >= 0");
      if (doc.has("discrete.q") && !(cand.q_good >= 0.0 && cand.q_good <= 1.0))
        throw ConfigError("discrete.q", doc.line_of("discrete.q"), "must lie in [0,1]");
      ds.candidate = cand;
    }
    ds.grid.e0_max = positive(doc, "discrete.e0_max", ds.grid.e0_max);
    ds.grid.e1_max = positive(doc, "discrete.e1_max", ds.grid.e1_max);
    ds.grid.divisions = positive_int(doc, "discrete.divisions", ds.grid.divisions);
    c.discrete = ds;
  }

  if (doc.has_section("sweep")) {
    SweepSpec sw;
    sw.field = doc.string_or("sweep.field", "");
    if (sw.field.empty()) throw ConfigError("sweep.field", doc.line_of("sweep"), "required field missing");
    if (sw.field.rfind("sweep.", 0) == 0 || sw.field.rfind("output.", 0) == 0)
      throw ConfigError("sweep.field", doc.line_of("sweep.field"), "cannot sweep this field");
    const auto allowed = allowed_keys();
    if (std::find(allowed.begin(), allowed.end(), sw.field) == allowed.end())
      throw ConfigError("sweep.field", doc.line_of("sweep.field"), "unknown field '" + sw.field + "'");
    const ConfigValue& v = doc.at("sweep.values");
    const auto* arr = std::get_if<std::vector<ConfigValue::Scalar>>(&v.data);
    if (!arr || arr->empty()) throw ConfigError("sweep.values", v.line, "expected a non-empty array");
    std::string body = v.raw.substr(1, v.raw.size() - 2);
    for (auto& tok : split_array(body)) sw.values.push_back(tok);
    c.sweep = sw;
  }

  c.out_dir = doc.string_or("output.dir", "");
  c.doc = std::move(doc);
  return c;
}

RunConfig config_from_text(const std::string& text, const std::string& path) {
  return config_from_document(Document::parse(text), text, path);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_text(ss.str(), path);
}

}  // namespace signalflow::cli
