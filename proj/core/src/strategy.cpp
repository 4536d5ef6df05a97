#include "signalflow/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace signalflow {

const char* to_string(RegionKind k) {
  switch (k) {
    case RegionKind::PoolZero: return "pool";
    case RegionKind::Scrutiny: return "scrutiny";
    case RegionKind::Switched: return "switched";
    case RegionKind::Custom: return "custom";
  }
  return "?";
}

RegionKind parse_region_kind(std::string_view s) {
  if (s == "pool") return RegionKind::PoolZero;
  if (s == "scrutiny") return RegionKind::Scrutiny;
  if (s == "switched") return RegionKind::Switched;
  if (s == "custom") return RegionKind::Custom;
  throw std::invalid_argument("unknown region kind '" + std::string(s) + "'");
}

double EffortTable::at(double x) const {
  if (l.empty()) throw std::logic_error("empty effort table");
  if (x <= l.front()) return e.front();
  if (x >= l.back()) return e.back();
  const auto it = std::upper_bound(l.begin(), l.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - l.begin()) - 1;
  const double t = (x - l[i]) / (l[i + 1] - l[i]);
  return e[i] + t * (e[i + 1] - e[i]);
}

bool Region::contains(double l) const {
  const double lo = lower.value();
  const double hi = upper.value();
  const bool above = l > lo || (lower_closed && l == lo);
  const bool below = l < hi || (upper_closed && l == hi);
  return above && below;
}

EffortPair Region::efforts(double l) const {
  switch (kind) {
    case RegionKind::PoolZero: return {0.0, 0.0};
    case RegionKind::Scrutiny: return {1.0, 0.0};
    case RegionKind::Switched: return {0.0, bad_effort.at(l)};
    case RegionKind::Custom: return custom;
  }
  return {};
}

StrategyProfile::StrategyProfile(std::vector<Region> regions, std::optional<Thresholds> thresholds)
    : regions_(std::move(regions)), thresholds_(thresholds) {}

namespace {

Region make_region(LogOdds lo, bool lo_closed, LogOdds hi, bool hi_closed, RegionKind kind) {
  Region r;
  r.lower = lo;
  r.upper = hi;
  r.lower_closed = lo_closed;
  r.upper_closed = hi_closed;
  r.kind = kind;
  return r;
}

void append_top(std::vector<Region>& out, LogOdds l_over) {
  const LogOdds inf = LogOdds::plus_infinity();
  out.push_back(make_region(l_over, true, inf, true, RegionKind::PoolZero));
}

}  // namespace

StrategyProfile StrategyProfile::pooling() {
  std::vector<Region> rs{make_region(LogOdds::minus_infinity(), true, LogOdds::plus_infinity(),
                                     true, RegionKind::PoolZero)};
  return StrategyProfile(std::move(rs), std::nullopt);
}

StrategyProfile StrategyProfile::canonical(const Thresholds& t, EffortTable bad_effort) {
  if (!(t.l_under <= t.l_0 && t.l_0 <= t.l_1 && t.l_1 < t.l_over))
    throw std::invalid_argument("thresholds must satisfy l_under <= l_0 <= l_1 < l_over");
  if (!t.l_under.is_finite() || !t.l_1.is_finite())
    throw std::invalid_argument("l_under and l_1 must be finite");
  std::vector<Region> rs;
  rs.push_back(make_region(LogOdds::minus_infinity(), true, t.l_under, true, RegionKind::PoolZero));
  if (t.l_0 > t.l_under) {
    Region sw = make_region(t.l_under, false, t.l_0, true, RegionKind::Switched);
    sw.bad_effort = std::move(bad_effort);
    rs.push_back(std::move(sw));
  }
  const bool gap = t.l_1 > t.l_0;
  if (gap) rs.push_back(make_region(t.l_0, false, t.l_1, false, RegionKind::PoolZero));
  rs.push_back(make_region(t.l_1, gap, t.l_over, false, RegionKind::Scrutiny));
  append_top(rs, t.l_over);
  return StrategyProfile(std::move(rs), t);
}

StrategyProfile StrategyProfile::extremal(LogOdds l_1, LogOdds l_over) {
  if (!l_1.is_finite() || !(l_1 < l_over)) throw std::invalid_argument("need finite l_1 < l_over");
  std::vector<Region> rs;
  rs.push_back(make_region(LogOdds::minus_infinity(), true, l_1, false, RegionKind::PoolZero));
  rs.push_back(make_region(l_1, true, l_over, false, RegionKind::Scrutiny));
  append_top(rs, l_over);
  return StrategyProfile(std::move(rs), std::nullopt);
}

std::size_t StrategyProfile::region_index(double l) const {
  for (std::size_t i = 0; i < regions_.size(); ++i)
    if (regions_[i].contains(l)) return i;
  std::ostringstream os;
  os << "log-odds " << l << " not covered by profile";
  throw std::logic_error(os.str());
}

EffortPair StrategyProfile::effort_at(double l) const { return region_at(l).efforts(l); }

std::optional<std::size_t> StrategyProfile::find_kind(RegionKind k) const {
  for (std::size_t i = 0; i < regions_.size(); ++i)
    if (regions_[i].kind == k) return i;
  return std::nullopt;
}

std::vector<std::string> validate_profile(const StrategyProfile& p) {
  std::vector<std::string> out;
  const auto& rs = p.regions();
  if (rs.empty()) {
    out.push_back("cover: profile has no regions");
    return out;
  }
  if (!(rs.front().lower.is_minus_infinity() && rs.front().lower_closed))
    out.push_back("cover: first region must start at a closed -inf");
  if (!(rs.back().upper.is_plus_infinity() && rs.back().upper_closed))
    out.push_back("cover: last region must end at a closed +inf");

  for (std::size_t i = 0; i < rs.size(); ++i) {
    const Region& r = rs[i];
    std::ostringstream tag;
    tag << "region " << i << " (" << to_string(r.kind) << ")";
    const bool point_at_inf = r.lower == r.upper && !r.lower.is_finite() && r.lower_closed &&
                              r.upper_closed;
    if (!(r.lower < r.upper) && !point_at_inf) out.push_back("ordering: " + tag.str() + " is empty");
    if (i + 1 < rs.size()) {
      const Region& nx = rs[i + 1];
      if (r.upper < nx.lower) out.push_back("gap: between " + tag.str() + " and its successor");
      else if (r.upper > nx.lower) out.push_back("overlap: " + tag.str() + " overlaps its successor");
      else if (r.upper_closed && nx.lower_closed) out.push_back("overlap: shared endpoint of " + tag.str() + " claimed twice");
      else if (!r.upper_closed && !nx.lower_closed) out.push_back("gap: shared endpoint of " + tag.str() + " uncovered");
    }
    if (r.kind == RegionKind::Custom) {
      const auto ok = [](double e) { return e >= 0.0 && e <= 1.0; };
      if (!ok(r.custom.good) || !ok(r.custom.bad)) out.push_back("effort-range: " + tag.str());
    }
    if (r.kind == RegionKind::Switched) {
      const EffortTable& t = r.bad_effort;
      if (t.l.empty() || t.l.size() != t.e.size()) {
        out.push_back("switched-effort: " + tag.str() + " has a malformed effort table");
        continue;
      }
      if (!std::is_sorted(t.l.begin(), t.l.end()) ||
          std::adjacent_find(t.l.begin(), t.l.end()) != t.l.end())
        out.push_back("switched-effort: " + tag.str() + " table grid not strictly increasing");
      for (std::size_t k = 0; k < t.e.size(); ++k) {
        if (!(t.e[k] > 0.0 && t.e[k] <= 1.0)) {
          out.push_back("switched-effort: " + tag.str() + " has e_B outside (0,1]");
          break;
        }
      }
    }
  }

  if (const auto& th = p.thresholds()) {
    auto on_boundary = [&](LogOdds x) {
      for (const Region& r : rs)
        if (r.lower == x || r.upper == x) return true;
      return false;
    };
    for (LogOdds x : {th->l_under, th->l_0, th->l_1, th->l_over})
      if (!on_boundary(x)) out.push_back("thresholds: " + format_log_odds(x) + " is not a region boundary");
  }
  return out;
}

namespace {

EffortPair left_limit(const Region& r, double b) {
  if (r.kind == RegionKind::Switched) return {0.0, r.bad_effort.at(b)};
  return r.efforts(b);
}

}  // namespace

std::vector<StasisPoint> stasis_points(const StrategyProfile& p, const ModelParams& params) {
  std::vector<StasisPoint> out;
  const auto& rs = p.regions();
  for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
    const double b = rs[i].upper.value();
    if (!std::isfinite(b)) continue;
    StasisPoint s;
    s.point = b;
    s.below = left_limit(rs[i], b);
    s.above = left_limit(rs[i + 1], b);
    s.drift_below = drift(s.below.good, s.below.bad, params);
    s.drift_above = drift(s.above.good, s.above.bad, params);
    if (s.drift_below >= 0.0 && s.drift_above < 0.0) {
      s.weight = s.drift_above / (s.drift_above - s.drift_below);
      out.push_back(s);
    }
  }
  return out;
}

namespace {

std::string hex(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double read_double(std::istringstream& in, int line) {
  std::string tok;
  if (!(in >> tok)) throw std::invalid_argument("profile line " + std::to_string(line) + ": missing number");
  char* end = nullptr;
  const double x = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || std::isnan(x))
    throw std::invalid_argument("profile line " + std::to_string(line) + ": bad number '" + tok + "'");
  return x;
}

}  // namespace

std::string serialize_profile(const StrategyProfile& p) {
  std::ostringstream os;
  os << "signalflow-profile 1\n";
  if (const auto& t = p.thresholds())
    os << "thresholds " << hex(t->l_under.value()) << ' ' << hex(t->l_0.value()) << ' '
       << hex(t->l_1.value()) << ' ' << hex(t->l_over.value()) << '\n';
  for (const Region& r : p.regions()) {
    os << "region " << to_string(r.kind) << ' ' << (r.lower_closed ? '[' : '(') << ' '
       << hex(r.lower.value()) << ' ' << hex(r.upper.value()) << ' ' << (r.upper_closed ? ']' : ')')
       << ' ' << hex(r.custom.good) << ' ' << hex(r.custom.bad) << ' ' << r.bad_effort.l.size() << '\n';
    for (std::size_t i = 0; i < r.bad_effort.l.size(); ++i)
      os << hex(r.bad_effort.l[i]) << ' ' << hex(r.bad_effort.e[i]) << '\n';
  }
  return os.str();
}

StrategyProfile parse_profile(std::string_view text) {
  std::istringstream all{std::string(text)};
  std::string line;
  int n = 0;
  auto next = [&](std::string& out) {
    while (std::getline(all, out)) {
      ++n;
      if (!out.empty()) return true;
    }
    return false;
  };
  if (!next(line) || line != "signalflow-profile 1") throw std::invalid_argument("not a profile (bad header)");
  std::vector<Region> regions;
  std::optional<Thresholds> th;
  while (next(line)) {
    std::istringstream in(line);
    std::string tag;
    in >> tag;
    if (tag == "thresholds") {
      Thresholds t;
      t.l_under = LogOdds(read_double(in, n));
      t.l_0 = LogOdds(read_double(in, n));
      t.l_1 = LogOdds(read_double(in, n));
      t.l_over = LogOdds(read_double(in, n));
      th = t;
    } else if (tag == "region") {
      Region r;
      std::string kind, open, close;
      in >> kind >> open;
      r.kind = parse_region_kind(kind);
      r.lower = LogOdds(read_double(in, n));
      r.upper = LogOdds(read_double(in, n));
      in >> close;
      if ((open != "[" && open != "(") || (close != "]" && close != ")"))
        throw std::invalid_argument("profile line " + std::to_string(n) + ": bad interval brackets");
      r.lower_closed = open == "[";
      r.upper_closed = close == "]";
      r.custom.good = read_double(in, n);
      r.custom.bad = read_double(in, n);
      std::size_t rows = 0;
      if (!(in >> rows)) throw std::invalid_argument("profile line " + std::to_string(n) + ": missing table size");
      for (std::size_t k = 0; k < rows; ++k) {
        if (!next(line)) throw std::invalid_argument("profile: truncated effort table");
        std::istringstream row(line);
        r.bad_effort.l.push_back(read_double(row, n));
        r.bad_effort.e.push_back(read_double(row, n));
      }
      regions.push_back(std::move(r));
    } else {
      throw std::invalid_argument("profile line " + std::to_string(n) + ": unknown entry '" + tag + "'");
    }
  }
  return StrategyProfile(std::move(regions), th);
}

}  // namespace signalflow
