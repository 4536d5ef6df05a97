#pragma once

#include <optional>
#include <string>
#include <vector>

#include "signalflow/model.hpp"

namespace signalflow {

enum class RegionKind { PoolZero, Scrutiny, Switched, Custom };

const char* to_string(RegionKind k);
RegionKind parse_region_kind(std::string_view s);

// Piecewise-linear table, clamped at both ends.
struct EffortTable {
  std::vector<double> l;
  std::vector<double> e;

  bool empty() const { return l.empty(); }
  double at(double x) const;
};

struct EffortPair {
  double good = 0.0;
  double bad = 0.0;
};

struct Region {
  LogOdds lower;
  LogOdds upper;
  bool lower_closed = true;
  bool upper_closed = false;
  RegionKind kind = RegionKind::PoolZero;
  EffortPair custom;
  EffortTable bad_effort;

  bool contains(double l) const;
  EffortPair efforts(double l) const;
  // Efforts are the same at every point of the region.
  bool constant_efforts() const { return kind != RegionKind::Switched; }
};

// l_under, l_0, l_1, l_over of the canonical switched shape.
struct Thresholds {
  LogOdds l_under;
  LogOdds l_0;
  LogOdds l_1;
  LogOdds l_over;
};

class StrategyProfile {
 public:
  StrategyProfile() = default;
  StrategyProfile(std::vector<Region> regions, std::optional<Thresholds> thresholds);

  static StrategyProfile pooling();
  // (-inf,l_under] pool, (l_under,l_0] switched, (l_0,l_1) pool, [l_1,l_over) scrutiny, rest pool.
  static StrategyProfile canonical(const Thresholds& t, EffortTable bad_effort);
  // Pool below l_1, scrutiny on [l_1, l_over), pool above.
  static StrategyProfile extremal(LogOdds l_1, LogOdds l_over);

  const std::vector<Region>& regions() const { return regions_; }
  const std::optional<Thresholds>& thresholds() const { return thresholds_; }

  std::size_t region_index(double l) const;
  const Region& region_at(double l) const { return regions_[region_index(l)]; }
  EffortPair effort_at(double l) const;
  EffortPair effort_at(LogOdds l) const { return effort_at(l.value()); }

  std::optional<std::size_t> find_kind(RegionKind k) const;
  bool has_switched() const { return find_kind(RegionKind::Switched).has_value(); }

 private:
  std::vector<Region> regions_;
  std::optional<Thresholds> thresholds_;
};

std::vector<std::string> validate_profile(const StrategyProfile& p);

// Line-based text form. Numbers are written as hex floats so a round trip is exact.
std::string serialize_profile(const StrategyProfile& p);
StrategyProfile parse_profile(std::string_view text);

struct StasisPoint {
  double point = 0.0;
  double weight = 1.0;       // fraction of time spent just below the point
  double drift_below = 0.0;
  double drift_above = 0.0;
  EffortPair below;
  EffortPair above;
};

std::vector<StasisPoint> stasis_points(const StrategyProfile& p, const ModelParams& params);

}  // namespace signalflow
