#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uivtsp/types.hpp"

namespace uivtsp {

// Band edges for worker classification, strictly ordered inside (0, 1).
struct Thresholds {
  double low = 0.2;
  double mid = 0.5;
  double high = 0.8;
};

inline void validate(const Thresholds& t) {
  if (!(0.0 < t.low && t.low < t.mid && t.mid < t.high && t.high < 1.0))
    throw std::invalid_argument("thresholds must satisfy 0 < low < mid < high < 1");
}

// How the compliance penalty treats a clean record. `literal` evaluates the
// exponential form everywhere, which caps the factor at e^-1 even for a
// spotless history; `on_leak` (the default) applies the penalty only once a
// leak has been recorded, so clean workers can actually reach the top band.
enum class PenaltyMode { literal, on_leak };

enum class Classification { honest, monitored, semi_honest, dishonest, removed };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::honest: return "honest";
    case Classification::monitored: return "monitored";
    case Classification::semi_honest: return "semi-honest";
    case Classification::dishonest: return "dishonest";
    case Classification::removed: return "removed";
  }
  return "?";
}

inline void require_counts(std::int64_t sec, std::int64_t lek) {
  if (sec < 0 || lek < 0) throw std::invalid_argument("behavior counts cannot be negative");
}

// Beta-shaped prior over kept vs leaked secrets: (1 + sec) / (2 + sec + lek).
inline double base_trust(std::int64_t sec, std::int64_t lek) {
  require_counts(sec, lek);
  return (1.0 + static_cast<double>(sec)) / (2.0 + static_cast<double>(sec) + static_cast<double>(lek));
}

// Compliance factor e^{-(sec+lek)/sec} with its limit cases pinned:
// a fully empty record keeps factor 1, activity with zero kept secrets
// collapses it to 0.
inline double penalty(std::int64_t sec, std::int64_t lek, PenaltyMode mode) {
  require_counts(sec, lek);
  if (mode == PenaltyMode::on_leak && lek == 0) return 1.0;
  if (sec == 0) return lek == 0 ? 1.0 : 0.0;
  double exponent = static_cast<double>(sec + lek) / static_cast<double>(sec);
  return std::exp(-exponent);
}

inline double trust_value(std::int64_t sec, std::int64_t lek, PenaltyMode mode) {
  return base_trust(sec, lek) * penalty(sec, lek, mode);
}

// Band decision. The top band is closed at `high`, the low band open at
// `low`, and the two middle bands are half-open: [low, mid) is treated as
// semi-honest, [mid, high) as monitored.
inline Classification classify(double tr, const Thresholds& t) {
  validate(t);
  if (tr >= t.high) return Classification::honest;
  if (tr < t.low) return Classification::dishonest;
  if (tr < t.mid) return Classification::semi_honest;
  return Classification::monitored;
}

struct TrustState {
  std::int64_t sec = 0;
  std::int64_t lek = 0;
  double tr = 0.5;
};

inline TrustState initial_trust_state(PenaltyMode mode) {
  return TrustState{0, 0, trust_value(0, 0, mode)};
}

enum class Outcome { kept, leaked };

inline TrustState register_outcome(const TrustState& state, Outcome outcome, PenaltyMode mode) {
  TrustState next = state;
  if (outcome == Outcome::kept)
    next.sec += 1;
  else
    next.lek += 1;
  next.tr = trust_value(next.sec, next.lek, mode);
  return next;
}

// Conspirator evidence: the ordered set of foreign MAC addresses seen holding
// a trap copy attributed to one worker.
struct ConspiracyState {
  std::vector<MacAddress> path;

  std::size_t mu() const { return path.size(); }

  bool add(const MacAddress& mac) {
    if (std::find(path.begin(), path.end(), mac) != path.end()) return false;
    path.push_back(mac);
    return true;
  }
};

// One observed conspirator is enough: trust is forced to zero and the worker
// leaves the pool for good. With an empty path the normal band decision
// stands.
inline std::pair<TrustState, Classification> apply_conspirator_rule(
    const TrustState& state, const ConspiracyState& conspiracy, const Thresholds& thresholds) {
  if (conspiracy.mu() == 0) return {state, classify(state.tr, thresholds)};
  TrustState removed = state;
  removed.tr = 0.0;
  return {removed, Classification::removed};
}

}  // namespace uivtsp
