#pragma once

// Deliberately naive reference implementations, written straight from the
// definitions and sharing no code with the library. Tests cross-check the
// optimized paths against these.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace oracle {

// --- value-weighted scoring ---

struct Table {
  double tn = 0, fp = 0, fn = 0, tp = 0;
};

// (v[i-1], ..., v[i-T]); out-of-range and masked slots read as zero.
inline std::vector<std::uint8_t> window_before(
    const std::vector<std::uint8_t>& values,
    const std::vector<std::uint8_t>& mask, std::size_t i, int T) {
  std::vector<std::uint8_t> out;
  for (int d = 1; d <= T; ++d) {
    const bool in = static_cast<std::size_t>(d) <= i;
    const std::size_t j = i - static_cast<std::size_t>(d);
    out.push_back(in && mask[j] ? values[j] : 0);
  }
  return out;
}

inline std::vector<std::uint8_t> window_after(
    const std::vector<std::uint8_t>& values,
    const std::vector<std::uint8_t>& mask, std::size_t i, int T) {
  std::vector<std::uint8_t> out;
  for (int d = 1; d <= T; ++d) {
    const std::size_t j = i + static_cast<std::size_t>(d);
    out.push_back(j < values.size() && mask[j] ? values[j] : 0);
  }
  return out;
}

// w(s,t) = 2 when s,t == 0, else 1 - max(w o t), w = (1/2, ..., 1/(T+1)).
inline double weight(const std::vector<std::uint8_t>& s,
                     const std::vector<std::uint8_t>& t) {
  const bool s_zero = std::all_of(s.begin(), s.end(), [](auto v) { return v == 0; });
  const bool t_zero = std::all_of(t.begin(), t.end(), [](auto v) { return v == 0; });
  if (s_zero && t_zero) return 2.0;
  double m = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k)
    m = std::max(m, t[k] / (static_cast<double>(k) + 2.0));
  return 1.0 - m;
}

// Plain counts over unmasked indices.
inline Table confusion(const std::vector<std::uint8_t>& actual,
                       const std::vector<std::uint8_t>& mask,
                       const std::vector<std::uint8_t>& predicted) {
  Table t;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!mask[i]) continue;
    if (actual[i] && predicted[i]) t.tp += 1;
    if (actual[i] && !predicted[i]) t.fn += 1;
    if (!actual[i] && predicted[i]) t.fp += 1;
    if (!actual[i] && !predicted[i]) t.tn += 1;
  }
  return t;
}

// wFP_i = w(z-, z+) over actual labels; wFN_i = w(zhat+, zhat-) over
// predicted labels.
inline Table value_weighted(const std::vector<std::uint8_t>& actual,
                            const std::vector<std::uint8_t>& mask,
                            const std::vector<std::uint8_t>& predicted, int T) {
  Table t;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!mask[i]) continue;
    if (actual[i] && predicted[i]) t.tp += 1;
    if (!actual[i] && !predicted[i]) t.tn += 1;
    if (!actual[i] && predicted[i])
      t.fp += weight(window_before(actual, mask, i, T),
                     window_after(actual, mask, i, T));
    if (actual[i] && !predicted[i])
      t.fn += weight(window_after(predicted, mask, i, T),
                     window_before(predicted, mask, i, T));
  }
  return t;
}

inline std::optional<double> tss(const Table& t) {
  if (t.tp + t.fn == 0 || t.fp + t.tn == 0) return std::nullopt;
  return t.tp / (t.tp + t.fn) - t.fp / (t.fp + t.tn);
}

inline std::optional<double> csi(const Table& t) {
  if (t.tp + t.fp + t.fn == 0) return std::nullopt;
  return t.tp / (t.tp + t.fp + t.fn);
}

// --- threshold choice by exhaustive evaluation ---

struct ThresholdPick {
  double tau = 0.0;
  double score = 0.0;
};

// Evaluates every candidate directly (no incremental updates). Scores within
// tie_eps count as equal and the smallest tau wins; candidate scores for
// these sizes are rationals almost always spaced far wider than tie_eps.
inline std::optional<ThresholdPick> best_threshold(
    const std::vector<double>& probs, const std::vector<std::uint8_t>& actual,
    const std::vector<std::uint8_t>& mask, bool value_weighted_score,
    bool tss_family, int T, const std::vector<double>& candidates,
    double tie_eps = 1e-12) {
  std::optional<ThresholdPick> best;
  for (const double tau : candidates) {
    std::vector<std::uint8_t> pred(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) pred[i] = probs[i] > tau;
    const Table table = value_weighted_score
                            ? value_weighted(actual, mask, pred, T)
                            : confusion(actual, mask, pred);
    const std::optional<double> value = tss_family ? tss(table) : csi(table);
    if (!value) continue;
    if (!best || *value > best->score + tie_eps)
      best = ThresholdPick{tau, *value};
  }
  return best;
}

// {0} plus sorted unique probabilities, ascending.
inline std::vector<double> unique_candidates(const std::vector<double>& probs) {
  std::vector<double> c{0.0};
  c.insert(c.end(), probs.begin(), probs.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

// --- lightning rule by quadratic scan ---

inline double haversine_atan2(double lat1, double lon1, double lat2,
                              double lon2) {
  constexpr double kRad = 3.14159265358979323846 / 180.0;
  const double p1 = lat1 * kRad, p2 = lat2 * kRad;
  const double dp = (lat2 - lat1) * kRad, dl = (lon2 - lon1) * kRad;
  const double a = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * 6371.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

struct StrikeRef {
  std::int64_t time_us = 0;
  double lat = 0, lon = 0;
};

struct PointRef {
  double lat = 0, lon = 0;
};

// True when some window [t, t + window_min minutes] holds at least min_count
// strikes lying within radius_km of any of the pixels. Any qualifying window
// can slide left until its edge hits a strike, so anchoring at strikes is
// exhaustive.
inline bool lightning_rule(const std::vector<PointRef>& pixels,
                           std::vector<StrikeRef> strikes, double radius_km,
                           int window_min, int min_count) {
  std::vector<StrikeRef> near;
  for (const auto& s : strikes) {
    for (const auto& p : pixels) {
      if (haversine_atan2(s.lat, s.lon, p.lat, p.lon) <= radius_km) {
        near.push_back(s);
        break;
      }
    }
  }
  const std::int64_t span = static_cast<std::int64_t>(window_min) * 60 * 1000000;
  for (const auto& a : near) {
    int count = 0;
    for (const auto& b : near)
      if (b.time_us >= a.time_us && b.time_us <= a.time_us + span) ++count;
    if (count >= min_count) return true;
  }
  return false;
}

// --- scalar LSTM cell ---

struct LstmRefParams {
  // Row-major (hidden x input) and (hidden x hidden) matrices.
  std::vector<double> Wxi, Whi, Wxf, Whf, Wxc, Whc, Wxo, Who;
  std::vector<double> Wci, Wcf, Wco;  // peephole vectors
  std::vector<double> bi, bf, bc, bo;
  int input = 0, hidden = 0;
};

struct LstmRefState {
  std::vector<double> h, c;
};

inline double sigmoid_ref(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline LstmRefState lstm_step(const LstmRefParams& p,
                              const std::vector<double>& x,
                              const LstmRefState& prev) {
  const int H = p.hidden, D = p.input;
  auto affine = [&](const std::vector<double>& Wx, const std::vector<double>& Wh,
                    const std::vector<double>& b, int r) {
    double z = b[r];
    for (int k = 0; k < D; ++k) z += Wx[r * D + k] * x[k];
    for (int k = 0; k < H; ++k) z += Wh[r * H + k] * prev.h[k];
    return z;
  };
  LstmRefState out;
  out.h.resize(H);
  out.c.resize(H);
  for (int r = 0; r < H; ++r) {
    const double i = sigmoid_ref(affine(p.Wxi, p.Whi, p.bi, r) + p.Wci[r] * prev.c[r]);
    const double f = sigmoid_ref(affine(p.Wxf, p.Whf, p.bf, r) + p.Wcf[r] * prev.c[r]);
    const double g = std::tanh(affine(p.Wxc, p.Whc, p.bc, r));
    out.c[r] = f * prev.c[r] + i * g;
    const double o = sigmoid_ref(affine(p.Wxo, p.Who, p.bo, r) + p.Wco[r] * out.c[r]);
    out.h[r] = o * std::tanh(out.c[r]);
  }
  return out;
}

}  // namespace oracle
