#pragma once

// Finite alphabets, probability vectors, joint distributions and channels.
// Everything downstream operates on these value types; they are immutable
// after construction and safe to share across threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace umlaut {

// Tolerances used across the library (natural-log units everywhere).
inline constexpr double kMassTol = 1e-12;     // invariant check on stored mass
inline constexpr double kInputTol = 1e-9;     // user-input normalisation window
inline constexpr double kSupportEps = 1e-15;  // below this a weight is an exact zero
inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEEull;

struct ProbError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NegativeWeight : ProbError {
  using ProbError::ProbError;
};
struct NotNormalized : ProbError {
  using ProbError::ProbError;
};
struct AlphabetMismatch : ProbError {
  using ProbError::ProbError;
};
struct ShapeMismatch : ProbError {
  using ProbError::ProbError;
};
struct BadAlpha : ProbError {
  using ProbError::ProbError;
};
struct TooLarge : ProbError {
  using ProbError::ProbError;
};
struct AllZero : ProbError {
  using ProbError::ProbError;
};
struct DegenerateSupport : ProbError {
  using ProbError::ProbError;
};

/// Nonnegative extended real: a finite value in nats or +infinity.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr explicit ExtReal(double v) : value_(v) {}

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  constexpr bool is_finite() const { return std::isfinite(value_); }
  constexpr bool is_infinite() const { return !std::isfinite(value_); }
  /// Finite value, or +inf as a double for the infinite tag.
  constexpr double as_double() const { return value_; }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) {
    return ExtReal(a.value_ + b.value_);
  }
  friend constexpr bool operator<(ExtReal a, ExtReal b) { return a.value_ < b.value_; }
  friend constexpr bool operator<=(ExtReal a, ExtReal b) { return a.value_ <= b.value_; }

 private:
  double value_ = 0.0;
};

/// Clamp the tiny negative values a divergence may produce in floating point.
/// Anything below -1e-10 indicates a real bug and is left alone to trip tests.
inline double clamp_divergence(double v) {
  return (v < 0.0 && v > -1e-10) ? 0.0 : v;
}

inline void check_finite_entries(std::span<const double> w, const char* what) {
  for (double v : w) {
    if (std::isnan(v)) throw NegativeWeight(std::string(what) + ": NaN entry");
    if (v < 0.0) throw NegativeWeight(std::string(what) + ": negative entry");
    if (std::isinf(v)) throw NotNormalized(std::string(what) + ": infinite entry");
  }
}

/// Ordered list of distinct symbol names.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ProbError("Alphabet: needs at least one symbol");
    auto sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ProbError("Alphabet: labels must be distinct");
  }

  /// Alphabet with labels "0", "1", ..., "n-1".
  static Alphabet indexed(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return Alphabet(std::move(labels));
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
};

/// Row-major composite alphabet; labels are "a⊗b".
inline Alphabet product_alphabet(const Alphabet& a, const Alphabet& b) {
  std::vector<std::string> labels;
  labels.reserve(a.size() * b.size());
  for (const auto& la : a.labels())
    for (const auto& lb : b.labels()) labels.push_back(la + "⊗" + lb);
  return Alphabet(std::move(labels));
}

/// Probability vector over a named alphabet.
class Dist {
 public:
  /// Degenerate single-symbol distribution; placeholder for result structs.
  Dist() : alphabet_(Alphabet::indexed(1)), weights_{1.0} {}

  Dist(Alphabet alphabet, std::vector<double> weights)
      : alphabet_(std::move(alphabet)), weights_(std::move(weights)) {
    if (weights_.size() != alphabet_.size())
      throw ShapeMismatch("Dist: weight count != alphabet size");
    check_finite_entries(weights_, "Dist");
    double s = 0.0;
    for (double v : weights_) s += v;
    if (std::abs(s - 1.0) > kMassTol)
      throw NotNormalized("Dist: weights sum to " + std::to_string(s));
  }

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const Alphabet& alphabet() const { return alphabet_; }

  /// Indices carrying mass above the exact-zero threshold.
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (weights_[i] > kSupportEps) s.push_back(i);
    return s;
  }

 private:
  Alphabet alphabet_;
  std::vector<double> weights_;
};

/// Validating constructor: renormalises when the sum is within the input
/// window [1-1e-9, 1+1e-9], rejects anything further off.
inline Dist make_dist(std::vector<double> weights, Alphabet alphabet) {
  if (weights.size() != alphabet.size())
    throw ShapeMismatch("make_dist: weight count != alphabet size");
  check_finite_entries(weights, "make_dist");
  double s = 0.0;
  for (double v : weights) s += v;
  if (std::abs(s - 1.0) > kInputTol)
    throw NotNormalized("make_dist: weights sum to " + std::to_string(s));
  if (std::abs(s - 1.0) > kMassTol)  // leave already-valid input bit-identical
    for (double& v : weights) v /= s;
  return Dist(std::move(alphabet), std::move(weights));
}

inline Dist uniform_dist(Alphabet alphabet) {
  std::vector<double> w(alphabet.size(), 1.0 / static_cast<double>(alphabet.size()));
  return Dist(std::move(alphabet), std::move(w));
}

inline Dist point_mass(Alphabet alphabet, std::size_t i) {
  std::vector<double> w(alphabet.size(), 0.0);
  w.at(i) = 1.0;
  return Dist(std::move(alphabet), std::move(w));
}

/// Probability matrix over X x Y, row-major, with marginal accessors.
class JointDist {
 public:
  JointDist(Alphabet x_alphabet, Alphabet y_alphabet, std::vector<double> mass)
      : x_(std::move(x_alphabet)), y_(std::move(y_alphabet)), mass_(std::move(mass)) {
    if (mass_.size() != x_.size() * y_.size())
      throw ShapeMismatch("JointDist: mass size != |X|*|Y|");
    check_finite_entries(mass_, "JointDist");
    double s = 0.0;
    for (double v : mass_) s += v;
    if (std::abs(s - 1.0) > kMassTol)
      throw NotNormalized("JointDist: total mass " + std::to_string(s));
  }

  std::size_t nx() const { return x_.size(); }
  std::size_t ny() const { return y_.size(); }
  double operator()(std::size_t x, std::size_t y) const { return mass_[x * ny() + y]; }
  const std::vector<double>& mass() const { return mass_; }
  const Alphabet& x_alphabet() const { return x_; }
  const Alphabet& y_alphabet() const { return y_; }

  Dist marginal_x() const {
    std::vector<double> w(nx(), 0.0);
    for (std::size_t x = 0; x < nx(); ++x)
      for (std::size_t y = 0; y < ny(); ++y) w[x] += (*this)(x, y);
    fixup_rounding(w);
    return Dist(x_, std::move(w));
  }

  Dist marginal_y() const {
    std::vector<double> w(ny(), 0.0);
    for (std::size_t x = 0; x < nx(); ++x)
      for (std::size_t y = 0; y < ny(); ++y) w[y] += (*this)(x, y);
    fixup_rounding(w);
    return Dist(y_, std::move(w));
  }

 private:
  // Row/column sums of a unit-mass matrix can land a few ulp off 1; nudge the
  // largest entry so the marginal satisfies the Dist invariant bit-exactly
  // when the input was exact, without renormalising anything else.
  static void fixup_rounding(std::vector<double>& w) {
    double s = 0.0;
    for (double v : w) s += v;
    double err = s - 1.0;
    if (err != 0.0 && std::abs(err) <= kMassTol) {
      auto it = std::max_element(w.begin(), w.end());
      *it -= err;
    }
  }

  Alphabet x_, y_;
  std::vector<double> mass_;
};

inline JointDist make_joint(std::vector<std::vector<double>> rows, Alphabet x_alphabet,
                            Alphabet y_alphabet) {
  std::vector<double> flat;
  flat.reserve(x_alphabet.size() * y_alphabet.size());
  if (rows.size() != x_alphabet.size())
    throw ShapeMismatch("make_joint: row count != |X|");
  for (const auto& r : rows) {
    if (r.size() != y_alphabet.size())
      throw ShapeMismatch("make_joint: column count != |Y|");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  check_finite_entries(flat, "make_joint");
  double s = 0.0;
  for (double v : flat) s += v;
  if (std::abs(s - 1.0) > kInputTol)
    throw NotNormalized("make_joint: total mass " + std::to_string(s));
  if (std::abs(s - 1.0) > kMassTol)
    for (double& v : flat) v /= s;
  return JointDist(std::move(x_alphabet), std::move(y_alphabet), std::move(flat));
}

/// Row-stochastic matrix W(y|x) over named input/output alphabets.
class Channel {
 public:
  Channel(Alphabet x_alphabet, Alphabet y_alphabet, std::vector<double> rows)
      : x_(std::move(x_alphabet)), y_(std::move(y_alphabet)), rows_(std::move(rows)) {
    if (rows_.size() != x_.size() * y_.size())
      throw ShapeMismatch("Channel: matrix size != |X|*|Y|");
    check_finite_entries(rows_, "Channel");
    for (std::size_t x = 0; x < x_.size(); ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < y_.size(); ++y) s += rows_[x * y_.size() + y];
      if (std::abs(s - 1.0) > kMassTol)
        throw NotNormalized("Channel: row " + std::to_string(x) + " sums to " +
                            std::to_string(s));
    }
  }

  std::size_t nx() const { return x_.size(); }
  std::size_t ny() const { return y_.size(); }
  double operator()(std::size_t y, std::size_t x) const { return rows_[x * ny() + y]; }
  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(rows_).subspan(x * ny(), ny());
  }
  const std::vector<double>& rows() const { return rows_; }
  const Alphabet& x_alphabet() const { return x_; }
  const Alphabet& y_alphabet() const { return y_; }

 private:
  Alphabet x_, y_;
  std::vector<double> rows_;
};

/// Same normalisation window as make_dist, applied per row.
inline Channel make_channel(std::vector<std::vector<double>> rows, Alphabet x_alphabet,
                            Alphabet y_alphabet) {
  if (rows.size() != x_alphabet.size())
    throw ShapeMismatch("make_channel: row count != |X|");
  std::vector<double> flat;
  flat.reserve(x_alphabet.size() * y_alphabet.size());
  for (auto& r : rows) {
    if (r.size() != y_alphabet.size())
      throw ShapeMismatch("make_channel: column count != |Y|");
    check_finite_entries(r, "make_channel");
    double s = 0.0;
    for (double v : r) s += v;
    if (std::abs(s - 1.0) > kInputTol)
      throw NotNormalized("make_channel: row sums to " + std::to_string(s));
    if (std::abs(s - 1.0) > kMassTol)
      for (double& v : r) v /= s;
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Channel(std::move(x_alphabet), std::move(y_alphabet), std::move(flat));
}

/// Binary symmetric channel with crossover probability q.
inline Channel make_bsc(double q) {
  if (q < 0.0 || q > 1.0) throw ProbError("make_bsc: q outside [0,1]");
  return Channel(Alphabet::indexed(2), Alphabet::indexed(2), {1.0 - q, q, q, 1.0 - q});
}

/// Binary erasure channel with erasure probability q; outputs {0, 1, e}.
inline Channel make_bec(double q) {
  if (q < 0.0 || q > 1.0) throw ProbError("make_bec: q outside [0,1]");
  return Channel(Alphabet::indexed(2), Alphabet(std::vector<std::string>{"0", "1", "e"}),
                 {1.0 - q, 0.0, q, 0.0, 1.0 - q, q});
}

/// mass[x][y] = W(y|x) P(x). The X-marginal reproduces P exactly for exact
/// inputs and to <= 1e-14 otherwise.
inline JointDist joint_from_channel(const Channel& w, const Dist& p) {
  if (!(p.alphabet() == w.x_alphabet()))
    throw AlphabetMismatch("joint_from_channel: P not over W's input alphabet");
  std::vector<double> mass(w.nx() * w.ny());
  for (std::size_t x = 0; x < w.nx(); ++x)
    for (std::size_t y = 0; y < w.ny(); ++y) mass[x * w.ny() + y] = w(y, x) * p[x];
  return JointDist(w.x_alphabet(), w.y_alphabet(), std::move(mass));
}

/// Tensor product of two joints over the row-major composite alphabets.
inline JointDist product_joint(const JointDist& a, const JointDist& b) {
  Alphabet xs = product_alphabet(a.x_alphabet(), b.x_alphabet());
  Alphabet ys = product_alphabet(a.y_alphabet(), b.y_alphabet());
  std::vector<double> mass(xs.size() * ys.size());
  std::size_t ny = ys.size();
  for (std::size_t xa = 0; xa < a.nx(); ++xa)
    for (std::size_t xb = 0; xb < b.nx(); ++xb)
      for (std::size_t ya = 0; ya < a.ny(); ++ya)
        for (std::size_t yb = 0; yb < b.ny(); ++yb) {
          std::size_t x = xa * b.nx() + xb;
          std::size_t y = ya * b.ny() + yb;
          mass[x * ny + y] = a(xa, ya) * b(xb, yb);
        }
  return JointDist(std::move(xs), std::move(ys), std::move(mass));
}

/// (W1 x W2)(y1 y2 | x1 x2) = W1(y1|x1) W2(y2|x2).
inline Channel product_channel(const Channel& w1, const Channel& w2) {
  Alphabet xs = product_alphabet(w1.x_alphabet(), w2.x_alphabet());
  Alphabet ys = product_alphabet(w1.y_alphabet(), w2.y_alphabet());
  std::size_t ny = ys.size();
  std::vector<double> rows(xs.size() * ny);
  for (std::size_t x1 = 0; x1 < w1.nx(); ++x1)
    for (std::size_t x2 = 0; x2 < w2.nx(); ++x2)
      for (std::size_t y1 = 0; y1 < w1.ny(); ++y1)
        for (std::size_t y2 = 0; y2 < w2.ny(); ++y2) {
          std::size_t x = x1 * w2.nx() + x2;
          std::size_t y = y1 * w2.ny() + y2;
          rows[x * ny + y] = w1(y1, x1) * w2(y2, x2);
        }
  return Channel(std::move(xs), std::move(ys), std::move(rows));
}

/// n-fold tensor power of a channel. Guarded: |X|^n * |Y|^n <= 2^16.
inline Channel channel_power(const Channel& w, std::size_t n) {
  if (n == 0) throw ProbError("channel_power: n must be >= 1");
  double cells = 1.0;
  for (std::size_t i = 0; i < n; ++i) cells *= static_cast<double>(w.nx() * w.ny());
  if (cells > 65536.0) throw TooLarge("channel_power: |X|^n * |Y|^n exceeds 2^16");
  Channel acc = w;
  for (std::size_t i = 1; i < n; ++i) acc = product_channel(acc, w);
  return acc;
}

}  // namespace umlaut
