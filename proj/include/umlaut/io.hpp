#pragma once

// JSON schemas for the library's value types and plain-text emitters.
// Parsing goes through nlohmann::json; serialisation is hand-rolled so every
// number carries 17 significant digits ('.' decimal, no locale).

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "umlaut/gaussian.hpp"
#include "umlaut/prob.hpp"

namespace umlaut::io {

/// 17-significant-digit rendering; infinities serialise as the string "inf".
inline std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (std::isnan(v)) return "\"nan\"";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  out += "\"";
  return out;
}

inline std::string json_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt17(v[i]);
  }
  return out + "]";
}

inline std::string json_array(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += json_string(v[i]);
  }
  return out + "]";
}

inline std::string json_matrix(const std::vector<std::vector<double>>& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ",";
    out += json_array(m[i]);
  }
  return out + "]";
}

// --- parsing -----------------------------------------------------------

inline Alphabet parse_alphabet(const nlohmann::json& j) {
  std::vector<std::string> labels;
  for (const auto& v : j) {
    if (v.is_string()) labels.push_back(v.get<std::string>());
    else labels.push_back(v.dump());
  }
  return Alphabet(std::move(labels));
}

/// {"alphabet": [...], "weights": [...]}
inline Dist parse_dist(const nlohmann::json& j) {
  Alphabet a = parse_alphabet(j.at("alphabet"));
  std::vector<double> w = j.at("weights").get<std::vector<double>>();
  return make_dist(std::move(w), std::move(a));
}

/// {"inputs": [...], "outputs": [...], "matrix": [[row-stochastic]]}
inline Channel parse_channel(const nlohmann::json& j) {
  Alphabet xs = parse_alphabet(j.at("inputs"));
  Alphabet ys = parse_alphabet(j.at("outputs"));
  auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
  return make_channel(std::move(rows), std::move(xs), std::move(ys));
}

/// {"inputs": [...], "outputs": [...], "mass": [[...]]}
inline JointDist parse_joint(const nlohmann::json& j) {
  Alphabet xs = parse_alphabet(j.at("inputs"));
  Alphabet ys = parse_alphabet(j.at("outputs"));
  auto rows = j.at("mass").get<std::vector<std::vector<double>>>();
  return make_joint(std::move(rows), std::move(xs), std::move(ys));
}

/// {"mean": [...], "cov": [[...]], "nx": n, "ny": k}
inline GaussianJoint parse_gaussian_joint(const nlohmann::json& j) {
  int n = j.at("nx").get<int>();
  int k = j.at("ny").get<int>();
  auto mean = j.at("mean").get<std::vector<double>>();
  auto cov = j.at("cov").get<std::vector<std::vector<double>>>();
  Eigen::VectorXd m(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) m[static_cast<int>(i)] = mean[i];
  Eigen::MatrixXd v(cov.size(), cov.empty() ? 0 : cov[0].size());
  for (std::size_t r = 0; r < cov.size(); ++r)
    for (std::size_t c = 0; c < cov[r].size(); ++c)
      v(static_cast<int>(r), static_cast<int>(c)) = cov[r][c];
  return GaussianJoint(n, k, std::move(m), std::move(v));
}

/// {"H": [[...]], "m": [...], "V": [[...]], "C": [[...]]}
inline GaussianChannelSpec parse_gaussian_channel(const nlohmann::json& j) {
  auto to_matrix = [](const nlohmann::json& jj) {
    auto rows = jj.get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    return m;
  };
  auto mv = j.at("m").get<std::vector<double>>();
  Eigen::VectorXd m(mv.size());
  for (std::size_t i = 0; i < mv.size(); ++i) m[static_cast<int>(i)] = mv[i];
  return GaussianChannelSpec(to_matrix(j.at("H")), std::move(m), to_matrix(j.at("V")),
                             to_matrix(j.at("C")));
}

// --- serialisation -----------------------------------------------------

inline std::string serialize_dist(const Dist& d) {
  return "{\"alphabet\":" + json_array(d.alphabet().labels()) +
         ",\"weights\":" + json_array(d.weights()) + "}";
}

inline std::string serialize_channel(const Channel& w) {
  std::vector<std::vector<double>> rows(w.nx());
  for (std::size_t x = 0; x < w.nx(); ++x)
    rows[x].assign(w.row(x).begin(), w.row(x).end());
  return "{\"inputs\":" + json_array(w.x_alphabet().labels()) +
         ",\"outputs\":" + json_array(w.y_alphabet().labels()) +
         ",\"matrix\":" + json_matrix(rows) + "}";
}

inline std::string serialize_joint(const JointDist& j) {
  std::vector<std::vector<double>> rows(j.nx(), std::vector<double>(j.ny()));
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y) rows[x][y] = j(x, y);
  return "{\"inputs\":" + json_array(j.x_alphabet().labels()) +
         ",\"outputs\":" + json_array(j.y_alphabet().labels()) +
         ",\"mass\":" + json_matrix(rows) + "}";
}

}  // namespace umlaut::io
