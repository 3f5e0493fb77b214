#pragma once

// File formats.
//
// Feature CSV:   label,f0,f1,...,f{d-1}            one sample per row
// Augmented CSV: label,p0,...,p{2d-1},augmented     pre-shape coordinates
// Curves JSON:   {"schema": "geocurve.curves.v1", "config": {...}, "curves": [...]}
// Eval JSON:     {"schema": "geocurve.eval.v1", ...} and a seed,method,classifier,accuracy CSV
//
// Reals are written in shortest round-trip decimal form, so a write/read
// cycle reproduces every double exactly.

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geocurve/evaluate.hpp"

namespace geocurve {

inline constexpr std::string_view kCurvesSchema = "geocurve.curves.v1";
inline constexpr std::string_view kEvalSchema = "geocurve.eval.v1";

inline std::string format_real(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_real(std::string_view token, std::size_t line_no) {
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line_no) + ": '" + std::string(token) + "' is not a finite real");
  }
  return v;
}

}  // namespace detail

/// Reads a feature CSV. A trailing `augmented` column, when present in the
/// header, sets the augmented flag of each row (0 or 1).
inline LabeledFeatureSet read_features(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_commas(line);
  if (header.empty() || header.front() != "label") {
    throw Error(ErrorKind::ParseError, "line 1: header must start with 'label'");
  }
  const bool has_flag = header.back() == "augmented";
  const std::size_t width = header.size() - 1 - (has_flag ? 1 : 0);
  if (width < 2) throw Error(ErrorKind::ParseError, "line 1: need at least 2 feature columns");

  LabeledFeatureSet out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(header.size()) + " fields, found " +
                                             std::to_string(cells.size()));
    }
    if (cells.front().empty()) throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": empty label");
    Vector x(static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < width; ++i) x[static_cast<Eigen::Index>(i)] = detail::parse_real(cells[i + 1], line_no);
    bool flag = false;
    if (has_flag) {
      const auto f = cells.back();
      if (f != "0" && f != "1") {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": augmented flag must be 0 or 1");
      }
      flag = f == "1";
    }
    out.add(std::string(cells.front()), std::move(x), flag);
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, "no data rows");
  return out;
}

inline LabeledFeatureSet read_features_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  try {
    return read_features(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + std::string(e.what()).substr(to_string(e.kind()).size() + 2));
  }
}

/// Writes raw features (`f` columns) or, with `augmented_column`, pre-shape
/// rows (`p` columns) followed by the flag.
inline void write_features(std::ostream& out, const LabeledFeatureSet& set, Eigen::Index dim,
                           bool augmented_column = false) {
  const char prefix = augmented_column ? 'p' : 'f';
  out << "label";
  for (Eigen::Index i = 0; i < dim; ++i) out << ',' << prefix << i;
  if (augmented_column) out << ",augmented";
  out << '\n';
  for (const auto& s : set.samples) {
    out << s.label;
    for (Eigen::Index i = 0; i < s.x.size(); ++i) out << ',' << format_real(s.x[i]);
    if (augmented_column) out << ',' << (s.augmented ? '1' : '0');
    out << '\n';
  }
}

inline nlohmann::json to_json(const LossReport& r) {
  return {{"sim", r.sim}, {"diverg", r.diverg}, {"total", r.total}, {"beta", r.beta}};
}

inline nlohmann::json vector_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline nlohmann::json curves_to_json(const std::map<std::string, FittedCurve>& curves, const FitConfig& cfg) {
  nlohmann::json doc;
  doc["schema"] = kCurvesSchema;
  doc["config"] = {{"beta", cfg.beta},   {"lr_p", cfg.lr_endpoints}, {"lr_t", cfg.lr_t},
                   {"epochs", cfg.epochs}, {"seed", cfg.seed},        {"theta_min", cfg.theta_min}};
  doc["curves"] = nlohmann::json::array();
  for (const auto& [label, fc] : curves) {
    doc["curves"].push_back({{"label", label},
                             {"d", fc.curve.dim() / 2},
                             {"tau_start", vector_json(fc.curve.start().coords())},
                             {"tau_end", vector_json(fc.curve.end().coords())},
                             {"theta", fc.curve.theta()},
                             {"final_loss", to_json(fc.final_loss)},
                             {"reperturb_events", fc.reperturb_events},
                             {"loss_trace", fc.loss_trace}});
  }
  return doc;
}

/// Parses a curves document; endpoints must be valid pre-shapes.
inline std::map<std::string, FittedCurve> curves_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("schema").get<std::string>() != kCurvesSchema) {
      throw Error(ErrorKind::ParseError, "unsupported curves schema '" + doc.at("schema").get<std::string>() + "'");
    }
    std::map<std::string, FittedCurve> out;
    for (const auto& rec : doc.at("curves")) {
      const auto label = rec.at("label").get<std::string>();
      const auto d = rec.at("d").get<Eigen::Index>();
      auto endpoint = [&](const char* key) {
        const auto xs = rec.at(key).get<std::vector<double>>();
        if (static_cast<Eigen::Index>(xs.size()) != 2 * d) {
          throw Error(ErrorKind::ParseError, "curve '" + label + "': " + key + " must have 2d entries");
        }
        return PreShapeVector::checked(Eigen::Map<const Vector>(xs.data(), 2 * d), 1e-10);
      };
      FittedCurve fc{label, GeodesicCurve::make(endpoint("tau_start"), endpoint("tau_end")), {}, {}, 0, {}};
      if (std::abs(fc.curve.theta() - rec.at("theta").get<double>()) > 1e-9) {
        throw Error(ErrorKind::ParseError, "curve '" + label + "': stored theta disagrees with its endpoints");
      }
      if (rec.contains("final_loss")) {
        const auto& fl = rec.at("final_loss");
        fc.final_loss = {fl.at("sim").get<double>(), fl.at("diverg").get<double>(), fl.at("total").get<double>(),
                         fl.at("beta").get<double>()};
      }
      if (rec.contains("loss_trace")) fc.loss_trace = rec.at("loss_trace").get<std::vector<double>>();
      fc.reperturb_events = rec.value("reperturb_events", 0);
      out.emplace(label, std::move(fc));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed curves document: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw Error(ErrorKind::ParseError, std::string("invalid curve: ") + e.what());
  }
}

inline std::map<std::string, FittedCurve> read_curves_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
  return curves_from_json(doc);
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json doc{{"schema", kEvalSchema},
                     {"method", to_string(r.method)},
                     {"classifier", to_string(r.classifier)},
                     {"k", r.k},
                     {"n", r.n ? nlohmann::json(*r.n) : nlohmann::json(nullptr)},
                     {"m_min", r.m_min},
                     {"seeds", r.seeds},
                     {"accuracies", r.accuracies},
                     {"mean", r.mean},
                     {"std", r.stddev},
                     {"curve_fits", r.curve_fits}};
  if (!r.raw_knn_accuracies.empty()) {
    const auto [mean, sd] = mean_and_stddev(r.raw_knn_accuracies);
    doc["raw_knn"] = {{"accuracies", r.raw_knn_accuracies}, {"mean", mean}, {"std", sd}};
  }
  return doc;
}

/// seed,method,classifier,accuracy; the raw-space k-NN variant uses classifier "knn-raw".
inline void write_report_csv(std::ostream& out, const EvalReport& r) {
  out << "seed,method,classifier,accuracy\n";
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    out << r.seeds[i] << ',' << to_string(r.method) << ',' << to_string(r.classifier) << ','
        << format_real(r.accuracies[i]) << '\n';
  }
  for (std::size_t i = 0; i < r.raw_knn_accuracies.size(); ++i) {
    out << r.seeds[i] << ',' << to_string(r.method) << ",knn-raw," << format_real(r.raw_knn_accuracies[i]) << '\n';
  }
}

}  // namespace geocurve
