#pragma once

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <iterator>
#include <map>
#include <stdexcept>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bellsim/chsh.hpp"
#include "bellsim/montecarlo.hpp"

namespace bellsim {

/// Parse failure with the 1-based line it occurred on.
struct ParseError : std::runtime_error {
  ParseError(std::size_t line_number, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_number) + ": " +
                           message),
        line(line_number) {}
  std::size_t line;
};

/// 17 significant digits: enough to reproduce any double bit-exactly.
inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

inline constexpr std::string_view kCurveCsvHeader = "beta,corr,stderr,n";

inline void write_curve_csv(std::ostream& os, const CorrelationCurve& curve) {
  os << kCurveCsvHeader << '\n';
  for (const CurvePoint& p : curve.points) {
    os << format_double(p.beta) << ',' << format_double(p.est.mean) << ','
       << format_double(p.est.std_error) << ',' << p.est.n << '\n';
  }
}

inline std::string curve_to_csv(const CorrelationCurve& curve) {
  std::ostringstream os;
  write_curve_csv(os, curve);
  return os.str();
}

namespace detail {

inline double parse_double_field(std::string_view token, std::size_t line,
                                 std::string_view what) {
  const std::string t(token);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || t.empty() || errno == ERANGE) {
    throw ParseError(line, "bad " + std::string(what) + " value '" + t + "'");
  }
  return v;
}

inline unsigned long long parse_count_field(std::string_view token,
                                            std::size_t line,
                                            std::string_view what) {
  const std::string t(token);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || t.empty() || errno == ERANGE) {
    throw ParseError(line, "bad " + std::string(what) + " value '" + t + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  return line;
}

}  // namespace detail

/// Reads a curve CSV back. Enforces the file invariants: exact header,
/// strictly increasing beta column, corr within [-1, 1].
/// Throws ParseError with the offending line number.
inline CorrelationCurve parse_curve_csv(std::istream& is) {
  CorrelationCurve curve;
  std::string raw;
  std::size_t line_no = 0;

  if (!std::getline(is, raw)) {
    throw ParseError(1, "missing header");
  }
  ++line_no;
  if (detail::strip_cr(raw) != kCurveCsvHeader) {
    throw ParseError(line_no, "expected header '" +
                                  std::string(kCurveCsvHeader) + "'");
  }

  double prev_beta = 0.0;
  bool have_prev = false;
  while (std::getline(is, raw)) {
    ++line_no;
    const std::string_view line = detail::strip_cr(raw);
    if (line.empty()) {
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 comma-separated fields");
    }
    CurvePoint p;
    p.beta = detail::parse_double_field(fields[0], line_no, "beta");
    p.est.mean = detail::parse_double_field(fields[1], line_no, "corr");
    p.est.std_error = detail::parse_double_field(fields[2], line_no, "stderr");
    p.est.n = static_cast<std::size_t>(
        detail::parse_count_field(fields[3], line_no, "n"));
    if (!std::isfinite(p.beta)) {
      throw ParseError(line_no, "beta must be finite");
    }
    if (!(p.est.mean >= -1.0 && p.est.mean <= 1.0)) {
      throw ParseError(line_no, "corr must lie in [-1, 1]");
    }
    if (have_prev && !(p.beta > prev_beta)) {
      throw ParseError(line_no, "beta column must be strictly increasing");
    }
    prev_beta = p.beta;
    have_prev = true;
    curve.points.push_back(p);
  }
  return curve;
}

/// One recorded measurement event: settings and the +-1 outcome at each wing.
struct OutcomeRecord {
  double alpha = 0.0;
  double beta = 0.0;
  int x = 0;
  int y = 0;
};

/// Event files are plain text, one `alpha beta x y` record per line,
/// '#' starts a comment.
inline void write_outcome_records(std::ostream& os,
                                  std::span<const OutcomeRecord> records) {
  for (const OutcomeRecord& r : records) {
    os << format_double(r.alpha) << ' ' << format_double(r.beta) << ' ' << r.x
       << ' ' << r.y << '\n';
  }
}

inline std::vector<OutcomeRecord> parse_outcome_records(std::istream& is) {
  std::vector<OutcomeRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string_view line = detail::strip_cr(raw);
    if (const std::size_t hash = line.find('#');
        hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
      }
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
      }
      if (i > start) {
        tokens.push_back(line.substr(start, i - start));
      }
    }
    if (tokens.empty()) {
      continue;
    }
    if (tokens.size() != 4) {
      throw ParseError(line_no, "expected 'alpha beta x y'");
    }
    OutcomeRecord r;
    r.alpha = detail::parse_double_field(tokens[0], line_no, "alpha");
    r.beta = detail::parse_double_field(tokens[1], line_no, "beta");
    if (!std::isfinite(r.alpha) || !std::isfinite(r.beta)) {
      throw ParseError(line_no, "angles must be finite");
    }
    const auto parse_outcome = [&](std::string_view token) {
      if (token == "1" || token == "+1") {
        return 1;
      }
      if (token == "-1") {
        return -1;
      }
      throw ParseError(line_no,
                       "outcome must be +1 or -1, got '" + std::string(token) +
                           "'");
    };
    r.x = parse_outcome(tokens[2]);
    r.y = parse_outcome(tokens[3]);
    records.push_back(r);
  }
  return records;
}

/// Per-setting correlation estimate extracted from an event file.
struct SettingGroup {
  double alpha = 0.0;
  double beta = 0.0;
  EstimatedCorrelation est{};
};

/// Grouped per-setting estimates; `chsh` is present when the distinct
/// settings form exactly a 2x2 quadruple {a, a'} x {b, b'}.
struct AnalysisResult {
  std::vector<SettingGroup> groups;
  std::optional<ChshResult> chsh;
};

/// Groups records by exact (alpha, beta) and estimates each group's
/// correlation. Groups are ordered by (alpha, beta). Throws
/// std::domain_error when there are no records.
inline AnalysisResult analyze_records(std::span<const OutcomeRecord> records) {
  if (records.empty()) {
    throw std::domain_error("analyze_records: no records");
  }
  struct Accum {
    long long product_sum = 0;
    std::size_t n = 0;
  };
  std::map<std::pair<double, double>, Accum> by_setting;
  for (const OutcomeRecord& r : records) {
    Accum& acc = by_setting[{r.alpha, r.beta}];
    acc.product_sum += static_cast<long long>(r.x) * r.y;
    ++acc.n;
  }

  AnalysisResult result;
  std::map<double, std::size_t> alphas;
  std::map<double, std::size_t> betas;
  for (const auto& [key, acc] : by_setting) {
    SettingGroup g;
    g.alpha = key.first;
    g.beta = key.second;
    g.est = correlation_from_product_sum(acc.product_sum, acc.n);
    result.groups.push_back(g);
    ++alphas[key.first];
    ++betas[key.second];
  }

  if (alphas.size() == 2 && betas.size() == 2 && by_setting.size() == 4) {
    const double a = alphas.begin()->first;
    const double a_prime = std::next(alphas.begin())->first;
    const double b = betas.begin()->first;
    const double b_prime = std::next(betas.begin())->first;
    const auto e = [&](double x, double y) {
      return correlation_from_product_sum(by_setting.at({x, y}).product_sum,
                                          by_setting.at({x, y}).n)
          .mean;
    };
    ChshResult r;
    r.settings = ChshSettings{Angle{a}, Angle{a_prime}, Angle{b},
                              Angle{b_prime}};
    r.e_ab = e(a, b);
    r.e_ab_prime = e(a, b_prime);
    r.e_a_prime_b = e(a_prime, b);
    r.e_a_prime_b_prime = e(a_prime, b_prime);
    r.s = r.e_ab - r.e_ab_prime + r.e_a_prime_b + r.e_a_prime_b_prime;
    result.chsh = r;
  }
  return result;
}

}  // namespace bellsim
