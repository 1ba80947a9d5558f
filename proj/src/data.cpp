#include "ckl/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ckl/errors.hpp"

namespace ckl {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % bound;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

bool Dataset::has_both_classes() const {
  return (y.array() > 0).any() && (y.array() < 0).any();
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.name = name;
  out.seed = seed;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
    out.y(static_cast<Eigen::Index>(r)) = y(rows[r]);
  }
  return out;
}

double sine_mixture(double x) {
  return std::sin(std::sqrt(2.0) * x) + std::sin(std::sqrt(12.0) * x) + std::sin(std::sqrt(60.0) * x);
}

namespace {

template <typename Draw>
Dataset draw_set(Rng& rng, Eigen::Index n, Eigen::Index d, const std::string& name, std::uint64_t seed, Draw draw) {
  Dataset ds;
  ds.name = name;
  ds.seed = seed;
  ds.X.resize(n, d);
  ds.y.resize(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) draw(rng, ds.X.row(i), ds.y(i));
  } while (n >= 2 && !ds.has_both_classes());
  return ds;
}

}  // namespace

Splits gen_sine_mixture(std::uint64_t seed, Eigen::Index n_train, Eigen::Index n_val, Eigen::Index n_test) {
  Rng rng(seed);
  const auto draw = [](Rng& r, auto row, double& label) {
    double x = 0.0;
    double f = 0.0;
    do {
      x = r.uniform(-10.0, 10.0);
      f = sine_mixture(x);
    } while (f == 0.0);
    row(0) = x;
    label = f > 0.0 ? 1.0 : -1.0;
  };
  Splits s;
  s.train = draw_set(rng, n_train, 1, "sine-mixture", seed, draw);
  s.val = draw_set(rng, n_val, 1, "sine-mixture", seed, draw);
  s.test = draw_set(rng, n_test, 1, "sine-mixture", seed, draw);
  return s;
}

Vector relevance_vector(double gamma, Eigen::Index d) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("relevance_vector: gamma must be non-negative");
  Vector theta(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    theta(i) = std::pow(static_cast<double>(i + 1) / static_cast<double>(d), gamma);
  }
  return theta;
}

Splits gen_gauss50(double gamma, std::uint64_t seed, double rho, Eigen::Index d, Eigen::Index n_train,
                   Eigen::Index n_val, Eigen::Index n_test) {
  const Vector theta = relevance_vector(gamma, d);
  const Vector mean = rho * theta / theta.norm();
  Rng rng(seed);
  const auto draw = [&](Rng& r, auto row, double& label) {
    label = r.uniform() < 0.5 ? 1.0 : -1.0;
    for (Eigen::Index k = 0; k < d; ++k) row(k) = label * mean(k) + r.normal();
  };
  std::ostringstream name;
  name << "gauss" << d << "-gamma" << gamma;
  Splits s;
  s.train = draw_set(rng, n_train, d, name.str(), seed, draw);
  s.val = draw_set(rng, n_val, d, name.str(), seed, draw);
  s.test = draw_set(rng, n_test, d, name.str(), seed, draw);
  return s;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& label_column, const std::string& positive_label,
                 const std::string& name) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.emplace_back(line_no, split_fields(line));
  }
  if (rows.empty()) throw ParseError("csv: no data", line_no);

  const auto index = parse_index(label_column);
  std::size_t label_idx = 0;
  bool has_header = false;
  const auto& first = rows.front().second;
  if (index) {
    label_idx = *index;
    if (label_idx >= first.size()) throw std::invalid_argument("csv: label column " + label_column + " does not exist");
    for (std::size_t k = 0; k < first.size(); ++k) {
      if (k != label_idx && !parse_double(first[k])) has_header = true;
    }
  } else {
    has_header = true;
    bool found = false;
    for (std::size_t k = 0; k < first.size(); ++k) {
      if (first[k] == label_column) {
        label_idx = k;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("csv: no column named '" + label_column + "'");
  }

  const std::size_t begin = has_header ? 1 : 0;
  const std::size_t width = first.size();
  const auto n = static_cast<Eigen::Index>(rows.size() - begin);
  if (n < 1) throw ParseError("csv: header without data rows", rows.front().first);
  Dataset ds;
  ds.name = name;
  ds.X.resize(n, static_cast<Eigen::Index>(width - 1));
  ds.y.resize(n);
  for (std::size_t r = begin; r < rows.size(); ++r) {
    const auto& [lno, fields] = rows[r];
    if (fields.size() != width) {
      throw ParseError("csv: expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()),
                       lno);
    }
    const auto i = static_cast<Eigen::Index>(r - begin);
    Eigen::Index col = 0;
    for (std::size_t k = 0; k < width; ++k) {
      if (k == label_idx) continue;
      const auto v = parse_double(fields[k]);
      if (!v) throw ParseError("csv: cannot parse '" + fields[k] + "' as a number", lno);
      ds.X(i, col++) = *v;
    }
    const auto& raw = fields[label_idx];
    const auto numeric_label = parse_double(raw);
    const auto numeric_positive = parse_double(positive_label);
    const bool positive =
        numeric_label && numeric_positive ? *numeric_label == *numeric_positive : raw == positive_label;
    ds.y(i) = positive ? 1.0 : -1.0;
  }
  if (!ds.has_both_classes()) throw std::invalid_argument("csv: labels map to a single class");
  return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_column, const std::string& positive_label) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in, label_column, positive_label, path);
}

void write_csv(std::ostream& out, const Dataset& ds) {
  for (Eigen::Index k = 0; k < ds.X.cols(); ++k) out << 'x' << (k + 1) << ',';
  out << "label\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
    for (Eigen::Index k = 0; k < ds.X.cols(); ++k) out << ds.X(i, k) << ',';
    out << (ds.y(i) > 0 ? 1 : -1) << '\n';
  }
}

Splits split(const Dataset& ds, const SplitSpec& spec) {
  if (spec.n_train < 1 || spec.n_val < 1 || spec.n_test < 1) {
    throw std::invalid_argument("split: every part needs at least one row");
  }
  if (spec.n_train + spec.n_val + spec.n_test > ds.size()) {
    throw std::invalid_argument("split: requested more rows than the dataset has");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  Rng rng(spec.seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto take = [&](std::size_t from, Eigen::Index count) {
    return ds.subset({order.begin() + static_cast<std::ptrdiff_t>(from),
                      order.begin() + static_cast<std::ptrdiff_t>(from) + count});
  };
  Splits s;
  s.train = take(0, spec.n_train);
  s.val = take(static_cast<std::size_t>(spec.n_train), spec.n_val);
  s.test = take(static_cast<std::size_t>(spec.n_train + spec.n_val), spec.n_test);
  return s;
}

}  // namespace ckl
