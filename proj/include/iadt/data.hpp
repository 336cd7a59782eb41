#ifndef IADT_DATA_HPP
#define IADT_DATA_HPP

// ROI feature datasets: CSV ingestion and write-back, z-scoring, target
// duplication, stratified splits and a synthetic two-domain generator.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iadt/aal.hpp"
#include "iadt/errors.hpp"
#include "iadt/numerics.hpp"

namespace iadt {

enum class Domain { source, target };

inline std::string_view to_string(Domain d) { return d == Domain::source ? "source" : "target"; }

struct Sample {
  std::string subject_id;
  Domain domain = Domain::source;
  std::optional<int> label;  // 1 = AD / pSCD (positive class), 0 = NC / sSCD
  Vector features;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Sample> samples;
  bool standardized = false;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  std::size_t feature_count() const noexcept { return feature_names.size(); }

  Matrix features() const {
    Matrix x(samples.size(), feature_count());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      std::copy(samples[i].features.begin(), samples[i].features.end(), x.row(i).begin());
    }
    return x;
  }

  bool all_labeled() const {
    return std::all_of(samples.begin(), samples.end(),
                       [](const Sample& s) { return s.label.has_value(); });
  }

  /// Labels as 0/1 ints; throws DataError if any sample is unlabeled.
  std::vector<int> labels() const {
    std::vector<int> y;
    y.reserve(samples.size());
    for (const auto& s : samples) {
      if (!s.label) throw DataError("sample '" + s.subject_id + "' has no label");
      y.push_back(*s.label);
    }
    return y;
  }

  Dataset with_samples(std::vector<Sample> s) const {
    return Dataset{feature_names, std::move(s), standardized};
  }

  Dataset subset(std::span<const std::size_t> idx) const {
    std::vector<Sample> s;
    s.reserve(idx.size());
    for (std::size_t i : idx) s.push_back(samples[i]);
    return with_samples(std::move(s));
  }

  Dataset domain(Domain d) const {
    std::vector<Sample> s;
    for (const auto& x : samples)
      if (x.domain == d) s.push_back(x);
    return with_samples(std::move(s));
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Concatenation; feature names must agree.
inline Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.feature_names != b.feature_names) throw DimensionError("concat: feature names differ");
  Dataset out = a;
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  return out;
}

struct FeatureStats {
  Vector means;
  Vector sds;

  static FeatureStats identity(std::size_t d) { return {Vector(d, 0.0), Vector(d, 1.0)}; }
  std::size_t size() const noexcept { return means.size(); }
  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

inline constexpr double kSdFloor = 1e-8;

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string where(std::size_t data_row, std::string_view column) {
  return "row " + std::to_string(data_row) + " (line " + std::to_string(data_row + 1) +
         "), column '" + std::string(column) + "'";
}

}  // namespace detail

/// Parses the dataset CSV format from a stream. Rows are numbered from 1
/// after the header; errors cite the row and column.
inline Dataset parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto header = detail::split_commas(line);
  static constexpr std::array<std::string_view, 3> kMeta = {"subject_id", "domain", "label"};
  if (header.size() < 4) throw ParseError("header: need subject_id,domain,label and >= 1 feature");
  for (std::size_t i = 0; i < kMeta.size(); ++i) {
    if (detail::trim(header[i]) != kMeta[i]) {
      throw ParseError("header: column " + std::to_string(i + 1) + " must be '" +
                       std::string(kMeta[i]) + "', found '" + std::string(header[i]) + "'");
    }
  }
  Dataset ds;
  std::set<std::string> seen_names;
  for (std::size_t i = 3; i < header.size(); ++i) {
    std::string name(detail::trim(header[i]));
    if (name.empty()) throw ParseError("header: empty feature name in column " + std::to_string(i + 1));
    if (!seen_names.insert(name).second) throw ParseError("header: duplicate feature '" + name + "'");
    ds.feature_names.push_back(std::move(name));
  }

  std::set<std::pair<Domain, std::string>> seen_ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_commas(line);
    if (cells.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + " (line " + std::to_string(row + 1) +
                       "): expected " + std::to_string(header.size()) + " columns, found " +
                       std::to_string(cells.size()));
    }
    Sample s;
    s.subject_id = std::string(detail::trim(cells[0]));
    if (s.subject_id.empty()) throw ParseError(detail::where(row, "subject_id") + ": empty id");
    const std::string dom = detail::lower(detail::trim(cells[1]));
    if (dom == "source") {
      s.domain = Domain::source;
    } else if (dom == "target") {
      s.domain = Domain::target;
    } else {
      throw ParseError(detail::where(row, "domain") + ": unknown domain '" +
                       std::string(cells[1]) + "'");
    }
    const std::string_view lab = detail::trim(cells[2]);
    if (lab == "0" || lab == "1") {
      s.label = lab == "1" ? 1 : 0;
    } else if (lab != "NA") {
      throw ParseError(detail::where(row, "label") + ": expected 0, 1 or NA, found '" +
                       std::string(lab) + "'");
    }
    s.features.reserve(ds.feature_names.size());
    for (std::size_t c = 3; c < cells.size(); ++c) {
      auto v = detail::parse_double(cells[c]);
      if (!v) {
        throw ParseError(detail::where(row, ds.feature_names[c - 3]) + ": non-numeric feature '" +
                         std::string(cells[c]) + "'");
      }
      s.features.push_back(*v);
    }
    if (!seen_ids.emplace(s.domain, s.subject_id).second) {
      throw ParseError(detail::where(row, "subject_id") + ": duplicate id '" + s.subject_id +
                       "' in " + std::string(to_string(s.domain)) + " domain");
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

inline Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return parse_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_csv(std::ostream& out, const Dataset& ds) {
  out << "subject_id,domain,label";
  for (const auto& n : ds.feature_names) out << ',' << n;
  out << '\n';
  for (const auto& s : ds.samples) {
    out << s.subject_id << ',' << to_string(s.domain) << ','
        << (s.label ? std::to_string(*s.label) : std::string("NA"));
    for (double v : s.features) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

inline void save_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_csv(out, ds);
  if (!out) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Standardization

inline FeatureStats fit_standardizer(const Dataset& ds) {
  if (ds.size() < 2) throw ParameterError("fit_standardizer: need at least 2 samples");
  const std::size_t d = ds.feature_count();
  FeatureStats st{Vector(d, 0.0), Vector(d, 0.0)};
  for (const auto& s : ds.samples)
    for (std::size_t j = 0; j < d; ++j) st.means[j] += s.features[j];
  const double n = static_cast<double>(ds.size());
  for (double& m : st.means) m /= n;
  for (const auto& s : ds.samples)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = s.features[j] - st.means[j];
      st.sds[j] += c * c;
    }
  for (double& v : st.sds) v = std::max(std::sqrt(v / (n - 1.0)), kSdFloor);
  return st;
}

inline Matrix standardize(const Matrix& x, const FeatureStats& st) {
  if (x.cols() != st.size()) {
    throw DimensionError("standardize: " + std::to_string(x.cols()) + " features vs stats of " +
                         std::to_string(st.size()));
  }
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t j = 0; j < x.cols(); ++j) row[j] = (row[j] - st.means[j]) / st.sds[j];
  }
  return out;
}

inline Dataset apply_standardizer(const Dataset& ds, const FeatureStats& st) {
  if (ds.feature_count() != st.size() || st.sds.size() != st.means.size()) {
    throw DimensionError("apply_standardizer: feature count mismatch");
  }
  Dataset out = ds;
  for (auto& s : out.samples) {
    if (s.features.size() != st.size()) throw DimensionError("apply_standardizer: sample length");
    for (std::size_t j = 0; j < st.size(); ++j) {
      s.features[j] = (s.features[j] - st.means[j]) / st.sds[j];
    }
  }
  out.standardized = true;
  return out;
}

// ---------------------------------------------------------------------------
// Resampling

/// Seeded shuffle of the target list, then cycled until `n_source` samples.
inline Dataset duplicate_to_balance(const Dataset& target, std::size_t n_source,
                                    std::uint64_t seed) {
  if (target.empty()) throw ParameterError("duplicate_to_balance: empty target");
  if (n_source < target.size()) {
    throw ParameterError("duplicate_to_balance: n_source " + std::to_string(n_source) +
                         " < target size " + std::to_string(target.size()));
  }
  std::vector<std::size_t> perm(target.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Sample> out;
  out.reserve(n_source);
  for (std::size_t i = 0; i < n_source; ++i) out.push_back(target.samples[perm[i % perm.size()]]);
  return target.with_samples(std::move(out));
}

/// Per class c, ⌈fraction·n_c⌉ seeded-random samples go to the first part.
/// Both parts keep the original sample order.
inline std::pair<Dataset, Dataset> split_stratified(const Dataset& ds, double fraction,
                                                    std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ParameterError("split_stratified: fraction must lie in (0, 1)");
  }
  if (!ds.all_labeled()) throw ParameterError("split_stratified: unlabeled sample present");
  std::mt19937_64 rng(seed);
  std::vector<bool> first(ds.size(), false);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (*ds.samples[i].label == cls) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    // The 1e-9 guard keeps exact products such as 0.1·30 from rounding up.
    const auto take = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(idx.size()) - 1e-9));
    for (std::size_t k = 0; k < std::min(take, idx.size()); ++k) first[idx[k]] = true;
  }
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < ds.size(); ++i) (first[i] ? a : b).push_back(i);
  return {ds.subset(a), ds.subset(b)};
}

// ---------------------------------------------------------------------------
// Synthetic domains

struct SynthSpec {
  std::size_t n_source = 400;
  std::size_t n_target = 200;
  Vector shift;  // empty = no shift; otherwise length dim
  double rotation = 0.0;
  double class_sep = 4.0;
  double noise_sd = 0.7;
  std::size_t dim = 90;
  std::uint64_t seed = 0;
};

/// Two Gaussian classes at ±(class_sep/2)·e₁ per domain. The target copy is
/// rotated in the (e₁, e₂) plane and then translated by `shift`. Labels
/// alternate 1, 0, 1, ... so both domains are balanced.
inline std::pair<Dataset, Dataset> synth_domains(const SynthSpec& spec) {
  if (spec.dim < 2) throw ParameterError("synth_domains: dim must be >= 2");
  if (spec.n_source < 4 || spec.n_target < 4) {
    throw ParameterError("synth_domains: need at least 4 samples per domain");
  }
  if (spec.n_source % 2 != 0 || spec.n_target % 2 != 0) {
    throw ParameterError("synth_domains: sample counts must be even for balanced classes");
  }
  if (!spec.shift.empty() && spec.shift.size() != spec.dim) {
    throw ParameterError("synth_domains: shift length " + std::to_string(spec.shift.size()) +
                         " != dim " + std::to_string(spec.dim));
  }
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.class_sep) || !std::isfinite(spec.rotation)) {
    throw ParameterError("synth_domains: invalid noise/separation/rotation");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto names = default_feature_names(spec.dim);
  const double c = std::cos(spec.rotation);
  const double s = std::sin(spec.rotation);

  auto make = [&](std::size_t n, Domain dom) {
    Dataset ds{names, {}, false};
    ds.samples.reserve(n);
    const char prefix = dom == Domain::source ? 'S' : 'T';
    for (std::size_t i = 0; i < n; ++i) {
      Sample smp;
      char id[32];
      std::snprintf(id, sizeof id, "%c%05zu", prefix, i + 1);
      smp.subject_id = id;
      smp.domain = dom;
      const int label = i % 2 == 0 ? 1 : 0;
      smp.label = label;
      smp.features.resize(spec.dim);
      for (double& v : smp.features) v = spec.noise_sd * noise(rng);
      smp.features[0] += (label == 1 ? 0.5 : -0.5) * spec.class_sep;
      if (dom == Domain::target) {
        const double x0 = smp.features[0];
        const double x1 = smp.features[1];
        smp.features[0] = c * x0 - s * x1;
        smp.features[1] = s * x0 + c * x1;
        if (!spec.shift.empty())
          for (std::size_t j = 0; j < spec.dim; ++j) smp.features[j] += spec.shift[j];
      }
      ds.samples.push_back(std::move(smp));
    }
    return ds;
  };
  Dataset src = make(spec.n_source, Domain::source);
  Dataset tgt = make(spec.n_target, Domain::target);
  return {std::move(src), std::move(tgt)};
}

}  // namespace iadt

#endif  // IADT_DATA_HPP
