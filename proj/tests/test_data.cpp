#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "test_support.hpp"

namespace iadt {
namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

TEST(LoadCsv, ParsesBasicFile) {
  const Dataset ds = parse(
      "subject_id,domain,label,a,b,c\n"
      "s1,source,1,1.5,2,3\n"
      "s2,SOURCE,0,-1,0,1e3\n"
      "t1,Target,NA,0,0,0\n"
      "t2,target,1,4,5,6\r\n");
  EXPECT_EQ(ds.size(), 4u);
  EXPECT_EQ(ds.feature_count(), 3u);
  EXPECT_EQ(ds.feature_names, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(ds.samples[1].domain, Domain::source);
  EXPECT_EQ(ds.samples[1].features[2], 1000.0);
  EXPECT_EQ(ds.samples[2].domain, Domain::target);
  EXPECT_FALSE(ds.samples[2].label.has_value());
  EXPECT_EQ(ds.samples[3].label, 1);
}

TEST(LoadCsv, NonNumericFeatureCitesRow) {
  std::string text = "subject_id,domain,label,f1,f2\n";
  for (int i = 1; i <= 6; ++i) text += "s" + std::to_string(i) + ",source,0,1,2\n";
  text += "s7,source,0,1,abc\n";
  try {
    parse(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 7"), std::string::npos) << msg;
    EXPECT_NE(msg.find("f2"), std::string::npos) << msg;
  }
}

TEST(LoadCsv, ContractViolations) {
  EXPECT_THROW(parse("id,domain,label,a\n"), ParseError);
  EXPECT_THROW(parse("subject_id,domain,label,a\ns1,elsewhere,0,1\n"), ParseError);
  EXPECT_THROW(parse("subject_id,domain,label,a\ns1,source,2,1\n"), ParseError);
  EXPECT_THROW(parse("subject_id,domain,label,a\ns1,source,1,1\ns1,source,0,2\n"), ParseError);
  EXPECT_THROW(parse("subject_id,domain,label,a,a\ns1,source,1,1,2\n"), ParseError);
  EXPECT_THROW(parse("subject_id,domain,label,a,b\ns1,source,1,1\n"), ParseError);
  EXPECT_THROW(parse("subject_id,domain,label,a\ns1,source,1,nan\n"), ParseError);
  // The same id may appear once per domain.
  EXPECT_NO_THROW(parse("subject_id,domain,label,a\ns1,source,1,1\ns1,target,NA,2\n"));
  EXPECT_THROW(load_csv("/nonexistent/file.csv"), IoError);
}

TEST(LoadCsv, SynthWriteBackRoundTrips) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SynthSpec spec;
    spec.n_source = 10;
    spec.n_target = 6;
    spec.dim = 5;
    spec.seed = seed;
    spec.shift = Vector(5, 0.3);
    spec.rotation = 0.7;
    auto [s, t] = synth_domains(spec);
    t.samples[0].label.reset();
    const Dataset all = concat(s, t);
    std::ostringstream out;
    write_csv(out, all);
    std::istringstream in(out.str());
    EXPECT_EQ(parse_csv(in), all);
  }
}

TEST(Standardizer, TwoPointAndConstantColumns) {
  Dataset ds{{"a", "b"}, {}, false};
  ds.samples.push_back({"x", Domain::source, 1, {0.0, 5.0}});
  ds.samples.push_back({"y", Domain::source, 0, {2.0, 5.0}});
  const FeatureStats st = fit_standardizer(ds);
  EXPECT_DOUBLE_EQ(st.means[0], 1.0);
  EXPECT_DOUBLE_EQ(st.sds[0], std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(st.sds[1], 1e-8);
  ds.samples.pop_back();
  EXPECT_THROW(fit_standardizer(ds), ParameterError);
}

TEST(Standardizer, MatchesTwoPassOracleAndCentersColumns) {
  const Matrix x = testing::random_matrix(20, 4, 7, 3.0);
  Dataset ds{{"a", "b", "c", "d"}, {}, false};
  for (std::size_t i = 0; i < 20; ++i) {
    ds.samples.push_back({"s" + std::to_string(i), Domain::source, 0,
                          Vector(x.row(i).begin(), x.row(i).end())});
  }
  const FeatureStats st = fit_standardizer(ds);
  for (std::size_t j = 0; j < 4; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < 20; ++i) m += x(i, j);
    m /= 20.0;
    double v = 0.0;
    for (std::size_t i = 0; i < 20; ++i) v += (x(i, j) - m) * (x(i, j) - m);
    EXPECT_NEAR(st.means[j], m, 1e-12);
    EXPECT_NEAR(st.sds[j], std::sqrt(v / 19.0), 1e-12);
  }
  const Dataset z = apply_standardizer(ds, st);
  EXPECT_TRUE(z.standardized);
  const FeatureStats again = fit_standardizer(z);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_LE(std::abs(again.means[j]), 1e-10);
    EXPECT_NEAR(again.sds[j], 1.0, 1e-8);
  }
  const Dataset same = apply_standardizer(ds, FeatureStats::identity(4));
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(same.samples[i].features, ds.samples[i].features);
  EXPECT_THROW(apply_standardizer(ds, FeatureStats::identity(3)), DimensionError);
}

TEST(Standardizer, TargetWithSourceStatsIsNotCentered) {
  SynthSpec spec;
  spec.dim = 3;
  spec.n_source = 40;
  spec.n_target = 40;
  spec.shift = {2.0, 0.0, 0.0};
  auto [s, t] = synth_domains(spec);
  const Dataset zt = apply_standardizer(t, fit_standardizer(s));
  double m = 0.0;
  for (const auto& smp : zt.samples) m += smp.features[0];
  EXPECT_GT(std::abs(m / 40.0), 0.5);
}

Dataset targets(std::size_t n) {
  Dataset ds{{"f"}, {}, false};
  for (std::size_t i = 0; i < n; ++i) {
    ds.samples.push_back({"t" + std::to_string(i), Domain::target, std::nullopt, {double(i)}});
  }
  return ds;
}

std::map<std::string, int> copy_counts(const Dataset& ds) {
  std::map<std::string, int> c;
  for (const auto& s : ds.samples) ++c[s.subject_id];
  return c;
}

TEST(DuplicateToBalance, CycleRuleCounts) {
  auto c = copy_counts(duplicate_to_balance(targets(2), 5, 1));
  std::multiset<int> counts;
  for (auto& [k, v] : c) counts.insert(v);
  EXPECT_EQ(counts, (std::multiset<int>{2, 3}));

  const Dataset perm = duplicate_to_balance(targets(7), 7, 3);
  EXPECT_EQ(copy_counts(perm).size(), 7u);

  const Dataset big = duplicate_to_balance(targets(76), 360, 9);
  EXPECT_EQ(big.size(), 360u);
  for (auto& [k, v] : copy_counts(big)) EXPECT_TRUE(v == 4 || v == 5) << k;

  EXPECT_THROW(duplicate_to_balance(targets(0), 5, 1), ParameterError);
  EXPECT_THROW(duplicate_to_balance(targets(5), 3, 1), ParameterError);
}

TEST(DuplicateToBalance, SizePropertyOverRandomInputs) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nt = 1 + rng() % 40;
    const std::size_t ns = nt + rng() % 200;
    const Dataset out = duplicate_to_balance(targets(nt), ns, rng());
    ASSERT_EQ(out.size(), ns);
    int lo = 1 << 30, hi = 0;
    for (auto& [k, v] : copy_counts(out)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    EXPECT_LE(hi - lo, 1);
    EXPECT_EQ(copy_counts(out).size(), nt);
  }
}

Dataset labeled(std::size_t pos, std::size_t neg) {
  Dataset ds{{"f"}, {}, false};
  for (std::size_t i = 0; i < pos + neg; ++i) {
    ds.samples.push_back({"s" + std::to_string(i), Domain::target, i < pos ? 1 : 0, {double(i)}});
  }
  return ds;
}

std::pair<std::size_t, std::size_t> class_counts(const Dataset& ds) {
  std::size_t p = 0, n = 0;
  for (const auto& s : ds.samples) (*s.label == 1 ? p : n)++;
  return {p, n};
}

TEST(SplitStratified, CeilingCounts) {
  auto [a, b] = split_stratified(labeled(24, 52), 0.1, 5);
  EXPECT_EQ(class_counts(a), (std::pair<std::size_t, std::size_t>{3, 6}));
  EXPECT_EQ(a.size() + b.size(), 76u);
  auto [c, d] = split_stratified(labeled(4, 4), 0.5, 5);
  EXPECT_EQ(class_counts(c), (std::pair<std::size_t, std::size_t>{2, 2}));
  auto [e, f] = split_stratified(labeled(15, 15), 0.1, 5);  // 0.1·30 style exact products
  EXPECT_EQ(class_counts(e), (std::pair<std::size_t, std::size_t>{2, 2}));
}

TEST(SplitStratified, DeterministicAndRejectsUnlabeled) {
  auto [a1, b1] = split_stratified(labeled(10, 12), 0.3, 77);
  auto [a2, b2] = split_stratified(labeled(10, 12), 0.3, 77);
  EXPECT_EQ(a1, a2);
  EXPECT_EQ(b1, b2);
  Dataset bad = labeled(3, 3);
  bad.samples[0].label.reset();
  EXPECT_THROW(split_stratified(bad, 0.5, 1), ParameterError);
  EXPECT_THROW(split_stratified(labeled(3, 3), 1.0, 1), ParameterError);
}

TEST(SplitStratified, DisjointAndCeilingPropertyOverFractions) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = 1 + rng() % 30, n = 1 + rng() % 30;
    const double f = u(rng);
    auto [a, b] = split_stratified(labeled(p, n), f, rng());
    std::set<std::string> ids;
    for (const auto& s : a.samples) ids.insert(s.subject_id);
    for (const auto& s : b.samples) EXPECT_FALSE(ids.count(s.subject_id));
    EXPECT_EQ(a.size() + b.size(), p + n);
    auto [ap, an] = class_counts(a);
    EXPECT_EQ(ap, static_cast<std::size_t>(std::ceil(f * double(p) - 1e-9)));
    EXPECT_EQ(an, static_cast<std::size_t>(std::ceil(f * double(n) - 1e-9)));
  }
}

TEST(SynthDomains, DeterministicAndValidated) {
  SynthSpec spec;
  spec.dim = 4;
  spec.n_source = 20;
  spec.n_target = 8;
  spec.seed = 42;
  auto a = synth_domains(spec);
  auto b = synth_domains(spec);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_EQ(a.first.feature_names[0], "roi_1");
  spec.dim = 90;
  EXPECT_EQ(synth_domains(spec).first.feature_names[66], "Precuneus_L");
  spec.dim = 1;
  EXPECT_THROW(synth_domains(spec), ParameterError);
  spec.dim = 4;
  spec.n_target = 3;
  EXPECT_THROW(synth_domains(spec), ParameterError);
  spec.n_target = 8;
  spec.shift = {1.0};
  EXPECT_THROW(synth_domains(spec), ParameterError);
}

TEST(SynthDomains, IdenticalDomainsHaveVanishingLinearMmd) {
  SynthSpec spec;
  spec.dim = 10;
  spec.n_source = 2000;
  spec.n_target = 2000;
  spec.class_sep = 2.0;
  spec.noise_sd = 0.5;
  spec.seed = 3;
  auto [s, t] = synth_domains(spec);
  // Monte-Carlo check with a hand-computed squared mean distance.
  const Matrix xs = s.features(), xt = t.features();
  double d2 = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    double ms = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < 2000; ++i) {
      ms += xs(i, j);
      mt += xt(i, j);
    }
    d2 += std::pow((ms - mt) / 2000.0, 2);
  }
  EXPECT_LE(d2, 0.05);
}

TEST(SynthDomains, RotationAndShiftMoveTheTarget) {
  SynthSpec spec;
  spec.dim = 3;
  spec.n_source = 400;
  spec.n_target = 400;
  spec.class_sep = 4.0;
  spec.noise_sd = 0.1;
  spec.rotation = M_PI / 2;
  spec.shift = {0.0, 0.0, 5.0};
  auto [s, t] = synth_domains(spec);
  // Positive class at +2·e₁ rotates to +2·e₂, then shifts along e₃.
  for (const auto& smp : t.samples) {
    if (*smp.label == 1) {
      EXPECT_NEAR(smp.features[1], 2.0, 0.6);
      EXPECT_NEAR(smp.features[0], 0.0, 0.6);
    }
    EXPECT_NEAR(smp.features[2], 5.0, 0.6);
  }
}

TEST(SynthDomains, WideSeparationIsLinearlySeparable) {
  SynthSpec spec;
  spec.dim = 8;
  spec.n_source = 400;
  spec.n_target = 400;
  spec.class_sep = 6.0;
  spec.noise_sd = 0.7;
  spec.seed = 11;
  auto [s, t] = synth_domains(spec);
  std::vector<int> y, yhat;
  for (const auto& smp : s.samples) {
    y.push_back(*smp.label);
    yhat.push_back(smp.features[0] > 0.0 ? 1 : 0);
  }
  EXPECT_GE(testing::bac_of(y, yhat), 0.99);
}

TEST(AalNames, AtlasIndices) {
  const auto names = default_feature_names(90);
  EXPECT_EQ(names[66], "Precuneus_L");     // 67
  EXPECT_EQ(names[85], "Temporal_Mid_R");  // 86
  EXPECT_EQ(names[54], "Fusiform_L");      // 55
  EXPECT_EQ(names[36], "Hippocampus_L");   // 37
  EXPECT_EQ(names[56], "Postcentral_L");   // 57
  EXPECT_EQ(names[43], "Calcarine_R");     // 44
  EXPECT_EQ(names[71], "Caudate_R");       // 72
  EXPECT_EQ(names[63], "SupraMarginal_R"); // 64
  EXPECT_EQ(names[82], "Temporal_Pole_Sup_L");  // 83
  EXPECT_EQ(names[60], "Parietal_Inf_L");  // 61
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), 90u);
}

}  // namespace
}  // namespace iadt
