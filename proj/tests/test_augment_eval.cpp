#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "geocurve/geocurve.hpp"
#include "geocurve/selfcheck.hpp"

using namespace geocurve;

namespace {

std::map<std::string, FittedCurve> toy_curves(std::initializer_list<std::string> labels, std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::string, FittedCurve> out;
  for (const auto& label : labels) {
    out.emplace(label, FittedCurve{label, gen::curve_with_angle(rng, 6, gen::uniform(rng, 0.3, 2.5)), {}, {}, 0, {}});
  }
  return out;
}

SynthData small_problem(SynthKind kind, std::uint64_t seed) {
  SynthConfig sc;
  sc.kind = kind;
  sc.classes = 4;
  sc.per_class = 4;
  sc.test_per_class = 30;
  sc.dim = 10;
  sc.noise = 0.05;
  sc.seed = seed;
  return synthesize(sc);
}

}  // namespace

TEST(SampleCurve, EmptyAndOnCurve) {
  Rng rng(1);
  const GeodesicCurve c = gen::curve_with_angle(rng, 12, 1.1);
  EXPECT_TRUE(sample_curve(c, 0, rng).empty());
  for (const auto& p : sample_curve(c, 500, rng)) ASSERT_LE(oracle::additivity_gap(c, p), 1e-9);
}

TEST(SampleCurve, PositionsAreUniform) {
  Rng rng(2);
  const GeodesicCurve c = gen::curve_with_angle(rng, 20, 0.8);
  double sum = 0.0;
  std::array<int, 10> bins{};
  const auto pts = sample_curve(c, 10000, rng);
  for (const auto& p : pts) {
    const double z = oracle::recover_z(c, p);
    sum += z;
    ++bins[std::min(9, static_cast<int>(z * 10))];
  }
  EXPECT_NEAR(sum / 10000.0, 0.5, 0.02);
  for (int b : bins) EXPECT_NEAR(b, 1000, 400);
}

TEST(AugmentDataset, CountsAndLabels) {
  const auto curves = toy_curves({"a", "b", "c"}, 3);
  const LabeledFeatureSet aug = augment_dataset(curves, 5, 99);
  EXPECT_EQ(aug.size(), 15u);
  for (const auto& label : {"a", "b", "c"}) EXPECT_EQ(aug.count(label), 5u);
  for (const auto& s : aug.samples) {
    EXPECT_TRUE(s.augmented);
    EXPECT_TRUE(curves.contains(s.label));
    EXPECT_LE(oracle::additivity_gap(curves.at(s.label).curve, PreShapeVector::trusted(s.x)), 1e-9);
  }
}

TEST(AugmentDataset, PerLabelStreams) {
  const auto curves = toy_curves({"a", "b", "c"}, 4);
  const LabeledFeatureSet all = augment_dataset(curves, 3, 7);
  const LabeledFeatureSet only_c = augment_dataset(curves, std::map<std::string, std::size_t>{{"c", 3}}, 7);
  std::vector<Vector> from_all;
  for (const auto& s : all.samples) {
    if (s.label == "c") from_all.push_back(s.x);
  }
  ASSERT_EQ(only_c.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(only_c.samples[i].x, from_all[i]);
}

TEST(AugmentDataset, MissingCurve) {
  const auto curves = toy_curves({"a"}, 5);
  try {
    augment_dataset(curves, std::map<std::string, std::size_t>{{"zebra", 2}}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingCurve);
  }
}

TEST(Mixup, BoundaryWeightsReturnMembers) {
  Rng rng(6);
  const auto a = gen::preshape(rng, 8), b = gen::preshape(rng, 8);
  EXPECT_LE((mix_pair(a, b, 0.0).coords() - b.coords()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((mix_pair(a, b, 1.0).coords() - a.coords()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Mixup, TwoMembersStayInTheirSpan) {
  Rng rng(7);
  const std::vector members{gen::preshape(rng, 9), gen::preshape(rng, 9)};
  Matrix basis(18, 2);
  basis.col(0) = members[0].coords();
  basis.col(1) = members[1].coords();
  const auto qr = basis.householderQr();
  const Matrix q = qr.householderQ() * Matrix::Identity(18, 2);
  const auto out = mixup_baseline(members, 4, rng);
  ASSERT_EQ(out.size(), 4u);
  for (const auto& p : out) {
    const Vector residual = p.coords() - q * (q.transpose() * p.coords());
    EXPECT_LE(residual.norm(), 1e-9);
    EXPECT_NO_THROW(PreShapeVector::checked(p.coords()));
  }
}

TEST(Mixup, NeedsTwoMembers) {
  Rng rng(8);
  try {
    mixup_baseline({gen::preshape(rng, 5)}, 3, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewSamples);
  }
}

TEST(Mixup, NeighborRestrictedPartners) {
  Rng rng(9);
  std::vector<PreShapeVector> members;
  for (int i = 0; i < 6; ++i) members.push_back(gen::preshape(rng, 7));
  const auto out = mixup_baseline(members, 20, rng, 2);
  EXPECT_EQ(out.size(), 20u);
}

TEST(Knn, ExactMemberWinsWithKOne) {
  Rng rng(10);
  LabeledFeatureSet train;
  for (int i = 0; i < 6; ++i) train.add(i % 2 ? "odd" : "even", gen::preshape(rng, 6).coords());
  for (const auto& s : train.samples) EXPECT_EQ(knn_predict(train, PreShapeVector::trusted(s.x), 1), s.label);
}

TEST(Knn, UnanimousTrainingSet) {
  Rng rng(11);
  LabeledFeatureSet train;
  for (int i = 0; i < 5; ++i) train.add("only", gen::preshape(rng, 6).coords());
  EXPECT_EQ(knn_predict(train, gen::preshape(rng, 6), 5), "only");
}

TEST(Knn, AntipodalClusters) {
  Rng rng(12);
  const GeodesicCurve c = gen::curve_with_angle(rng, 8, 1.0);
  const Vector center_a = c.start().coords();
  LabeledFeatureSet train;
  for (int i = 0; i < 5; ++i) {
    const GeodesicCurve spoke = make_curve(c.start(), gen::preshape(rng, 8));
    const Vector p = interp(spoke, 0.01 / spoke.theta()).coords();
    train.add("A", p);
    train.add("B", -p);
  }
  const GeodesicCurve away = make_curve(c.start(), gen::preshape(rng, 8));
  const PreShapeVector query = gamma(away, 0.1);
  EXPECT_EQ(knn_predict(train, query, 5), "A");
  EXPECT_NEAR(geodesic_distance(PreShapeVector::trusted(center_a), PreShapeVector::trusted(-center_a)),
              std::numbers::pi, 1e-12);
}

TEST(Knn, VoteTieGoesToSmallestLabel) {
  LabeledFeatureSet train;
  train.add("b", project(RawFeature{1, 2, 3, 4}).coords());
  train.add("a", project(RawFeature{4, 3, 2, 1}).coords());
  EXPECT_EQ(knn_predict(train, project(RawFeature{1, 2, 3, 5}), 2), "a");
}

TEST(Knn, PermutationInvariant) {
  Rng rng(13);
  LabeledFeatureSet train;
  for (int i = 0; i < 30; ++i) train.add("c" + std::to_string(i % 3), gen::preshape(rng, 6).coords());
  LabeledFeatureSet shuffled = train;
  std::shuffle(shuffled.samples.begin(), shuffled.samples.end(), rng);
  for (int q = 0; q < 50; ++q) {
    const auto query = gen::preshape(rng, 6);
    ASSERT_EQ(knn_predict(train, query, 5), knn_predict(shuffled, query, 5));
  }
}

TEST(Knn, EmptyTrainSet) {
  Rng rng(14);
  try {
    knn_predict(LabeledFeatureSet{}, gen::preshape(rng, 4), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyTrainSet);
  }
}

TEST(LinearHead, OriginalOnlyProbabilityOneIgnoresAugmented) {
  const SynthData d = small_problem(SynthKind::Geodesic, 15);
  const LabeledFeatureSet ps = project_all(d.train);
  const LabeledFeatureSet aug = project_all(d.test);
  LinearHeadConfig cfg;
  cfg.p_g = 1.0;
  cfg.epochs = 50;
  Rng r1(3), r2(3);
  const LinearHead with = train_linear_head(ps, aug, cfg, r1);
  const LinearHead without = train_linear_head(ps, LabeledFeatureSet{}, cfg, r2);
  EXPECT_EQ(with.weights, without.weights);
  EXPECT_EQ(with.bias, without.bias);
}

TEST(LinearHead, ZeroLambdaIgnoresAugmented) {
  const SynthData d = small_problem(SynthKind::Geodesic, 16);
  const LabeledFeatureSet ps = project_all(d.train);
  LinearHeadConfig cfg;
  cfg.p_g = 0.0;
  cfg.lambda = 0.0;
  cfg.epochs = 50;
  Rng r1(4), r2(4);
  EXPECT_EQ(train_linear_head(ps, project_all(d.test), cfg, r1).weights,
            train_linear_head(ps, LabeledFeatureSet{}, cfg, r2).weights);
}

TEST(LinearHead, AugmentedTermChangesTraining) {
  const SynthData d = small_problem(SynthKind::Geodesic, 17);
  const LabeledFeatureSet ps = project_all(d.train);
  LinearHeadConfig cfg;
  cfg.epochs = 50;
  Rng r1(5), r2(5);
  EXPECT_NE(train_linear_head(ps, project_all(d.test), cfg, r1).weights,
            train_linear_head(ps, LabeledFeatureSet{}, cfg, r2).weights);
}

TEST(LinearHead, SeparableDataIsFitExactly) {
  const SynthData d = small_problem(SynthKind::Gaussian, 18);
  const LabeledFeatureSet ps = project_all(d.train);
  Rng rng(6);
  const LinearHead head = train_linear_head(ps, LabeledFeatureSet{}, LinearHeadConfig{}, rng);
  EXPECT_EQ(accuracy(ps, [&](const Vector& x) { return head.predict(x); }), 1.0);
}

TEST(LinearHead, UnknownAugmentedLabel) {
  const SynthData d = small_problem(SynthKind::Gaussian, 19);
  const LabeledFeatureSet ps = project_all(d.train);
  LabeledFeatureSet aug;
  aug.add("stranger", ps.samples.front().x, true);
  Rng rng(7);
  try {
    train_linear_head(ps, aug, LinearHeadConfig{}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LabelMismatch);
  }
}

TEST(Evaluate, SingleSeedWithoutAugmentationIsPlainKnn) {
  const SynthData d = small_problem(SynthKind::Geodesic, 20);
  EvalConfig cfg;
  cfg.seeds = {3};
  const EvalReport r = evaluate(d.train, d.test, cfg);
  const LabeledFeatureSet train = project_all(d.train);
  const double plain = accuracy(project_all(d.test), [&](const Vector& x) {
    return knn_predict(train, PreShapeVector::trusted(x), 5);
  });
  ASSERT_EQ(r.accuracies.size(), 1u);
  EXPECT_EQ(r.accuracies[0], plain);
  EXPECT_EQ(r.stddev, 0.0);
  EXPECT_EQ(r.curve_fits, 0u);
  EXPECT_EQ(r.raw_knn_accuracies.size(), 1u);
}

TEST(Evaluate, DeterministicAcrossRunsAndThreads) {
  const SynthData d = small_problem(SynthKind::Geodesic, 21);
  EvalConfig cfg;
  cfg.method = AugmentMethod::Faagc;
  cfg.fit.epochs = 100;
  cfg.seeds = {0, 1, 2};
  const EvalReport a = evaluate(d.train, d.test, cfg);
  cfg.threads = 3;
  const EvalReport b = evaluate(d.train, d.test, cfg);
  EXPECT_EQ(a.accuracies, b.accuracies);
  EXPECT_EQ(a.curve_fits, 12u);
  for (double acc : a.accuracies) {
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
  }
}

TEST(Evaluate, LinearAndMixupVariantsRun) {
  const SynthData d = small_problem(SynthKind::Gaussian, 22);
  EvalConfig cfg;
  cfg.classifier = ClassifierKind::Linear;
  cfg.method = AugmentMethod::Mixup;
  cfg.seeds = {0, 1};
  cfg.head.epochs = 50;
  const EvalReport r = evaluate(d.train, d.test, cfg);
  EXPECT_EQ(r.accuracies.size(), 2u);
  EXPECT_TRUE(r.raw_knn_accuracies.empty());
}

TEST(Evaluate, TestLabelsMustBeKnown) {
  const SynthData d = small_problem(SynthKind::Gaussian, 23);
  LabeledFeatureSet test = d.test;
  test.samples.front().label = "unseen";
  try {
    evaluate(d.train, test, EvalConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LabelMismatch);
  }
}
