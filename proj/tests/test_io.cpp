#include <sstream>

#include <gtest/gtest.h>

#include "geocurve/io.hpp"
#include "geocurve/selfcheck.hpp"

using namespace geocurve;

namespace {

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_features(in);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

}  // namespace

TEST(FeatureCsv, ParsesRowsAndFlags) {
  std::istringstream in("label,f0,f1,f2\ncat,1,2,3\ndog,-1.5,0,2e-3\n");
  const LabeledFeatureSet s = read_features(in);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.samples[1].label, "dog");
  EXPECT_EQ(s.samples[1].x[2], 2e-3);
  EXPECT_FALSE(s.samples[0].augmented);

  std::istringstream flagged("label,p0,p1,augmented\na,0.5,-0.5,1\na,0.5,-0.5,0\n");
  const LabeledFeatureSet f = read_features(flagged);
  EXPECT_TRUE(f.samples[0].augmented);
  EXPECT_FALSE(f.samples[1].augmented);
  EXPECT_EQ(f.dim(), 2);
}

TEST(FeatureCsv, ErrorsNameTheLine) {
  EXPECT_NE(parse_error("label,f0,f1\na,1,2\nb,1\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("label,f0,f1\na,1,2\nb,1,2\nc,1,zz\n").find("line 4"), std::string::npos);
  EXPECT_NE(parse_error("label,f0,f1\na,1,nan\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("x,f0,f1\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error("label,f0\na,1\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error("label,p0,p1,augmented\na,1,2,yes\n").find("line 2"), std::string::npos);
  parse_error("");
  parse_error("label,f0,f1\n");
}

TEST(FeatureCsv, WriteReadRoundTripIsExact) {
  Rng rng(1);
  LabeledFeatureSet s;
  for (int i = 0; i < 20; ++i) s.add(i % 2 ? "a" : "b", gen::preshape(rng, 5).coords(), i % 3 == 0);
  std::stringstream buf;
  write_features(buf, s, 10, true);
  const LabeledFeatureSet back = read_features(buf);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back.samples[i].label, s.samples[i].label);
    EXPECT_EQ(back.samples[i].x, s.samples[i].x);
    EXPECT_EQ(back.samples[i].augmented, s.samples[i].augmented);
  }
}

TEST(FeatureCsv, HeaderOnlyWhenEmpty) {
  std::ostringstream out;
  write_features(out, LabeledFeatureSet{}, 3, true);
  EXPECT_EQ(out.str(), "label,p0,p1,p2,augmented\n");
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(-2.0), "-2");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_real(x)), x);
}

TEST(CurvesJson, RoundTripIsBitExact) {
  Rng rng(2);
  std::map<std::string, FittedCurve> curves;
  for (const auto& label : {"x", "y"}) {
    FittedCurve fc{label, gen::curve_with_angle(rng, 7, 1.3), {0.1, 0.2, 0.16, 0.3}, {1.0, 0.5, 0.25}, 1, {}};
    curves.emplace(label, fc);
  }
  const nlohmann::json doc = curves_to_json(curves, FitConfig{});
  EXPECT_EQ(doc.at("schema"), "geocurve.curves.v1");
  const auto back = curves_from_json(nlohmann::json::parse(doc.dump()));
  ASSERT_EQ(back.size(), 2u);
  for (const auto& [label, fc] : curves) {
    const FittedCurve& b = back.at(label);
    EXPECT_EQ(b.curve.start().coords(), fc.curve.start().coords());
    EXPECT_EQ(b.curve.end().coords(), fc.curve.end().coords());
    EXPECT_EQ(b.curve.theta(), fc.curve.theta());
    EXPECT_EQ(b.final_loss.total, fc.final_loss.total);
    EXPECT_EQ(b.loss_trace, fc.loss_trace);
    EXPECT_EQ(b.reperturb_events, 1);
  }
}

TEST(CurvesJson, RejectsBadDocuments) {
  Rng rng(3);
  std::map<std::string, FittedCurve> curves;
  curves.emplace("x", FittedCurve{"x", gen::curve_with_angle(rng, 4, 0.7), {}, {}, 0, {}});
  const nlohmann::json good = curves_to_json(curves, FitConfig{});

  auto expect_parse_error = [](const nlohmann::json& doc) {
    try {
      curves_from_json(doc);
      ADD_FAILURE() << doc.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    }
  };
  nlohmann::json bad = good;
  bad["schema"] = "other";
  expect_parse_error(bad);
  bad = good;
  bad["curves"][0]["tau_start"][0] = 5.0;
  expect_parse_error(bad);
  bad = good;
  bad["curves"][0]["theta"] = 3.0;
  expect_parse_error(bad);
  bad = good;
  bad["curves"][0].erase("tau_end");
  expect_parse_error(bad);
}

TEST(Report, JsonAndCsvLayout) {
  EvalReport r;
  r.method = AugmentMethod::None;
  r.classifier = ClassifierKind::Knn;
  r.k = 5;
  r.seeds = {0, 1};
  r.accuracies = {0.5, 0.75};
  r.raw_knn_accuracies = {0.25, 0.5};
  std::tie(r.mean, r.stddev) = mean_and_stddev(r.accuracies);
  const nlohmann::json doc = report_to_json(r);
  EXPECT_EQ(doc.at("schema"), "geocurve.eval.v1");
  EXPECT_EQ(doc.at("mean").get<double>(), 0.625);
  EXPECT_EQ(doc.at("std").get<double>(), 0.125);
  EXPECT_EQ(doc.at("raw_knn").at("mean").get<double>(), 0.375);
  std::ostringstream csv;
  write_report_csv(csv, r);
  EXPECT_EQ(csv.str(),
            "seed,method,classifier,accuracy\n0,none,knn,0.5\n1,none,knn,0.75\n0,none,knn-raw,0.25\n1,none,knn-raw,0.5\n");
}
