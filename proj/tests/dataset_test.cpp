#include "ghost/dataset.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

namespace ghost {
namespace {

using testing::TempDir;
using testing::write_text;

TEST(LoadCsv, ParsesFeaturesAndLabels) {
  TempDir dir("load");
  write_text(dir / "d.csv", "f1,f2,label\n1,2,0\n3.5,-4,1\n5e-1,6,0\n");
  const Dataset d = load_csv(dir / "d.csv");
  ASSERT_EQ(d.rows(), 3u);
  ASSERT_EQ(d.cols(), 2u);
  EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"f1", "f2"}));
  EXPECT_EQ(d.labels(), (std::vector<int>{0, 1, 0}));
  EXPECT_DOUBLE_EQ(d.features()(1, 0), 3.5);
  EXPECT_DOUBLE_EQ(d.features()(1, 1), -4.0);
  EXPECT_DOUBLE_EQ(d.features()(2, 0), 0.5);
}

TEST(LoadCsv, LabelOutsideBinaryNamesRow) {
  TempDir dir("load");
  write_text(dir / "d.csv", "f1,label\n1,0\n2,2\n");
  try {
    load_csv(dir / "d.csv");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, NonNumericCellNamesRowAndColumn) {
  TempDir dir("load");
  write_text(dir / "d.csv", "f1,f2,label\n1,2,0\nabc,2,1\n");
  try {
    load_csv(dir / "d.csv");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("\"f1\""), std::string::npos) << msg;
  }
}

TEST(LoadCsv, RejectsMissingFileShortFileAndBadHeader) {
  TempDir dir("load");
  EXPECT_THROW(load_csv(dir / "nope.csv"), DataError);
  write_text(dir / "one.csv", "f1,label\n1,0\n");
  EXPECT_THROW(load_csv(dir / "one.csv"), DataError);
  write_text(dir / "hdr.csv", "f1,target\n1,0\n2,1\n");
  EXPECT_THROW(load_csv(dir / "hdr.csv"), DataError);
  write_text(dir / "nan.csv", "f1,label\nnan,0\n2,1\n");
  EXPECT_THROW(load_csv(dir / "nan.csv"), DataError);
}

TEST(LoadCsv, WriteThenLoadPreservesValuesExactly) {
  TempDir dir("load");
  const Dataset d = testing::make_blobs(40, 3, 0.25, 1.0, 7);
  write_csv(d, dir / "rt.csv");
  const Dataset back = load_csv(dir / "rt.csv");
  EXPECT_EQ(back.labels(), d.labels());
  EXPECT_EQ(back.feature_names(), d.feature_names());
  EXPECT_TRUE(back.features() == d.features());
}

TEST(DatasetInvariants, ConstructorChecksShape) {
  EXPECT_THROW(Dataset(Matrix::Zero(3, 2), {0, 1}), DataError);
  EXPECT_THROW(Dataset(Matrix::Zero(2, 0), {0, 1}), DataError);
  Matrix bad = Matrix::Zero(2, 1);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Dataset(bad, {0, 1}), DataError);
  EXPECT_THROW(Dataset(Matrix::Zero(2, 1), {0, 3}), DataError);
}

TEST(Split, StratifiedCountsOnTenRows) {
  const Dataset d = testing::ten_row_fixture();  // 8 class-0, 2 class-1
  const SplitPair sp = split(d, 0.3, 42);
  EXPECT_EQ(sp.test.rows(), 3u);
  EXPECT_EQ(sp.test.count(1), 1u);  // round(0.3 * 2) = 1
  EXPECT_EQ(sp.train.rows(), 7u);
}

TEST(Split, DeterministicForSeed) {
  const Dataset d = testing::make_blobs(200, 4, 0.1, 2.0, 3);
  const SplitPair a = split(d, 0.3, 99);
  const SplitPair b = split(d, 0.3, 99);
  EXPECT_EQ(a.test_index, b.test_index);
  EXPECT_EQ(a.train_index, b.train_index);
  const SplitPair c = split(d, 0.3, 100);
  EXPECT_NE(a.test_index, c.test_index);
}

TEST(Split, RejectsBadFractionAndSingleClass) {
  const Dataset d = testing::ten_row_fixture();
  EXPECT_THROW(split(d, 0.0, 1), DataError);
  EXPECT_THROW(split(d, 1.0, 1), DataError);
  EXPECT_THROW(split(Dataset(Matrix::Zero(4, 1), {0, 0, 0, 0}), 0.5, 1), DataError);
  // two rows of one class each: 0.1 rounds both test counts to zero
  EXPECT_THROW(split(Dataset(Matrix::Zero(2, 1), {0, 1}), 0.1, 1), DataError);
}

TEST(Split, PartitionAndProportionProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 20 + rng() % 300;
    const double frac = 0.05 + 0.01 * static_cast<double>(rng() % 40);
    const double minority = 0.05 + 0.01 * static_cast<double>(rng() % 45);
    const Dataset d = testing::make_blobs(rows, 2, minority, 1.0, rng());
    if (d.count(1) == 0) continue;
    SplitPair sp;
    try {
      sp = split(d, frac, rng());
    } catch (const DataError&) {
      continue;
    }
    std::set<std::size_t> seen(sp.train_index.begin(), sp.train_index.end());
    for (auto i : sp.test_index) EXPECT_TRUE(seen.insert(i).second) << "index on both sides";
    EXPECT_EQ(seen.size(), d.rows());
    for (int cls : {0, 1}) {
      const double expect = frac * static_cast<double>(d.count(cls));
      EXPECT_LE(std::abs(static_cast<double>(sp.test.count(cls)) - expect), 1.0);
    }
  }
}

TEST(ImbalanceRatio, Definition) {
  EXPECT_DOUBLE_EQ(imbalance_ratio(testing::ten_row_fixture()), 0.2);
  EXPECT_DOUBLE_EQ(imbalance_ratio(Dataset(Matrix::Zero(10, 1), {0, 1, 0, 1, 0, 1, 0, 1, 0, 1})), 0.5);
  EXPECT_THROW(imbalance_ratio(Dataset(Matrix::Zero(3, 1), {0, 0, 0})), DataError);
}

TEST(MinMax, ScalesColumnsAndConstantColumnMapsToZero) {
  Matrix x(3, 2);
  x << 0, 7, 5, 7, 10, 7;
  const auto [scaled, params] = minmax_fit_transform(Dataset(x, {0, 1, 0}));
  EXPECT_DOUBLE_EQ(scaled.features()(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(scaled.features()(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(scaled.features()(2, 0), 1.0);
  EXPECT_TRUE(scaled.features().col(1).isZero());

  Matrix probe(2, 2);
  probe << 5, 1, 20, 7;
  const Dataset applied = params.apply(Dataset(probe, {0, 1}));
  EXPECT_DOUBLE_EQ(applied.features()(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(applied.features()(1, 0), 2.0);  // not clipped
}

TEST(MinMax, RangeAndReapplicationProperty) {
  for (Seed s = 0; s < 20; ++s) {
    const Dataset d = testing::make_blobs(50, 5, 0.3, 3.0, s);
    const auto [scaled, params] = minmax_fit_transform(d);
    EXPECT_GE(scaled.features().minCoeff(), 0.0);
    EXPECT_LE(scaled.features().maxCoeff(), 1.0);
    EXPECT_LE((params.apply(d).features() - scaled.features()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Leakage, DisjointSharedAndSelf) {
  Matrix a(2, 2);
  a << 0, 0, 1, 1;
  Matrix b(2, 2);
  b << 2, 2, 3, 3;
  EXPECT_DOUBLE_EQ(leakage_zero_fraction(Dataset(a, {0, 1}), Dataset(b, {0, 1})), 0.0);
  Matrix c(2, 2);
  c << 1, 1, 5, 5;
  EXPECT_DOUBLE_EQ(leakage_zero_fraction(Dataset(a, {0, 1}), Dataset(c, {0, 1})), 25.0);

  const Dataset d = testing::make_blobs(40, 3, 0.5, 1.0, 11);  // continuous, so duplicate-free
  EXPECT_DOUBLE_EQ(leakage_zero_fraction(d, d), 100.0 / 40.0);

  EXPECT_THROW(leakage_zero_fraction(Dataset(a, {0, 1}), Dataset(Matrix::Zero(2, 3), {0, 1})), DataError);
}

}  // namespace
}  // namespace ghost
