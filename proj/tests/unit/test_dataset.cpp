#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

#include "flda/dataset.hpp"
#include "flda/error.hpp"
#include "flda/random.hpp"
#include "flda/synthetic.hpp"

using namespace flda;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "flda_dataset_tests";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << text;
  return path;
}

DelimitedOptions labeled(const std::string& column = "last") {
  DelimitedOptions o;
  o.label_column = column;
  return o;
}

std::size_t parse_line_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(LoadDelimited, ThreeByTwoWithLabels) {
  const auto path = write_temp("small.csv", "1,0,+1\n0,2,-1\n5,5,+1\n");
  const Dataset d = load_delimited(path, labeled("2"));
  ASSERT_EQ(d.rows(), 3u);
  ASSERT_EQ(d.cols(), 2u);
  EXPECT_EQ(d.label_kind(), LabelKind::binary);
  EXPECT_EQ(std::vector<int>(d.labels().begin(), d.labels().end()), (std::vector<int>{1, -1, 1}));
  EXPECT_EQ(d.at(2, 0), 5.0);
  EXPECT_EQ(d.at(1, 1), 2.0);
}

TEST(LoadDelimited, MissingTokenImputesZeroAndFlags) {
  const auto path = write_temp("missing.csv", "a,b,y\n1,?,1\n2,3,0\n");
  DelimitedOptions o = labeled("y");
  o.missing_token = "?";
  const Dataset d = load_delimited(path, o);
  EXPECT_EQ(d.at(0, 1), 0.0);
  EXPECT_TRUE(d.missing(0, 1));
  EXPECT_FALSE(d.missing(0, 0));
  EXPECT_EQ(d.missing_in_row(1), 0u);
  EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"a", "b"}));
}

TEST(LoadDelimited, Errors) {
  const auto empty = write_temp("empty.csv", "");
  EXPECT_THROW(load_delimited(empty, labeled()), ParseError);

  const auto ragged = write_temp("ragged.csv", "1,2,1\n3,4\n");
  EXPECT_EQ(parse_line_of([&] { load_delimited(ragged, labeled()); }), 2u);

  const auto text = write_temp("text.csv", "1,2,1\n3,x,1\n");
  EXPECT_EQ(parse_line_of([&] { load_delimited(text, labeled()); }), 2u);

  const auto fine = write_temp("fine.csv", "1,2,1\n3,4,0\n");
  try {
    load_delimited(fine, labeled("7"));
    FAIL() << "expected a config error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
}

TEST(LoadDelimited, MulticlassLabelsAreSortedIds) {
  const auto path = write_temp("multi.csv", "1,c\n2,a\n3,b\n4,a\n");
  const Dataset d = load_delimited(path, labeled());
  EXPECT_EQ(d.label_kind(), LabelKind::multiclass);
  EXPECT_EQ(d.num_classes(), 3u);
  EXPECT_EQ(d.class_ids(), (std::vector<int>{2, 0, 1, 0}));
}

TEST(LoadSparse, PadsToLargestIndex) {
  const auto one = write_temp("one.txt", "+1 3:2.0\n");
  const Dataset a = load_sparse_indexed(one);
  ASSERT_EQ(a.rows(), 1u);
  ASSERT_EQ(a.cols(), 3u);
  EXPECT_EQ(a.at(0, 0), 0.0);
  EXPECT_EQ(a.at(0, 2), 2.0);
  EXPECT_EQ(a.labels()[0], 1);

  const auto two = write_temp("two.txt", "1 1:1 5:2\n-1 2:4\n");
  const Dataset b = load_sparse_indexed(two);
  EXPECT_EQ(b.cols(), 5u);
  EXPECT_EQ(b.at(1, 4), 0.0);
  EXPECT_FALSE(b.has_missing_mask());
}

TEST(LoadSparse, RejectsBadIndices) {
  EXPECT_EQ(parse_line_of([&] { load_sparse_indexed(write_temp("dup.txt", "1 2:1 2:1\n")); }),
            1u);
  EXPECT_EQ(parse_line_of([&] { load_sparse_indexed(write_temp("zero.txt", "1 1:1\n1 0:3\n")); }),
            2u);
  EXPECT_THROW(load_sparse_indexed(write_temp("down.txt", "1 3:1 2:1\n")), ParseError);
}

TEST(SaveLoad, DelimitedAndSparseRoundTrip) {
  const Dataset d = Dataset::from_dense(2, 3, {0.1, 0.0, -7.25, 1e-300, 3.0, 0.0})
                        .with_labels({1, -1}, LabelKind::binary, 2, {"-1", "+1"});
  const fs::path csv = write_temp("rt.csv", "");
  save_delimited(d, csv);
  const Dataset back = load_delimited(csv, labeled());
  const fs::path txt = write_temp("rt.txt", "");
  save_sparse_indexed(d, txt);
  const Dataset sparse = load_sparse_indexed(txt);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(back.at(i, j), d.at(i, j));
      EXPECT_EQ(sparse.at(i, j), d.at(i, j));
    }
    EXPECT_EQ(back.labels()[i], d.labels()[i]);
    EXPECT_EQ(sparse.labels()[i], d.labels()[i]);
  }
}

TEST(NonZeroFrequencies, CountsExactly) {
  const Dataset d = Dataset::from_dense(3, 2, {1, 0, 2, 0, 0, 3});
  const auto f = nonzero_frequencies(d);
  EXPECT_DOUBLE_EQ(f.freq[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f.freq[1], 1.0 / 3.0);
  EXPECT_EQ(f.n, 3u);

  const Dataset zeros = Dataset::from_dense(2, 2, {0, 1, 0, 1});
  EXPECT_EQ(nonzero_frequencies(zeros).freq[0], 0.0);
  EXPECT_THROW(nonzero_frequencies(Dataset::from_dense(0, 2, {})), Error);
}

TEST(NonZeroFrequencies, BernoulliMixtureMatchesAnalyticMean) {
  Rng rng(5);
  const Dataset d = generate_source(bernoulli_preset(), 100000, rng);
  // 0.5 * 0.7 + 0.5 * 0.3
  const double expected = 0.5 * 0.7 + 0.5 * 0.3;
  const auto f = nonzero_frequencies(d);
  EXPECT_NEAR(f.freq[0], expected, 0.01);
  EXPECT_NEAR(f.freq[1], expected, 0.01);
}

TEST(NonZeroFrequencies, PermutationAndStorageInvariant) {
  Rng rng(6);
  const Dataset d = generate_source(poisson_preset(), 500, rng);
  const Dataset shuffled = subsample(d, d.rows(), 99);
  const auto a = nonzero_frequencies(d);
  const auto b = nonzero_frequencies(shuffled);
  const auto c = nonzero_frequencies(d.to_sparse());
  EXPECT_EQ(a.freq, b.freq);
  EXPECT_EQ(a.freq, c.freq);
}

TEST(MissingDataSplit, PartitionsRows) {
  const auto path = write_temp("split.csv", "1,2,1\n?,2,0\n3,4,1\n5,?,0\n");
  DelimitedOptions o = labeled();
  o.missing_token = "?";
  const Dataset d = load_delimited(path, o);
  const auto [source, target] = missing_data_split(d);
  ASSERT_EQ(source.rows(), 2u);
  ASSERT_EQ(target.rows(), 2u);
  EXPECT_EQ(source.at(0, 0), 1.0);
  EXPECT_EQ(source.at(1, 0), 3.0);
  EXPECT_EQ(target.at(0, 0), 0.0);
  EXPECT_TRUE(target.missing(0, 0));
  EXPECT_EQ(target.at(1, 0), 5.0);
  EXPECT_EQ(target.labels()[1], -1);
}

TEST(MissingDataSplit, NoMissingValuesGivesEmptyTarget) {
  const Dataset d = Dataset::from_dense(2, 1, {1, 2})
                        .with_labels({1, -1}, LabelKind::binary, 2, {"-1", "+1"})
                        .with_missing_mask({0, 0});
  const auto [source, target] = missing_data_split(d);
  EXPECT_EQ(source.rows(), 2u);
  EXPECT_TRUE(target.empty());
}

TEST(MissingDataSplit, NoCompleteRowIsAnError) {
  const Dataset d = Dataset::from_dense(1, 1, {0})
                        .with_labels({1}, LabelKind::binary, 2, {"-1", "+1"})
                        .with_missing_mask({1});
  EXPECT_THROW(missing_data_split(d), Error);
}

TEST(MissingDataSplit, HeartLikeCounts) {
  // 704 rows, 615 of them with at least one missing cell
  const std::size_t n = 704;
  const std::size_t m = 13;
  std::vector<std::uint8_t> mask(n * m, 0);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i % 2 ? 1 : -1;
    if (i >= 89) {
      mask[i * m + i % m] = 1;
    }
  }
  const Dataset d = Dataset::from_dense(n, m, std::vector<double>(n * m, 1.0))
                        .with_labels(labels, LabelKind::binary, 2, {"-1", "+1"})
                        .with_missing_mask(mask);
  const auto [source, target] = missing_data_split(d);
  EXPECT_EQ(source.rows(), 89u);
  EXPECT_EQ(target.rows(), 615u);
}

TEST(Subsample, DeterministicAndDistinct) {
  const auto a = subsample_indices(10000, 20, 7);
  const auto b = subsample_indices(10000, 20, 7);
  EXPECT_EQ(a, b);
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 20u);
  auto full = subsample_indices(50, 50, 1);
  std::sort(full.begin(), full.end());
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(full[i], i);
  }
  EXPECT_THROW(subsample_indices(5, 0, 1), Error);
  EXPECT_THROW(subsample_indices(5, 6, 1), Error);
}

TEST(Storage, SparseAndDenseRowsAgree) {
  Rng rng(8);
  const Dataset d = generate_source(poisson_preset(), 200, rng);
  const Dataset s = d.to_sparse();
  EXPECT_EQ(s.storage(), Dataset::Storage::sparse);
  std::vector<double> dense_rows;
  std::vector<double> sparse_rows;
  d.for_each_row([&](std::size_t, std::span<const double> r) {
    dense_rows.insert(dense_rows.end(), r.begin(), r.end());
  });
  s.for_each_row([&](std::size_t, std::span<const double> r) {
    sparse_rows.insert(sparse_rows.end(), r.begin(), r.end());
  });
  EXPECT_EQ(dense_rows, sparse_rows);
  EXPECT_EQ(s.to_dense().at(17, 1), d.at(17, 1));
}

TEST(Numbers, FormatRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-310, 6.02214076e23, 0.0}) {
    EXPECT_EQ(*parse_double(format_double(v)), v);
  }
  EXPECT_EQ(*parse_double("+1"), 1.0);
  EXPECT_FALSE(parse_double("1x"));
  EXPECT_FALSE(parse_double(""));
}
