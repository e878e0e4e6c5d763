#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numeric>

#include "cscore/csv.hpp"
#include "cscore/error.hpp"
#include "cscore/estimator.hpp"
#include "cscore/rank_correlation.hpp"
#include "cscore/rng.hpp"
#include "cscore/score.hpp"

#include "oracles.hpp"

using namespace cscore;

namespace {

MaskMatrix mask_from(std::vector<std::vector<int>> rows, std::size_t subset_size) {
    MaskMatrix mask;
    mask.runs = rows.size();
    mask.examples = rows[0].size();
    mask.subset_size = subset_size;
    mask.included = Mat<std::uint8_t>(mask.runs, mask.examples);
    for (std::size_t i = 0; i < mask.runs; ++i)
        for (std::size_t j = 0; j < mask.examples; ++j)
            mask.included.at(i, j) = std::uint8_t(rows[i][j]);
    return mask;
}

LossMatrix loss_from(std::vector<std::vector<int>> rows) {
    LossMatrix loss;
    loss.runs = rows.size();
    loss.examples = rows[0].size();
    loss.miss = Mat<std::uint8_t>(loss.runs, loss.examples);
    for (std::size_t i = 0; i < loss.runs; ++i)
        for (std::size_t j = 0; j < loss.examples; ++j)
            loss.miss.at(i, j) = std::uint8_t(rows[i][j]);
    return loss;
}

RunBatch random_batch(Rng& rng, std::size_t runs, std::size_t examples) {
    RunBatch batch;
    batch.ratio = 0.5;
    batch.mask.runs = runs;
    batch.mask.examples = examples;
    batch.mask.included = Mat<std::uint8_t>(runs, examples);
    batch.loss.runs = runs;
    batch.loss.examples = examples;
    batch.loss.miss = Mat<std::uint8_t>(runs, examples);
    for (std::size_t i = 0; i < runs * examples; ++i) {
        batch.mask.included.data[i] = std::uint8_t(rng.below(2));
        batch.loss.miss.data[i] = std::uint8_t(rng.below(2));
    }
    // subset_size is irrelevant for aggregation tests; skip validate()
    return batch;
}

}  // namespace

TEST_CASE("sample_subsets basics") {
    const MaskMatrix full = sample_subsets(6, 6, 3, 1);
    for (auto v : full.included.data) CHECK(v == 1);

    const MaskMatrix mask = sample_subsets(20, 7, 25, 2);
    mask.validate();  // row sums == subset size

    CHECK_THROWS_AS(sample_subsets(5, 6, 1, 0), ValidationError);
    CHECK_THROWS_AS(sample_subsets(5, 0, 1, 0), ValidationError);
}

TEST_CASE("subset sampling is uniform per index") {
    // N=4, n=2, many runs: inclusion frequency approaches 1/2
    const std::size_t runs = 10000;
    const MaskMatrix mask = sample_subsets(4, 2, runs, 77);
    for (std::size_t j = 0; j < 4; ++j) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < runs; ++i) count += mask.included.at(i, j);
        CHECK(std::abs(double(count) / double(runs) - 0.5) < 0.02);
    }
}

TEST_CASE("aggregate_scores hand fixture") {
    const MaskMatrix mask = mask_from({{1, 0, 1}, {0, 1, 0}}, 2);
    const LossMatrix loss = loss_from({{0, 1, 0}, {0, 0, 1}});
    const auto scores = aggregate_scores(mask, loss);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0] == 1.0);
    CHECK(scores[1] == 0.0);
    CHECK(scores[2] == 0.0);
}

TEST_CASE("zero loss means every held-out score is one; all-included is undefined") {
    const MaskMatrix mask = mask_from({{1, 0}, {1, 1}}, 0);
    const LossMatrix loss = loss_from({{0, 0}, {0, 0}});
    const auto scores = aggregate_scores(mask, loss);
    CHECK_FALSE(score_defined(scores[0]));  // included in every run
    CHECK(scores[1] == 1.0);
}

TEST_CASE("aggregate_scores equals the run-major oracle on random matrices") {
    Rng rng(404);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t runs = 1 + rng.below(8);
        const std::size_t examples = 1 + rng.below(12);
        const RunBatch batch = random_batch(rng, runs, examples);
        const auto fast = aggregate_scores(batch.mask, batch.loss);
        const auto slow = oracle::holdout_scores(batch.mask, batch.loss);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t j = 0; j < fast.size(); ++j) {
            CHECK(score_defined(fast[j]) == score_defined(slow[j]));
            if (score_defined(fast[j])) CHECK(fast[j] == slow[j]);
        }
    }
}

TEST_CASE("scores are invariant under run permutation") {
    Rng rng(11);
    RunBatch batch = random_batch(rng, 6, 9);
    const auto before = aggregate_scores(batch.mask, batch.loss);

    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    const RunBatch shuffled = select_runs(batch, perm);
    const auto after = aggregate_scores(shuffled.mask, shuffled.loss);
    for (std::size_t j = 0; j < before.size(); ++j) {
        if (score_defined(before[j]))
            CHECK(before[j] == after[j]);
        else
            CHECK_FALSE(score_defined(after[j]));
    }
}

TEST_CASE("defined scores stay in [0,1] and hit 1 only when all holdouts are right") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const RunBatch batch = random_batch(rng, 1 + rng.below(6), 1 + rng.below(10));
        const auto scores = aggregate_scores(batch.mask, batch.loss);
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (!score_defined(scores[j])) continue;
            CHECK(scores[j] >= 0.0);
            CHECK(scores[j] <= 1.0);
            bool all_right = true;
            for (std::size_t i = 0; i < batch.mask.runs; ++i)
                if (!batch.mask.included.at(i, j) && batch.loss.miss.at(i, j)) all_right = false;
            CHECK((scores[j] == 1.0) == all_right);
        }
    }
}

TEST_CASE("build_profile sorts ratios and keeps rows aligned") {
    Rng rng(13);
    std::vector<RunBatch> batches;
    batches.push_back(random_batch(rng, 4, 6));
    batches.push_back(random_batch(rng, 4, 6));
    batches.push_back(random_batch(rng, 4, 6));
    batches[0].ratio = 0.9;
    batches[1].ratio = 0.1;
    batches[2].ratio = 0.5;

    const ConsistencyProfile profile = build_profile(batches);
    CHECK(profile.ratios == std::vector<double>{0.1, 0.5, 0.9});
    const auto row_for_01 = aggregate_scores(batches[1].mask, batches[1].loss);
    for (std::size_t j = 0; j < 6; ++j) {
        const double a = profile.scores.at(0, j);
        if (score_defined(a))
            CHECK(a == row_for_01[j]);
        else
            CHECK_FALSE(score_defined(row_for_01[j]));
    }
}

TEST_CASE("single-ratio profile equals aggregate_scores and its integral is itself") {
    Rng rng(14);
    std::vector<RunBatch> batches{random_batch(rng, 5, 7)};
    const ConsistencyProfile profile = build_profile(batches);
    CHECK(profile.scores.rows == 1);

    std::vector<int> labels(7, 0);
    const ScoreTable table = integral_cscore(profile, labels);
    for (std::size_t j = 0; j < 7; ++j) {
        const double direct = profile.scores.at(0, j);
        if (score_defined(direct))
            CHECK(table.scores[j] == direct);
        else
            CHECK_FALSE(score_defined(table.scores[j]));
    }
}

TEST_CASE("integral is the mean of defined entries") {
    ConsistencyProfile profile;
    profile.ratios = {0.1, 0.5, 0.9};
    profile.scores = MatD(3, 2);
    profile.scores.at(0, 0) = 0.2;
    profile.scores.at(1, 0) = 0.4;
    profile.scores.at(2, 0) = 0.9;
    profile.scores.at(0, 1) = 0.5;
    profile.scores.at(1, 1) = undefined_score();
    profile.scores.at(2, 1) = 1.0;

    const ScoreTable table = integral_cscore(profile, std::vector<int>{0, 1});
    CHECK(table.scores[0] == doctest::Approx(0.5));
    CHECK(table.scores[1] == doctest::Approx(0.75));
}

TEST_CASE("point_estimate_curve on identical and reversed rows") {
    ConsistencyProfile profile;
    profile.ratios = {0.2, 0.8};
    profile.scores = MatD(2, 5);
    ScoreTable reference;
    reference.labels.assign(5, 0);
    for (std::size_t j = 0; j < 5; ++j) {
        profile.scores.at(0, j) = 0.1 * double(j + 1);
        profile.scores.at(1, j) = 0.1 * double(5 - j);  // reversed ranking
        reference.scores.push_back(0.1 * double(j + 1));
    }
    const auto curve = point_estimate_curve(profile, reference);
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].rho == doctest::Approx(1.0));
    CHECK(curve[1].rho == doctest::Approx(-1.0));
}

TEST_CASE("sensitivity bookkeeping: all rows once, std over exactly n repeats") {
    Rng rng(15);
    RunBatch batch = random_batch(rng, 8, 30);
    const auto reference = oracle::holdout_scores(batch.mask, batch.loss);

    const std::size_t m_all[] = {8};
    const auto single = sensitivity_curve(batch, m_all, 1, reference, 5);
    REQUIRE(single.size() == 1);
    // sampling all rows reproduces the batch itself
    const auto own = spearman(aggregate_scores(batch.mask, batch.loss), reference);
    CHECK(single[0].mean_rho == doctest::Approx(own.value));
    CHECK(single[0].std_rho == 0.0);

    const std::size_t m_small[] = {2};
    const auto repeated = sensitivity_curve(batch, m_small, 10, reference, 5);
    CHECK(repeated[0].models == 2);

    const std::size_t too_many[] = {9};
    CHECK_THROWS_AS(sensitivity_curve(batch, too_many, 2, reference, 5), ValidationError);
}

TEST_CASE("score csv round trip, undefined as empty field") {
    ScoreTable table;
    table.scores = {0.25, undefined_score(), 1.0};
    table.labels = {2, 0, 1};
    const auto path = std::filesystem::temp_directory_path() / "cscore_scores_test.csv";
    export_scores(table, path);

    const std::string text = read_text_file(path);
    CHECK(text.find("1,0,\n") != std::string::npos);  // empty score field survives

    const ScoreTable back = import_scores(path);
    CHECK(back.labels == table.labels);
    CHECK(back.scores[0] == table.scores[0]);
    CHECK_FALSE(score_defined(back.scores[1]));
    CHECK(back.scores[2] == table.scores[2]);
    std::filesystem::remove(path);
}

TEST_CASE("malformed score csv reports the line") {
    const auto path = std::filesystem::temp_directory_path() / "cscore_bad_scores.csv";
    write_text_file(path, "index,label,score\n0,1,0.5\n1,oops,0.2\n");
    try {
        import_scores(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 3);  // 1-based line number
    }
    std::filesystem::remove(path);
}

TEST_CASE("run batch archive round trip") {
    Rng rng(16);
    RunBatch batch = random_batch(rng, 4, 5);
    // make rows consistent so validate() passes on load
    batch.mask.subset_size = 2;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 5; ++j) batch.mask.included.at(i, j) = 0;
        batch.mask.included.at(i, i) = 1;
        batch.mask.included.at(i, 4) = 1;
    }
    batch.run_seeds = {9, 8, 7, 6};
    batch.config_digest = "feedbeef";

    const auto dir = std::filesystem::temp_directory_path() / "cscore_batch_test";
    save_run_batch(batch, dir);
    const RunBatch back = load_run_batch(dir);
    CHECK(back.ratio == batch.ratio);
    CHECK(back.mask.included.data == batch.mask.included.data);
    CHECK(back.loss.miss.data == batch.loss.miss.data);
    CHECK(back.run_seeds == batch.run_seeds);
    CHECK(back.config_digest == batch.config_digest);
    std::filesystem::remove_all(dir);
}

TEST_CASE("profile csv round trip") {
    ConsistencyProfile profile;
    profile.ratios = {0.25, 0.75};
    profile.scores = MatD(2, 3);
    profile.scores.at(0, 0) = 0.5;
    profile.scores.at(0, 1) = undefined_score();
    profile.scores.at(0, 2) = 1.0;
    profile.scores.at(1, 0) = 0.125;
    profile.scores.at(1, 1) = 0.75;
    profile.scores.at(1, 2) = undefined_score();

    const auto path = std::filesystem::temp_directory_path() / "cscore_profile_test.csv";
    save_profile_csv(profile, path);
    const ConsistencyProfile back = load_profile_csv(path);
    CHECK(back.ratios == profile.ratios);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t j = 0; j < 3; ++j) {
            const double a = profile.scores.at(r, j);
            const double b = back.scores.at(r, j);
            CHECK(score_defined(a) == score_defined(b));
            if (score_defined(a)) CHECK(a == b);
        }
    std::filesystem::remove(path);
}
