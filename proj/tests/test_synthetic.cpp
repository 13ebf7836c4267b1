#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "triage/synthetic.hpp"

using namespace triage;

TEST_CASE("default label distribution is a normalized bell", "[synthetic]") {
    auto dist = default_label_distribution(6);
    REQUIRE(dist.size() == 6);
    double sum = 0.0;
    for (double p : dist) sum += p;
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    // symmetric, unimodal, extremes rare but present
    CHECK(dist[0] == Catch::Approx(dist[5]).margin(1e-12));
    CHECK(dist[1] == Catch::Approx(dist[4]).margin(1e-12));
    CHECK(dist[2] > dist[1]);
    CHECK(dist[1] > dist[0]);
    CHECK(dist[0] > 0.05);
    // matches the stated formula: gaussian weights at sigma = (K-1)/3
    const double sigma = 5.0 / 3.0;
    auto weight = [&](double c) {
        const double d = c - 2.5;
        return std::exp(-d * d / (2.0 * sigma * sigma));
    };
    double total = 0.0;
    for (int c = 0; c < 6; ++c) total += weight(c);
    CHECK(dist[2] == Catch::Approx(weight(2.0) / total).margin(1e-12));
}

TEST_CASE("generate_labels", "[synthetic]") {
    SECTION("point mass pins every label") {
        SynthConfig config;
        config.n_candidates = 10;
        config.items_per_candidate = 3;
        config.label_distribution = {0, 0, 1, 0, 0, 0};
        config.seed = 1;
        auto dataset = generate_labels(config);
        for (const auto& r : dataset.responses()) {
            CHECK(r.human_label == 2);
            CHECK_FALSE(r.machine_label.has_value());
        }
    }
    SECTION("shape matches the config") {
        SynthConfig config;
        config.n_candidates = 1000;
        config.items_per_candidate = 6;
        config.seed = 2;
        auto dataset = generate_labels(config);
        CHECK(dataset.size() == 6000);
        CHECK(dataset.candidate_ids().size() == 1000);
        for (const auto& candidate : dataset.candidate_ids())
            CHECK(dataset.responses_of(candidate).size() == 6);
        CHECK(validate_dataset(dataset).empty());
    }
    SECTION("empirical class frequencies track the distribution") {
        SynthConfig config;
        config.n_candidates = 2000;
        config.items_per_candidate = 5;  // 10^4 responses
        config.label_distribution = {0.1, 0.2, 0.3, 0.25, 0.1, 0.05};
        config.seed = 3;
        auto dataset = generate_labels(config);
        std::vector<double> freq(6, 0.0);
        for (const auto& r : dataset.responses())
            freq[static_cast<std::size_t>(*r.human_label)] += 1.0 / 10000.0;
        for (int c = 0; c < 6; ++c)
            CHECK(std::abs(freq[static_cast<std::size_t>(c)] -
                           config.label_distribution[static_cast<std::size_t>(c)]) <=
                  0.02);
    }
    SECTION("invalid distributions are rejected") {
        SynthConfig config;
        config.n_candidates = 1;
        config.label_distribution = {0.5, 0.5, 0.5, 0, 0, 0};
        CHECK_THROWS_AS(generate_labels(config), validation_error);
        config.label_distribution = {-0.5, 1.5, 0, 0, 0, 0};
        CHECK_THROWS_AS(generate_labels(config), validation_error);
    }
    SECTION("deterministic under a fixed seed") {
        SynthConfig config;
        config.n_candidates = 50;
        config.seed = 4;
        auto a = generate_labels(config);
        auto b = generate_labels(config);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a.responses()[i].human_label == b.responses()[i].human_label);
    }
}

TEST_CASE("apply_pseudo_model", "[synthetic]") {
    SynthConfig config;
    config.n_candidates = 500;
    config.items_per_candidate = 6;
    config.seed = 10;
    auto truth = generate_labels(config);

    SECTION("perfect accuracy copies the truth") {
        auto dataset = apply_pseudo_model(truth, {1.0, 11});
        for (const auto& r : dataset.responses())
            CHECK(r.machine_label == r.human_label);
    }
    SECTION("exact corruption count and never-equal flips") {
        auto dataset = apply_pseudo_model(truth, {0.75, 12});
        std::size_t mismatches = 0;
        for (const auto& r : dataset.responses())
            if (r.machine_label != r.human_label) ++mismatches;
        CHECK(mismatches == static_cast<std::size_t>(0.25 * 3000));
    }
    SECTION("local accuracy is exact for awkward fractions") {
        auto dataset = apply_pseudo_model(truth, {0.66, 13});
        std::size_t matches = 0;
        for (const auto& r : dataset.responses())
            if (r.machine_label == r.human_label) ++matches;
        const auto n_flip = static_cast<std::size_t>((1.0 - 0.66) * 3000);
        CHECK(matches == 3000 - n_flip);
    }
    SECTION("unlabeled responses are rejected") {
        std::vector<ItemResponse> rows = {{"c", "i", std::nullopt, std::nullopt}};
        Dataset no_labels(truth.scale(), rows);
        CHECK_THROWS_AS(apply_pseudo_model(no_labels, {0.9, 1}), validation_error);
    }
    SECTION("deterministic under a fixed seed") {
        auto a = apply_pseudo_model(truth, {0.7, 14});
        auto b = apply_pseudo_model(truth, {0.7, 14});
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a.responses()[i].machine_label == b.responses()[i].machine_label);
    }
}

TEST_CASE("split_by_candidate", "[synthetic]") {
    SynthConfig config;
    config.n_candidates = 10;
    config.items_per_candidate = 4;
    config.seed = 20;
    auto dataset = generate_labels(config);

    SECTION("candidates never straddle the split") {
        auto [train, test] = split_by_candidate(dataset, 0.7, 21);
        CHECK(train.candidate_ids().size() == 7);
        CHECK(test.candidate_ids().size() == 3);
        std::set<std::string> train_ids(train.candidate_ids().begin(),
                                        train.candidate_ids().end());
        for (const auto& id : test.candidate_ids())
            CHECK(train_ids.count(id) == 0);
    }
    SECTION("union restores the original multiset of responses") {
        auto [train, test] = split_by_candidate(dataset, 0.5, 22);
        std::multiset<std::string> merged, original;
        auto key = [](const ItemResponse& r) { return r.candidate_id + "/" + r.item_id; };
        for (const auto& r : train.responses()) merged.insert(key(r));
        for (const auto& r : test.responses()) merged.insert(key(r));
        for (const auto& r : dataset.responses()) original.insert(key(r));
        CHECK(merged == original);
    }
    SECTION("degenerate fractions are rejected") {
        CHECK_THROWS_AS(split_by_candidate(dataset, 0.01, 23), validation_error);
        CHECK_THROWS_AS(split_by_candidate(dataset, 0.99, 23), validation_error);
        CHECK_THROWS_AS(split_by_candidate(dataset, 1.5, 23), validation_error);
    }
    SECTION("deterministic under a fixed seed") {
        auto [a_train, a_test] = split_by_candidate(dataset, 0.6, 24);
        auto [b_train, b_test] = split_by_candidate(dataset, 0.6, 24);
        CHECK(a_train.candidate_ids() == b_train.candidate_ids());
        CHECK(a_test.candidate_ids() == b_test.candidate_ids());
    }
}
