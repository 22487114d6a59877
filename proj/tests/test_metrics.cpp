#include <doctest.h>

#include <cmath>
#include <vector>

#include "ignh/metrics.hpp"
#include "ignh/rng.hpp"
#include "oracles.hpp"

using namespace ignh;

TEST_CASE("auc_binary: separated, all-tied, single class") {
    std::vector<double> sep{0.1, 0.2, 0.8, 0.9};
    std::vector<int> y{0, 0, 1, 1};
    CHECK(auc_binary(sep, y) == doctest::Approx(1.0));

    std::vector<double> ties{0.5, 0.5, 0.5, 0.5};
    CHECK(auc_binary(ties, y) == doctest::Approx(0.5));

    std::vector<int> solo{1, 1, 1, 1};
    CHECK_THROWS_AS((void)auc_binary(sep, solo), std::invalid_argument);
}

TEST_CASE("auc_binary equals the O(n^2) pair counter on random tied data") {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 5 + rng.below(60);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.below(8)) / 4.0;  // plenty of ties
            labels[i] = rng.uniform() < 0.5 ? 1 : 0;
            (labels[i] == 1 ? has1 : has0) = true;
        }
        if (!has0 || !has1) continue;
        CHECK(auc_binary(scores, labels) == doctest::Approx(oracle::auc_brute(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("auc_binary: invariance under monotone transforms, complement identity") {
    Rng rng(47);
    const std::size_t n = 60;
    std::vector<double> scores(n), warped(n);
    std::vector<int> labels(n), flipped(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.uniform(-3.0, 3.0);
        warped[i] = std::exp(0.5 * scores[i]) + 10.0;  // strictly increasing map
        labels[i] = rng.uniform() < 0.4 ? 1 : 0;
        flipped[i] = 1 - labels[i];
    }
    labels[0] = 1;
    flipped[0] = 0;
    labels[1] = 0;
    flipped[1] = 1;
    CHECK(auc_binary(scores, labels) == doctest::Approx(auc_binary(warped, labels)).epsilon(1e-12));
    CHECK(auc_binary(scores, labels) + auc_binary(scores, flipped) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("auc_weighted_ovr: perfect, uniform, and brute-force checked") {
    // perfect 3-class classifier
    std::vector<double> perfect{0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8, 0.7, 0.2, 0.1};
    std::vector<int> labels{0, 1, 2, 0};
    EvalResult r = auc_weighted_ovr(perfect, labels, 3);
    CHECK(r.auc == doctest::Approx(1.0));
    CHECK(r.per_class.size() == 3);
    CHECK(r.per_class[0].support == 2);

    // uniform probabilities are chance level
    std::vector<double> uniform(12, 1.0 / 3.0);
    CHECK(auc_weighted_ovr(uniform, labels, 3).auc == doctest::Approx(0.5));

    // absent class is an error
    std::vector<int> missing_class{0, 1, 0, 1};
    CHECK_THROWS_AS((void)auc_weighted_ovr(perfect, missing_class, 3), std::invalid_argument);

    // k = 2: weighted OVR equals the support-weighted average of the two
    // symmetric per-class AUCs computed by brute force
    Rng rng(3);
    const std::size_t n = 40;
    std::vector<double> probs(n * 2);
    std::vector<int> y2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = rng.uniform();
        probs[i * 2] = 1.0 - p;
        probs[i * 2 + 1] = p;
        y2[i] = rng.uniform() < 0.5 ? 1 : 0;
    }
    y2[0] = 0;
    y2[1] = 1;
    EvalResult two = auc_weighted_ovr(probs, y2, 2);
    std::vector<double> col0(n), col1(n);
    std::vector<int> is0(n), is1(n);
    std::size_t n0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        col0[i] = probs[i * 2];
        col1[i] = probs[i * 2 + 1];
        is0[i] = y2[i] == 0 ? 1 : 0;
        is1[i] = y2[i];
        n0 += static_cast<std::size_t>(is0[i]);
    }
    const double expected = (oracle::auc_brute(col0, is0) * static_cast<double>(n0) +
                             oracle::auc_brute(col1, is1) * static_cast<double>(n - n0)) /
                            static_cast<double>(n);
    CHECK(two.auc == doctest::Approx(expected).epsilon(1e-12));
}
