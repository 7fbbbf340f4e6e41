#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "seqdist/weights.hpp"

using namespace seqdist;

namespace {

IndexSet every(std::int64_t N, std::int64_t step, std::int64_t start) {
    std::vector<std::int64_t> idx;
    for (std::int64_t n = start; n <= N; n += step) idx.push_back(n);
    return IndexSet(std::move(idx), N);
}

} // namespace

TEST_CASE("weights of simple index sets", "[weights]") {
    const auto s = WindowSchedule::default_for(4096);
    auto w = subsequence_weights(every(4096, 1, 1), s);
    CHECK(w.w_l_hat == Rational(1));
    CHECK(w.w_u_hat == Rational(1));
    CHECK(w.converged);

    w = subsequence_weights(IndexSet({1, 2, 3}, 4096), s);
    CHECK(w.w_l_hat == Rational(0));
    CHECK(w.w_u_hat <= Rational(3, w.n_tail));
    CHECK(w.n_tail == 256);

    const auto thirds = subsequence_weights(every(30000, 3, 1), WindowSchedule::geometric(48, 2, 7500));
    CHECK(thirds.w_l_hat == Rational(1, 3));
    CHECK(thirds.w_u_hat == Rational(1, 3));
    CHECK(thirds.converged);
}

TEST_CASE("index set validation", "[weights]") {
    CHECK_THROWS_AS(IndexSet({0, 2}, 10), Error);
    CHECK_THROWS_AS(IndexSet({3, 2}, 10), Error);
    CHECK_THROWS_AS(IndexSet({11}, 10), Error);
    const auto m = Membership(std::vector<std::uint8_t>{0, 1, 1, 0, 1});
    CHECK(IndexSet::from(m) == IndexSet({2, 3, 5}, 5));
    CHECK(IndexSet::from(m).membership().bits().size() == 5);
}

TEST_CASE("essential_indices examples", "[weights]") {
    const auto f3 = materialize(fixtures::alternating(), 20);
    const auto evens = essential_indices(f3, 1.0, 0.5);
    for (auto n : evens.indices()) CHECK(n % 2 == 0);
    CHECK(evens.size() == 10);

    CHECK(essential_indices(materialize(fixtures::ones_then_zeros(3), 50), 1.0, 0.5) == IndexSet({1, 2, 3}, 50));
    CHECK(essential_indices(materialize(fixtures::one_in_three(), 30), 0.0, 0.5).size() == 20);
    CHECK_THROWS_AS(essential_indices(f3, 1.0, 0.0), Error);
}

TEST_CASE("sublimit_weight examples", "[weights]") {
    const std::int64_t N = 1 << 14;
    const auto s = WindowSchedule::default_for(N);
    auto w = sublimit_weight(materialize(fixtures::all_ones(), N), 1.0, 0.5, s);
    CHECK(w.w_l_hat == Rational(1));
    CHECK(w.w_u_hat == Rational(1));

    const auto f4 = materialize(fixtures::one_in_three(), 3 * 4096);
    w = sublimit_weight(f4, 0.0, 0.5, WindowSchedule::geometric(48, 2, 3 * 1024));
    CHECK(w.w_l_hat == Rational(2, 3));
    CHECK(w.w_u_hat == Rational(2, 3));

    // interval [0, 0.5) under the golden rotation
    w = sublimit_weight(materialize(fixtures::golden_rotation(), 100000), 0.25, 0.25,
                        WindowSchedule::default_for(100000));
    CHECK(std::abs(w.w_l_hat.to_double() - 0.5) < 0.01);
    CHECK(std::abs(w.w_u_hat.to_double() - 0.5) < 0.01);
    CHECK(w.converged);
}

TEST_CASE("sublimit_weight equals weights of the essential indices", "[weights][property]") {
    const std::int64_t N = 5000;
    const auto s = WindowSchedule::default_for(N);
    for (const auto& spec : {fixtures::alternating(), fixtures::one_in_three(), fixtures::golden_rotation(),
                             fixtures::dyadic_harmonic(), fixtures::doubling_blocks()}) {
        const auto p = materialize(spec, N);
        for (double a : {-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0}) {
            for (double eps : {0.1, 0.3}) {
                const auto direct = sublimit_weight(p, a, eps, s);
                const auto via = subsequence_weights(essential_indices(p, a, eps), s);
                REQUIRE(direct.w_l_hat.num() == via.w_l_hat.num());
                REQUIRE(direct.w_l_hat.den() == via.w_l_hat.den());
                REQUIRE(direct.w_u_hat.num() == via.w_u_hat.num());
                REQUIRE(direct.w_u_hat.den() == via.w_u_hat.den());
            }
        }
    }
}

TEST_CASE("weights move by at most F / n_tail when F indices change", "[weights][property]") {
    std::mt19937_64 rng(17);
    const std::int64_t N = 4000;
    const auto s = WindowSchedule::default_for(N);
    for (int trial = 0; trial < 30; ++trial) {
        std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.05, 0.95)(rng));
        std::vector<std::uint8_t> bits(N);
        for (auto& b : bits) b = coin(rng);
        auto other = bits;
        const auto F = std::uniform_int_distribution<std::int64_t>(1, 8)(rng);
        for (std::int64_t f = 0; f < F; ++f) {
            auto& b = other[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
            b = 1 - b;
        }
        const auto a = membership_weights(Membership(bits), s);
        const auto b = membership_weights(Membership(other), s);
        const double slack = static_cast<double>(F) / static_cast<double>(a.n_tail) + 1e-12;
        REQUIRE(std::abs(a.w_l_hat.to_double() - b.w_l_hat.to_double()) <= slack);
        REQUIRE(std::abs(a.w_u_hat.to_double() - b.w_u_hat.to_double()) <= slack);
    }
}

TEST_CASE("window counts of disjoint sets add up", "[weights][property]") {
    std::mt19937_64 rng(3);
    const std::int64_t N = 2000;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::uint8_t> a(N), b(N), u(N);
        for (std::int64_t i = 0; i < N; ++i) {
            const int r = std::uniform_int_distribution<int>(0, 2)(rng);
            a[i] = r == 0;
            b[i] = r == 1;
            u[i] = r != 2;
        }
        for (std::int64_t n : {1, 7, 64, 500}) {
            const auto ca = count_extrema(Membership(a), n), cb = count_extrema(Membership(b), n);
            const auto cu = count_extrema(Membership(u), n);
            // min over a union is at least the sum of mins, max at most the sum of maxes
            REQUIRE(cu.min_count >= ca.min_count + cb.min_count);
            REQUIRE(cu.max_count <= ca.max_count + cb.max_count);
            // per window the counts are additive
            const std::vector<int> ia(a.begin(), a.end()), ib(b.begin(), b.end()), iu(u.begin(), u.end());
            for (std::int64_t i = 0; i + n <= N; i += 97) {
                std::int64_t sa = 0, sb = 0, su = 0;
                for (std::int64_t k = i; k < i + n; ++k) sa += ia[k], sb += ib[k], su += iu[k];
                REQUIRE(su == sa + sb);
            }
        }
    }
}

TEST_CASE("detect_sublimits on the fixtures", "[weights]") {
    const std::int64_t N = 1 << 14;
    const auto s = WindowSchedule::default_for(N);

    const auto f3 = detect_sublimits(materialize(fixtures::alternating(), N), 0.02, s);
    REQUIRE(f3.clusters.size() == 2);
    CHECK(f3.clusters[0].center == -1.0);
    CHECK(f3.clusters[1].center == 1.0);
    for (const auto& c : f3.clusters) {
        CHECK(c.isolated);
        CHECK(c.weight.w_l_hat == Rational(1, 2));
        CHECK(c.weight.w_u_hat == Rational(1, 2));
    }
    CHECK(f3.residual_count == 0);

    const auto f2 = detect_sublimits(materialize(fixtures::all_ones(), N), 0.02, s);
    REQUIRE(f2.clusters.size() == 1);
    CHECK(f2.clusters[0].center == 1.0);
    CHECK(f2.clusters[0].weight.w_l_hat == Rational(1));

    // 1/j recurs with density 2^-j; the largest j seen near the end of a 2^14
    // prefix are residual, and 0 is never attained
    const auto f7 = detect_sublimits(materialize(fixtures::dyadic_harmonic(), N), 0.001, s);
    REQUIRE(!f7.clusters.empty());
    CHECK(f7.clusters.back().center == 1.0);
    CHECK(f7.clusters.back().weight.w_l_hat == Rational(1, 2));
    for (const auto& c : f7.clusters) CHECK(c.center > 0.0);
}

TEST_CASE("detect_sublimits accounts for every index", "[weights][property]") {
    const std::int64_t N = 6000;
    const auto s = WindowSchedule::default_for(N);
    for (const auto& spec : {fixtures::alternating(), fixtures::one_in_three(), fixtures::golden_rotation(),
                             fixtures::dyadic_harmonic(), fixtures::doubling_blocks(), fixtures::ones_then_zeros()}) {
        for (double eps : {0.001, 0.01, 0.2}) {
            const auto r = detect_sublimits(materialize(spec, N), eps, s);
            std::int64_t total = r.residual_count;
            for (const auto& c : r.clusters) {
                total += c.occurrences;
                REQUIRE(c.radius < eps);
                REQUIRE(c.last_index > 3 * N / 4);
            }
            REQUIRE(total == N);
            for (std::size_t k = 1; k < r.clusters.size(); ++k)
                REQUIRE(r.clusters[k].center > r.clusters[k - 1].center);
        }
    }
}

TEST_CASE("detect_sublimits rejects a degenerate epsilon", "[weights]") {
    const auto p = materialize(fixtures::all_ones(), 1000);
    try {
        detect_sublimits(p, 2.0, WindowSchedule::default_for(1000));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate_epsilon);
    }
    CHECK_THROWS_AS(detect_sublimits(p, 0.0, WindowSchedule::default_for(1000)), Error);
}

TEST_CASE("weight estimates are ordered and converge flags follow the gap", "[weights][property]") {
    const std::int64_t N = 8192;
    const auto s = WindowSchedule::default_for(N);
    const auto f6 = materialize(fixtures::doubling_blocks(), N);
    const auto w6 = sublimit_weight(f6, 1.0, 0.5, s);
    CHECK(w6.w_l_hat <= w6.w_u_hat);
    CHECK(w6.w_l_hat == Rational(0));
    CHECK(w6.w_u_hat == Rational(1));
    CHECK_FALSE(w6.converged);

    for (const auto& spec : {fixtures::golden_rotation(), fixtures::dyadic_harmonic()}) {
        const auto p = materialize(spec, N);
        for (double a = 0.05; a < 1.0; a += 0.1) {
            const auto w = sublimit_weight(p, a, 0.05, s);
            REQUIRE(w.w_l_hat <= w.w_u_hat);
            REQUIRE(Rational(0) <= w.w_l_hat);
            REQUIRE(w.w_u_hat <= Rational(1));
            if (w.converged) REQUIRE(w.gap().to_double() <= 0.02);
        }
    }
}
