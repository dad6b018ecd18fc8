#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mlconf/confidence.hpp"
#include "mlconf/stats.hpp"

using namespace mlconf;

namespace {

LabelsetDistribution example_dist() {
    return make_distribution({0.0, 1.0 / 3.0, 0.25, 0.0, 0.25, 0.0, 1.0 / 6.0, 0.0}, 3);
}

LabelsetDistribution random_dist(std::mt19937_64& rng, int L) {
    std::uniform_real_distribution<double> u(1e-6, 1.0);
    std::vector<double> p(std::size_t{1} << L);
    double total = 0.0;
    for (double& v : p) total += (v = u(rng));
    for (double& v : p) v /= total;
    return make_distribution(p, L);
}

}  // namespace

TEST_CASE("example distribution scores, hand-computed fractions first") {
    // Oracles, derived by hand from the closed forms with exact fractions:
    //   max p = 1/3, second max 1/4, sum p^2 = 1/9 + 2/16 + 1/36 = 19/72
    const double hp = (8.0 * (1.0 / 3.0) - 1.0) / 7.0;              // 5/21
    const double tg = 1.0 / 3.0 - 0.25;                             // 1/12
    const double entropy = (1.0 / 3.0) * std::log(3.0) + 0.5 * std::log(4.0) +
                           (1.0 / 6.0) * std::log(6.0);
    const double se = 1.0 - entropy / std::log(8.0);
    const double ce = 1.0 + std::log(19.0 / 72.0) / std::log(8.0);
    const double me = 1.0 + std::log(1.0 / 3.0) / std::log(8.0);
    const double gi = (19.0 / 72.0 - 0.125) / (1.0 - 0.125);        // 10/63

    const LabelsetDistribution d = example_dist();
    CHECK(c_hp(d) == doctest::Approx(hp).epsilon(1e-14));
    CHECK(c_tg(d) == doctest::Approx(tg).epsilon(1e-14));
    CHECK(c_se(d) == doctest::Approx(se).epsilon(1e-14));
    CHECK(c_ce(d) == doctest::Approx(ce).epsilon(1e-14));
    CHECK(c_me(d) == doctest::Approx(me).epsilon(1e-14));
    CHECK(c_gi(d) == doctest::Approx(gi).epsilon(1e-14));
    CHECK(c_cs(d) == doctest::Approx(gi).epsilon(1e-14));

    // 4-decimal reference points
    CHECK(c_hp(d) == doctest::Approx(0.2381).epsilon(5e-4));
    CHECK(c_tg(d) == doctest::Approx(0.0833).epsilon(5e-4));
    CHECK(c_se(d) == doctest::Approx(0.3470).epsilon(5e-4));
    CHECK(c_ce(d) == doctest::Approx(0.3593).epsilon(5e-4));
    CHECK(c_me(d) == doctest::Approx(0.4717).epsilon(5e-4));
    CHECK(c_gi(d) == doctest::Approx(0.1587).epsilon(5e-4));
}

TEST_CASE("all candidates hit 0 on uniform and 1 on point masses") {
    for (int L = 1; L <= 5; ++L) {
        const LabelsetDistribution u = uniform(L);
        for (CandidateKind k : kAllCandidates) {
            CHECK(score(u, k) == doctest::Approx(0.0).epsilon(1e-12));
        }
        for (std::uint32_t idx = 0; idx < (1u << L); ++idx) {
            const LabelsetDistribution pm = point_mass(Labelset(idx, L));
            for (CandidateKind k : kAllCandidates) {
                CHECK(score(pm, k) == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("scores stay in [0,1] on random distributions") {
    std::mt19937_64 rng(4242);
    for (int rep = 0; rep < 200; ++rep) {
        const LabelsetDistribution d = random_dist(rng, 4);
        for (CandidateKind k : kAllCandidates) {
            const double s = score(d, k);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
}

TEST_CASE("duplicated maximum makes the top gap zero") {
    const LabelsetDistribution tied = make_distribution({0.4, 0.4, 0.1, 0.1}, 2);
    CHECK(c_tg(tied) == doctest::Approx(0.0).epsilon(1e-15));
    const LabelsetDistribution near = make_distribution({0.4, 0.3, 0.2, 0.1}, 2);
    CHECK(c_tg(near) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("entropy treats zero cells as contributing nothing") {
    const LabelsetDistribution half = make_distribution({0.5, 0.5, 0.0, 0.0}, 2);
    // H = ln 2, so SE = 1 - ln2/ln4 = 0.5
    CHECK(c_se(half) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("order equivalences: HP~ME and CE~GI~CS") {
    std::mt19937_64 rng(7);
    std::vector<double> hp, me, ce, gi, cs;
    for (int rep = 0; rep < 300; ++rep) {
        const LabelsetDistribution d = random_dist(rng, 4);
        hp.push_back(c_hp(d));
        me.push_back(c_me(d));
        ce.push_back(c_ce(d));
        gi.push_back(c_gi(d));
        cs.push_back(c_cs(d));
        CHECK(std::abs(c_gi(d) - c_cs(d)) < 1e-12);
    }
    CHECK(kendall_tau(hp, me) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kendall_tau(ce, gi) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kendall_tau(ce, cs) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("candidate names round trip") {
    for (CandidateKind k : kAllCandidates) {
        CHECK(candidate_from_name(candidate_name(k)) == k);
    }
    CHECK_THROWS(candidate_from_name("XX"));
}

TEST_CASE("score_all covers the seven candidates consistently") {
    const LabelsetDistribution d = example_dist();
    const auto all = score_all(d);
    REQUIRE(all.size() == 7);
    for (CandidateKind k : kAllCandidates) CHECK(all.at(k) == score(d, k));
}
