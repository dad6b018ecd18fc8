#include <doctest.h>

#include "mlconf/arff.hpp"
#include "mlconf/synth.hpp"

using namespace mlconf;

TEST_CASE("generation is deterministic in the seed") {
    const SyntheticData a = synth_generate(3, 50, SynthDependence::Chain, 11);
    const SyntheticData b = synth_generate(3, 50, SynthDependence::Chain, 11);
    const SyntheticData c = synth_generate(3, 50, SynthDependence::Chain, 12);
    CHECK(a.dataset.features == b.dataset.features);
    CHECK(a.dataset.features != c.dataset.features);
    for (int i = 0; i < 50; ++i) {
        CHECK(a.dataset.labelsets[i] == b.dataset.labelsets[i]);
    }
}

TEST_CASE("true joints are proper distributions aligned with the data") {
    const SyntheticData s = synth_generate(4, 100, SynthDependence::Independent, 5);
    REQUIRE(s.true_joints.size() == 100);
    for (const LabelsetDistribution& d : s.true_joints) {
        CHECK(d.label_count() == 4);
        double total = 0.0;
        for (double v : d.probs()) {
            CHECK(v >= 0.0);
            total += v;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("independent joints factor over the marginals") {
    const SyntheticData s = synth_generate(3, 20, SynthDependence::Independent, 9);
    for (const LabelsetDistribution& d : s.true_joints) {
        const LabelsetDistribution product = joint_from_marginals(marginals(d));
        for (std::size_t k = 0; k < d.size(); ++k) {
            CHECK(d.prob(k) == doctest::Approx(product.prob(k)).epsilon(1e-9));
        }
    }
}

TEST_CASE("generated arff text parses back to the same data") {
    const SyntheticData s = synth_generate(3, 30, SynthDependence::Chain, 21);
    const MLDataset back = parse_arff(dataset_to_arff(s.dataset), LabelSpec{}, "back");
    CHECK(back.instance_count() == 30);
    CHECK(back.label_count() == 3);
    CHECK(back.feature_count() == s.dataset.feature_count());
    for (int i = 0; i < 30; ++i) {
        CHECK(back.labelsets[i] == s.dataset.labelsets[i]);
        for (Eigen::Index j = 0; j < back.feature_count(); ++j) {
            CHECK(back.features(i, j) == doctest::Approx(s.dataset.features(i, j)));
        }
    }
}

TEST_CASE("label count beyond the generator cap is rejected") {
    CHECK_THROWS(synth_generate(11, 10, SynthDependence::Chain, 0));
    CHECK_THROWS(synth_generate(0, 10, SynthDependence::Chain, 0));
}
