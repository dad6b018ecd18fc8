#include <doctest.h>

#include <stdexcept>

#include "mlconf/arff.hpp"

using namespace mlconf;

namespace {

const char* kDense = R"(% toy file
@relation 'toy: -C 2'

@attribute label1 {0,1}
@attribute label2 {0,1}
@attribute num1 numeric
@attribute color {red,green,blue}

@data
1,0,2.5,red
0,1,-1.0,blue
1,1,0.0,green
)";

}  // namespace

TEST_CASE("dense parse with relation-level label count") {
    const MLDataset ds = parse_arff(kDense, LabelSpec{}, "toy");
    CHECK(ds.instance_count() == 3);
    CHECK(ds.label_count() == 2);
    // num1 plus the one-hot expansion of color
    REQUIRE(ds.feature_count() == 4);
    CHECK(ds.feature_names[0] == "num1");
    CHECK(ds.feature_names[1] == "color=red");
    CHECK(ds.labelsets[0].to_bits() == std::vector<int>{1, 0});
    CHECK(ds.labelsets[2].to_bits() == std::vector<int>{1, 1});
    CHECK(ds.features(0, 0) == 2.5);
    CHECK(ds.features(0, 1) == 1.0);  // red
    CHECK(ds.features(1, 3) == 1.0);  // blue
}

TEST_CASE("explicit label names override positional selection") {
    LabelSpec spec;
    spec.label_names = {"label2"};
    const MLDataset ds = parse_arff(kDense, spec, "toy");
    CHECK(ds.label_count() == 1);
    CHECK(ds.feature_count() == 6);  // label1 becomes a one-hot expanded feature
    CHECK(ds.feature_names[0] == "label1=0");
    CHECK(ds.labelsets[1].to_bits() == std::vector<int>{1});
}

TEST_CASE("negative MEKA -C counts labels from the end") {
    const char* text =
        "@relation x\n"
        "@attribute f numeric\n"
        "@attribute y {0,1}\n"
        "@data\n"
        "1.5,1\n";
    LabelSpec spec;
    spec.meka_c = -1;
    const MLDataset ds = parse_arff(text, spec, "x");
    CHECK(ds.label_count() == 1);
    CHECK(ds.feature_count() == 1);
    CHECK(ds.labelsets[0].to_bits() == std::vector<int>{1});
}

TEST_CASE("sparse rows default to zero / first nominal value") {
    const char* text =
        "@relation 'sp: -C 2'\n"
        "@attribute a {0,1}\n"
        "@attribute b {0,1}\n"
        "@attribute f1 numeric\n"
        "@attribute f2 numeric\n"
        "@data\n"
        "{0 1, 3 4.5}\n"
        "{}\n";
    const MLDataset ds = parse_arff(text, LabelSpec{}, "sp");
    CHECK(ds.labelsets[0].to_bits() == std::vector<int>{1, 0});
    CHECK(ds.features(0, 0) == 0.0);
    CHECK(ds.features(0, 1) == 4.5);
    CHECK(ds.labelsets[1].to_bits() == std::vector<int>{0, 0});
}

TEST_CASE("missing feature values are mean-imputed") {
    const char* text =
        "@relation 'm: -C 1'\n"
        "@attribute y {0,1}\n"
        "@attribute f numeric\n"
        "@data\n"
        "1,2.0\n"
        "0,?\n"
        "1,4.0\n";
    const MLDataset ds = parse_arff(text, LabelSpec{}, "m");
    CHECK(ds.features(1, 0) == doctest::Approx(3.0));
}

TEST_CASE("missing label values are an error") {
    const char* text =
        "@relation 'm: -C 1'\n"
        "@attribute y {0,1}\n"
        "@attribute f numeric\n"
        "@data\n"
        "?,2.0\n";
    CHECK_THROWS_AS(parse_arff(text, LabelSpec{}, "m"), std::runtime_error);
}

TEST_CASE("non-binary labels are rejected") {
    const char* text =
        "@relation 'm: -C 1'\n"
        "@attribute y numeric\n"
        "@attribute f numeric\n"
        "@data\n"
        "2,1.0\n";
    CHECK_THROWS(parse_arff(text, LabelSpec{}, "m"));
}

TEST_CASE("parse errors carry line numbers") {
    const char* text =
        "@relation 'm: -C 1'\n"
        "@attribute y {0,1}\n"
        "@attribute f numeric\n"
        "@data\n"
        "1,1.0,extra\n";
    try {
        parse_arff(text, LabelSpec{}, "m");
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
}

TEST_CASE("label spec must resolve somehow") {
    const char* text =
        "@relation plain\n"
        "@attribute y {0,1}\n"
        "@attribute f numeric\n"
        "@data\n"
        "1,1.0\n";
    CHECK_THROWS(parse_arff(text, LabelSpec{}, "plain"));  // no -C and no names
}
