// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "core/types.hpp"

using namespace wm;

TEST_CASE("sample range for the default 14-bit precision") {
    CHECK(sample_min(14) == -8192);
    CHECK(sample_max(14) == 8191);
    CHECK(sample_in_range(8191, 14));
    CHECK_FALSE(sample_in_range(8192, 14));
    CHECK_FALSE(sample_in_range(-8193, 14));
    CHECK(sample_in_range(-8193, 15));
    CHECK(clamp_sample(9000, 14) == 8191);
    CHECK(clamp_sample(-9000, 14) == -8192);
}

TEST_CASE("trace validation rejects out-of-range samples") {
    Trace t;
    t.samples = {0, 9000};
    CHECK_THROWS_AS(validate_trace(t, 14), Error);
    try {
        validate_trace(t, 14);
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::range);
    }
    t.samples = {0, 8191, -8192};
    CHECK_NOTHROW(validate_trace(t, 14));
}

TEST_CASE("corridor bounds from a template and offset") {
    Template tpl;
    tpl.samples = {0, 100, -100};
    const IntervalTemplate it = make_interval_template(tpl, 10);
    CHECK(it.upper == std::vector<sample_t>{10, 110, -90});
    CHECK(it.lower == std::vector<sample_t>{-10, 90, -110});
    CHECK(it.threshold == 3); // initialized to m
    CHECK(it.source_stride == 1);
    CHECK(it.source_length == 3);
}

TEST_CASE("bound precomputation saturates at the sample range") {
    Template tpl;
    tpl.samples = {8190};
    const IntervalTemplate it = make_interval_template(tpl, 10, 14);
    CHECK(it.upper[0] == 8191);
    CHECK(it.lower[0] == 8180);
}

TEST_CASE("strided template compares every stride-th sample, anchored at 0") {
    Template tpl;
    tpl.samples.assign(2800, 1);
    tpl.stride = 4;
    CHECK(tpl.compared_positions() == 700);
    CHECK(make_interval_template(tpl, 5).size() == 700);

    Template small;
    small.samples = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    small.stride = 3;
    CHECK(small.compared_positions() == 4); // indices 0, 3, 6, 9
    const IntervalTemplate it = make_interval_template(small, 0);
    CHECK(it.upper == std::vector<sample_t>{0, 3, 6, 9});
}

TEST_CASE("offset 0 collapses the corridor onto the template") {
    Template tpl;
    tpl.samples = {-5, 0, 7, 8191};
    const IntervalTemplate it = make_interval_template(tpl, 0);
    CHECK(it.upper == it.lower);
    CHECK(it.upper == tpl.samples);
}

TEST_CASE("corridor bounds widen monotonically with the offset") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> value(-8192, 8191);
    Template tpl;
    for (int i = 0; i < 64; ++i)
        tpl.samples.push_back(sample_t(value(rng)));

    IntervalTemplate prev = make_interval_template(tpl, 0);
    for (std::uint32_t offset : {1u, 2u, 5u, 17u, 100u, 9000u}) {
        const IntervalTemplate next = make_interval_template(tpl, offset);
        for (std::size_t i = 0; i < prev.size(); ++i) {
            CHECK(next.upper[i] >= prev.upper[i]);
            CHECK(next.lower[i] <= prev.lower[i]);
        }
        prev = next;
    }
}

TEST_CASE("interval template length is ceil(n / stride) exactly") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<std::size_t> lengths(1, 300);
    std::uniform_int_distribution<std::uint32_t> strides(1, 9);
    for (int iter = 0; iter < 200; ++iter) {
        Template tpl;
        tpl.samples.assign(lengths(rng), 0);
        tpl.stride = strides(rng);
        const std::size_t expect = (tpl.samples.size() + tpl.stride - 1) / tpl.stride;
        CHECK(make_interval_template(tpl, 3).size() == expect);
    }
}

TEST_CASE("empty template is rejected") {
    Template tpl;
    CHECK_THROWS_AS((void)make_interval_template(tpl, 1), Error);
}

TEST_CASE("threshold cannot exceed the compared position count") {
    Template tpl;
    tpl.samples = {1, 2, 3};
    IntervalTemplate it = make_interval_template(tpl, 1);
    CHECK_NOTHROW(it.set_threshold(3));
    CHECK_THROWS_AS(it.set_threshold(4), Error);
}
