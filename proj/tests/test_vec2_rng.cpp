#include <catch2/catch_amalgamated.hpp>

#include "gflock/rng.hpp"
#include "gflock/text.hpp"
#include "gflock/vec2.hpp"

using namespace gflock;

TEST_CASE("vec2 arithmetic and norms") {
    const Vec2 a{3, 4};
    CHECK(a.norm() == Catch::Approx(5.0));
    CHECK(a.norm_sq() == 25.0);
    CHECK((a + Vec2{1, -1}) == Vec2{4, 3});
    CHECK((a - Vec2{3, 4}) == Vec2{0, 0});
    CHECK((a * 2.0) == Vec2{6, 8});
    CHECK((2.0 * a) == Vec2{6, 8});
    CHECK(a.dot({1, 0}) == 3.0);
    CHECK(Vec2{1, 0}.cross({0, 1}) == 1.0);
    CHECK(a.normalized().norm() == Catch::Approx(1.0));
    CHECK(Vec2{}.normalized() == Vec2{0, 0});
}

TEST_CASE("vec2 rotation") {
    const Vec2 v{1, 0};
    const Vec2 r = v.rotated(3.141592653589793 / 2.0);
    CHECK(r.x == Catch::Approx(0.0).margin(1e-15));
    CHECK(r.y == Catch::Approx(1.0));
    CHECK(v.rotated(0.7).norm() == Catch::Approx(1.0));
}

TEST_CASE("vec2 finiteness check") {
    CHECK(Vec2{1, 2}.finite());
    CHECK_FALSE(Vec2{std::numeric_limits<double>::quiet_NaN(), 0}.finite());
    CHECK_FALSE(Vec2{0, std::numeric_limits<double>::infinity()}.finite());
}

TEST_CASE("rng streams are deterministic and independent") {
    RngStream a(123, "spawn");
    RngStream b(123, "spawn");
    RngStream c(123, "mutation");
    bool all_equal = true;
    bool any_diff_from_c = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next_u64();
        if (va != b.next_u64()) all_equal = false;
        if (va != c.next_u64()) any_diff_from_c = true;
    }
    CHECK(all_equal);
    CHECK(any_diff_from_c);
}

TEST_CASE("adding a consumer does not perturb other streams") {
    // the stream for a given (master, name) never depends on what other
    // names are in use
    RngStream before(7, "spawn");
    RngStream unrelated(7, "completely-new-purpose");
    (void)unrelated.next_u64();
    RngStream after(7, "spawn");
    for (int i = 0; i < 10; ++i) CHECK(before.next_u64() == after.next_u64());
}

TEST_CASE("uniform draws stay in range") {
    RngStream r(99, "test");
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform(-2.0, 3.0);
        REQUIRE(u >= -2.0);
        REQUIRE(u < 3.0);
    }
    for (int i = 0; i < 1000; ++i) REQUIRE(r.uniform_index(7) < 7);
}

TEST_CASE("gaussian moments are roughly right") {
    RngStream r(5, "gauss");
    double sum = 0.0, sum_sq = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const double g = r.gaussian(2.0, 0.5);
        sum += g;
        sum_sq += g * g;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(mean == Catch::Approx(2.0).margin(0.02));
    CHECK(var == Catch::Approx(0.25).margin(0.02));
}

TEST_CASE("rng state save/restore resumes the exact sequence") {
    RngStream r(42, "state");
    for (int i = 0; i < 17; ++i) (void)r.next_u64();
    const std::string state = r.save_state();
    std::vector<std::uint64_t> expected;
    for (int i = 0; i < 20; ++i) expected.push_back(r.next_u64());
    RngStream fresh(0);
    fresh.restore_state(state);
    for (std::uint64_t e : expected) CHECK(fresh.next_u64() == e);
    CHECK_THROWS_AS(fresh.restore_state("not a state"), integrity_error);
}

TEST_CASE("double text round-trip is exact") {
    RngStream r(1, "fmt");
    for (int i = 0; i < 1000; ++i) {
        const double v = (r.uniform() - 0.5) * std::pow(10.0, r.uniform(-6, 6));
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(parse_double("1.5") == 1.5);
    CHECK_THROWS_AS(parse_double("1.5x"), config_error);
    CHECK_THROWS_AS(parse_double(""), config_error);
    CHECK(parse_long("42") == 42);
    CHECK_THROWS_AS(parse_long("4.2"), config_error);
}

TEST_CASE("csv line splitting") {
    const auto f = split_csv_line("a,b,,d");
    REQUIRE(f.size() == 4);
    CHECK(f[0] == "a");
    CHECK(f[2] == "");
    CHECK(split_csv_line("single").size() == 1);
}
