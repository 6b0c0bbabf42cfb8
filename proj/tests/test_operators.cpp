#include <catch2/catch_amalgamated.hpp>

#include <genelab/core.hpp>
#include <genelab/operators.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "script_rng.hpp"

using namespace genelab;
using genelab::testing::script_rng;

namespace {

genotype<double> real_g(const domain_ptr<double>& d, std::vector<double> v) {
    return genotype<double>(d, std::move(v));
}

bool is_permutation_genotype(const genotype<std::int64_t>& g) {
    std::vector<std::int64_t> v(g.values().begin(), g.values().end());
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != static_cast<std::int64_t>(i)) return false;
    return true;
}

}  // namespace

TEST_CASE("gaussian mutation") {
    auto d = uniform_real_domain(2, -10.0, 10.0);
    SECTION("p = 0 leaves the parent unchanged") {
        auto v = gaussian_mutation<double, script_rng>(1.0, 0.0);
        script_rng r;
        r.bools = {false, false};
        auto child = v.apply({real_g(d, {1.0, 2.0})}, r);
        CHECK(child[0].value_vector() == std::vector<double>{1.0, 2.0});
    }
    SECTION("boundary violation clamps to the endpoint") {
        auto v = gaussian_mutation<double, script_rng>(0.5, 1.0);
        script_rng r;
        r.bools = {true, true};
        r.normals = {1.0, -100.0};
        auto child = v.apply({real_g(d, {10.0, 0.0})}, r);
        CHECK(child[0][0] == 10.0);    // 10 + 0.5 clamps to sup
        CHECK(child[0][1] == -10.0);   // 0 - 50 clamps to inf
    }
    SECTION("zero perturbation is the identity") {
        auto v = gaussian_mutation<double, script_rng>(3.0, 1.0);
        script_rng r;
        r.bools = {true, true};
        r.normals = {0.0, 0.0};
        auto child = v.apply({real_g(d, {1.5, -2.5})}, r);
        CHECK(child[0].value_vector() == std::vector<double>{1.5, -2.5});
    }
    SECTION("clamping property: children stay in box") {
        auto v = gaussian_mutation(5.0, 1.0);
        rng r(7);
        auto g = random_genotype(d, r);
        for (int i = 0; i < 1000; ++i) {
            auto child = v.apply({g}, r);
            CHECK(validate(child[0]) == validity::in_g);
            g = child[0];
        }
    }
}

TEST_CASE("swap mutation") {
    SECTION("forced loci exchange values") {
        auto d = uniform_integer_domain(3, 0, 100);
        auto v = swap_mutation<std::int64_t, script_rng>();
        script_rng r;
        r.ints = {0, 2};
        auto child = v.apply({genotype<std::int64_t>(d, {7, 8, 9})}, r);
        CHECK(child[0].value_vector() == std::vector<std::int64_t>{9, 8, 7});
    }
    SECTION("equal loci yield a no-op") {
        auto d = uniform_integer_domain(3, 0, 100);
        auto v = swap_mutation<std::int64_t, script_rng>();
        script_rng r;
        r.ints = {1, 1};
        auto child = v.apply({genotype<std::int64_t>(d, {7, 8, 9})}, r);
        CHECK(child[0].value_vector() == std::vector<std::int64_t>{7, 8, 9});
    }
    SECTION("permutations stay permutations") {
        auto d = permutation_domain(8);
        auto v = swap_mutation<std::int64_t>();
        rng r(11);
        auto g = random_genotype(d, r);
        for (int i = 0; i < 500; ++i) {
            g = v.apply({g}, r)[0];
            CHECK(is_permutation_genotype(g));
        }
    }
}

TEST_CASE("random reset mutation") {
    auto d = uniform_real_domain(2, 0.0, 10.0);
    SECTION("p = 0 is the identity") {
        auto v = random_reset_mutation<double, script_rng>(0.0);
        script_rng r;
        r.bools = {false, false};
        auto child = v.apply({real_g(d, {3.0, 4.0})}, r);
        CHECK(child[0].value_vector() == std::vector<double>{3.0, 4.0});
    }
    SECTION("forced draws land verbatim on a binary genotype") {
        auto bd = binary_domain(2);
        auto v = random_reset_mutation<std::int64_t, script_rng>(1.0);
        script_rng r;
        r.bools = {true, true};
        r.ints = {1, 0};
        auto child = v.apply({genotype<std::int64_t>(bd, {0, 1})}, r);
        CHECK(child[0].value_vector() == std::vector<std::int64_t>{1, 0});
    }
    SECTION("p = 1 keeps every child gene in box") {
        auto v = random_reset_mutation<double>(1.0);
        rng r(3);
        for (int i = 0; i < 1000; ++i) {
            auto g = random_genotype(d, r);
            auto child = v.apply({g}, r);
            CHECK(validate(child[0]) == validity::in_g);
        }
    }
    SECTION("permutation representation is rejected") {
        auto pd = permutation_domain(3);
        auto v = random_reset_mutation<std::int64_t>(1.0);
        rng r(1);
        CHECK_THROWS_AS(v.apply({random_genotype(pd, r)}, r),
                        wrong_representation);
    }
}

TEST_CASE("self-adaptive mutation") {
    const std::size_t c = 2;
    auto base = uniform_real_domain(c, -10.0, 10.0);
    auto d = self_adaptive_domain(base);
    SECTION("default taus") {
        CHECK_THAT(default_tau0(4), Catch::Matchers::WithinAbs(0.35355, 1e-5));
        CHECK_THAT(default_tau1(4), Catch::Matchers::WithinAbs(0.5, 1e-9));
    }
    SECTION("all-zero draws leave the genotype unchanged") {
        auto v = self_adaptive_mutation<script_rng>();
        script_rng r;
        r.normals = {0.0, 0.0, 0.0, 0.0, 0.0};  // shared + 2 sigma + 2 x
        auto g = real_g(d, {1.0, -1.0, 0.5, 0.25});
        auto child = v.apply({g}, r);
        CHECK(child[0].value_vector() == std::vector<double>{1.0, -1.0, 0.5, 0.25});
    }
    SECTION("sigma clamps at the supremum") {
        auto v = self_adaptive_mutation<script_rng>(1.0, 1.0);
        script_rng r;
        r.normals = {50.0, 0.0, 0.0, 0.0, 0.0};  // huge shared draw
        const double sigma_sup = d->gene(c).hi;
        auto g = real_g(d, {0.0, 0.0, sigma_sup, sigma_sup});
        auto child = v.apply({g}, r);
        CHECK(child[0][c] == sigma_sup);
        CHECK(child[0][c + 1] == sigma_sup);
    }
    SECTION("x mutation uses the freshly updated sigma") {
        auto v = self_adaptive_mutation<script_rng>(1.0, 0.0);
        script_rng r;
        // shared = ln 2 doubles both sigmas; x draws of 1.0 add sigma'.
        r.normals = {std::log(2.0), 0.0, 0.0, 1.0, 1.0};
        auto g = real_g(d, {0.0, 0.0, 1.0, 2.0});
        auto child = v.apply({g}, r);
        CHECK_THAT(child[0][0], Catch::Matchers::WithinAbs(2.0, 1e-12));
        CHECK_THAT(child[0][1], Catch::Matchers::WithinAbs(4.0, 1e-12));
    }
    SECTION("children stay inside both x and sigma boxes") {
        auto v = self_adaptive_mutation();
        rng r(17);
        auto g = random_genotype(d, r);
        for (int i = 0; i < 1000; ++i) {
            g = v.apply({g}, r)[0];
            CHECK(validate(g) == validity::in_g);
        }
    }
}

TEST_CASE("arithmetic recombination") {
    auto d = uniform_real_domain(2, -10.0, 10.0);
    auto v = arithmetic_recombination<double, script_rng>();
    script_rng r;
    SECTION("midpoint formula") {
        auto child = v.apply({real_g(d, {0.0, 0.0}), real_g(d, {2.0, 4.0})}, r);
        REQUIRE(child.size() == 1);
        CHECK(child[0].value_vector() == std::vector<double>{1.0, 2.0});
    }
    SECTION("identical parents reproduce themselves") {
        auto child = v.apply({real_g(d, {3.0, -3.0}), real_g(d, {3.0, -3.0})}, r);
        CHECK(child[0].value_vector() == std::vector<double>{3.0, -3.0});
    }
    SECTION("convexity keeps children in box") {
        auto vr = arithmetic_recombination();
        rng rr(23);
        for (int i = 0; i < 1000; ++i) {
            auto child = vr.apply({random_genotype(d, rr), random_genotype(d, rr)}, rr);
            CHECK(validate(child[0]) == validity::in_g);
        }
    }
}

TEST_CASE("single arithmetic recombination") {
    auto d = uniform_real_domain(2, -10.0, 10.0);
    SECTION("forced k") {
        auto v = single_arithmetic_recombination<double, script_rng>();
        script_rng r;
        r.ints = {1};
        auto children =
            v.apply({real_g(d, {0.0, 0.0}), real_g(d, {2.0, 4.0})}, r);
        REQUIRE(children.size() == 2);
        CHECK(children[0].value_vector() == std::vector<double>{0.0, 2.0});
        CHECK(children[1].value_vector() == std::vector<double>{2.0, 2.0});
    }
    SECTION("identical parents") {
        auto v = single_arithmetic_recombination<double, script_rng>();
        script_rng r;
        r.ints = {0};
        auto children =
            v.apply({real_g(d, {5.0, 6.0}), real_g(d, {5.0, 6.0})}, r);
        CHECK(children[0].value_vector() == std::vector<double>{5.0, 6.0});
        CHECK(children[1].value_vector() == std::vector<double>{5.0, 6.0});
    }
    SECTION("children differ from their parent at most at one locus") {
        auto dd = uniform_real_domain(5, 0.0, 1.0);
        auto v = single_arithmetic_recombination();
        rng r(31);
        for (int trial = 0; trial < 200; ++trial) {
            auto a = random_genotype(dd, r);
            auto b = random_genotype(dd, r);
            auto children = v.apply({a, b}, r);
            int diff_a = 0, diff_b = 0;
            for (std::size_t i = 0; i < 5; ++i) {
                if (children[0][i] != a[i]) ++diff_a;
                if (children[1][i] != b[i]) ++diff_b;
            }
            CHECK(diff_a <= 1);
            CHECK(diff_b <= 1);
        }
    }
}

TEST_CASE("one point crossover") {
    auto d = uniform_integer_domain(3, 0, 100);
    auto g1 = genotype<std::int64_t>(d, {1, 2, 3});
    auto g2 = genotype<std::int64_t>(d, {4, 5, 6});
    SECTION("forced k = 1 exchanges tails") {
        auto v = one_point_crossover<std::int64_t, script_rng>();
        script_rng r;
        r.ints = {1};
        auto children = v.apply({g1, g2}, r);
        CHECK(children[0].value_vector() == std::vector<std::int64_t>{1, 5, 6});
        CHECK(children[1].value_vector() == std::vector<std::int64_t>{4, 2, 3});
    }
    SECTION("k = 0 swaps the parents") {
        auto v = one_point_crossover<std::int64_t, script_rng>();
        script_rng r;
        r.ints = {0};
        auto children = v.apply({g1, g2}, r);
        CHECK(children[0].value_vector() == g2.value_vector());
        CHECK(children[1].value_vector() == g1.value_vector());
    }
    SECTION("per-locus multisets are preserved") {
        auto dd = uniform_integer_domain(6, 0, 9);
        auto v = one_point_crossover<std::int64_t>();
        rng r(41);
        for (int trial = 0; trial < 300; ++trial) {
            auto a = random_genotype(dd, r);
            auto b = random_genotype(dd, r);
            auto children = v.apply({a, b}, r);
            for (std::size_t i = 0; i < 6; ++i) {
                std::multiset<std::int64_t> in{a[i], b[i]};
                std::multiset<std::int64_t> out{children[0][i], children[1][i]};
                CHECK(in == out);
            }
        }
    }
    SECTION("permutation representation is rejected") {
        auto pd = permutation_domain(3);
        auto v = one_point_crossover<std::int64_t>();
        rng r(1);
        auto a = random_genotype(pd, r);
        CHECK_THROWS_AS(v.apply({a, a}, r), wrong_representation);
    }
}

TEST_CASE("cut and crossfill") {
    auto d = permutation_domain(4);
    SECTION("hand-traced fill") {
        auto v = cut_and_crossfill<std::int64_t, script_rng>();
        script_rng r;
        r.ints = {2};
        auto children = v.apply({genotype<std::int64_t>(d, {0, 1, 2, 3}),
                                 genotype<std::int64_t>(d, {3, 1, 0, 2})},
                                r);
        CHECK(children[0].value_vector() == std::vector<std::int64_t>{0, 1, 3, 2});
        CHECK(children[1].value_vector() == std::vector<std::int64_t>{3, 1, 0, 2});
    }
    SECTION("identical parents reproduce themselves") {
        auto v = cut_and_crossfill<std::int64_t, script_rng>();
        script_rng r;
        r.ints = {1};
        genotype<std::int64_t> p(d, {2, 0, 3, 1});
        auto children = v.apply({p, p}, r);
        CHECK(children[0].value_vector() == p.value_vector());
        CHECK(children[1].value_vector() == p.value_vector());
    }
    SECTION("children are permutations for random parents") {
        auto v = cut_and_crossfill<std::int64_t>();
        for (std::size_t c = 2; c <= 8; ++c) {
            auto dc = permutation_domain(c);
            rng r(c);
            for (int trial = 0; trial < 100; ++trial) {
                auto a = random_genotype(dc, r);
                auto b = random_genotype(dc, r);
                auto children = v.apply({a, b}, r);
                CHECK(is_permutation_genotype(children[0]));
                CHECK(is_permutation_genotype(children[1]));
            }
        }
    }
    SECTION("c < 2 is rejected") {
        auto d1 = permutation_domain(1);
        auto v = cut_and_crossfill<std::int64_t>();
        rng r(1);
        auto a = random_genotype(d1, r);
        CHECK_THROWS_AS(v.apply({a, a}, r), std::invalid_argument);
    }
}

TEST_CASE("stochastic wrapper") {
    auto d = uniform_real_domain(2, -10.0, 10.0);
    genotype<double> g0(d, {1.0, 1.0}), g1(d, {2.0, 2.0});
    SECTION("p = 1 behaves exactly as the wrapped variation") {
        auto v = stochastic(arithmetic_recombination<double, script_rng>(), 1.0);
        script_rng r;
        r.bools = {true};
        auto child = v.apply({g0, g1}, r);
        CHECK(child[0].value_vector() == std::vector<double>{1.5, 1.5});
    }
    SECTION("p = 0, n = m = 2 passes the parents through") {
        auto v = stochastic(single_arithmetic_recombination<double, script_rng>(), 0.0);
        script_rng r;
        r.bools = {false};
        auto out = v.apply({g0, g1}, r);
        REQUIRE(out.size() == 2);
        CHECK(out[0].value_vector() == g0.value_vector());
        CHECK(out[1].value_vector() == g1.value_vector());
    }
    SECTION("p = 0, n = 2, m = 1 deletes the element at k") {
        auto v = stochastic(arithmetic_recombination<double, script_rng>(), 0.0);
        script_rng r;
        r.bools = {false};
        r.ints = {0};
        auto out = v.apply({g0, g1}, r);
        REQUIRE(out.size() == 1);
        CHECK(out[0].value_vector() == g1.value_vector());
    }
    SECTION("m = n + 1 duplicates the element at k") {
        // Hand-built expanding variation for the identity branch.
        variation<double, script_rng> expand{
            1, 2, [](const population<double>& p, script_rng&) {
                return population<double>{p[0], p[0]};
            }};
        auto v = stochastic(std::move(expand), 0.0);
        script_rng r;
        r.bools = {false};
        r.ints = {0};
        auto out = v.apply({g0}, r);
        REQUIRE(out.size() == 2);
        CHECK(out[0].value_vector() == g0.value_vector());
        CHECK(out[1].value_vector() == g0.value_vector());
    }
    SECTION("unsupported arity pair is rejected") {
        variation<double, script_rng> weird{
            3, 1, [](const population<double>& p, script_rng&) {
                return population<double>{p[0]};
            }};
        CHECK_THROWS_AS(stochastic(std::move(weird), 0.5), std::invalid_argument);
    }
}

TEST_CASE("recombination composed with mapped mutation") {
    auto d = uniform_real_domain(2, -10.0, 10.0);
    genotype<double> g0(d, {0.0, 0.0}), g1(d, {2.0, 4.0});
    SECTION("inactive mutation equals the recombination alone") {
        auto v = compose_recombination_mutation(
            arithmetic_recombination<double, script_rng>(),
            stochastic(gaussian_mutation<double, script_rng>(1.0, 1.0), 0.0));
        script_rng r;
        r.bools = {false};
        auto out = v.apply({g0, g1}, r);
        CHECK(out[0].value_vector() == std::vector<double>{1.0, 2.0});
    }
    SECTION("inactive recombination passes parents to the mutation") {
        auto v = compose_recombination_mutation(
            stochastic(single_arithmetic_recombination<double, script_rng>(), 0.0),
            stochastic(gaussian_mutation<double, script_rng>(1.0, 1.0), 0.0));
        script_rng r;
        r.bools = {false, false, false};
        auto out = v.apply({g0, g1}, r);
        REQUIRE(out.size() == 2);
        CHECK(out[0].value_vector() == g0.value_vector());
        CHECK(out[1].value_vector() == g1.value_vector());
    }
    SECTION("arithmetic recombination with zero-draw gaussian mutation") {
        auto v = compose_recombination_mutation(
            arithmetic_recombination<double, script_rng>(),
            gaussian_mutation<double, script_rng>(1.0, 1.0));
        script_rng r;
        r.bools = {true, true};
        r.normals = {0.0, 0.0};
        auto out = v.apply({g0, g1}, r);
        CHECK(out[0].value_vector() == std::vector<double>{1.0, 2.0});
    }
}

TEST_CASE("arity contract enforced") {
    auto d = uniform_real_domain(2, 0.0, 1.0);
    auto v = arithmetic_recombination();
    rng r(1);
    CHECK_THROWS_AS(v.apply({random_genotype(d, r)}, r), size_mismatch);
}
