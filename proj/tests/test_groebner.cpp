#include <gtest/gtest.h>

#include <random>

#include "ssp4/solve.hpp"

using namespace ssp4;

namespace {

std::vector<Poly> parse_all(const RingPtr<Fp>& r, const std::vector<std::string>& s) {
    std::vector<Poly> out;
    for (auto& t : s) out.push_back(parse_poly(r, t));
    return out;
}

Poly random_poly(const RingPtr<Fp>& r, std::mt19937& g, int maxdeg, int terms) {
    std::uint32_t p = r->one.modulus();
    int n = r->nvars();
    std::vector<Poly::Term> t;
    for (int k = 0; k < terms; ++k) {
        std::vector<int> e(static_cast<std::size_t>(n), 0);
        int d = static_cast<int>(g() % (static_cast<unsigned>(maxdeg) + 1));
        for (int j = 0; j < d; ++j) e[g() % static_cast<unsigned>(n)]++;
        t.push_back({Monomial::from_exponents(e), Fp(g() % p, p)});
    }
    return Poly::from_terms(r, std::move(t));
}

}  // namespace

TEST(Groebner, SmallExamples) {
    auto r = make_fp_ring(5, {"x", "y"});
    auto gb = groebner(parse_all(r, {"x^2", "x*y"}), r);
    ASSERT_EQ(gb.basis.size(), 2u);
    EXPECT_EQ(gb.basis[0], parse_poly(r, "x*y"));
    EXPECT_EQ(gb.basis[1], parse_poly(r, "x^2"));
    EXPECT_TRUE(groebner(parse_all(r, {"1"}), r).is_unit());
    EXPECT_TRUE(groebner(parse_all(r, {"x-1", "x-2"}), r).is_unit());
    EXPECT_TRUE(normal_form(parse_poly(r, "1"), groebner(parse_all(r, {"1"}), r)).is_zero());
    auto g2 = groebner(parse_all(r, {"x^2"}), r);
    EXPECT_TRUE(normal_form(parse_poly(r, "x^2*y"), g2).is_zero());
    EXPECT_EQ(normal_form(parse_poly(r, "x^2*y + y"), g2), parse_poly(r, "y"));
}

TEST(Groebner, Inconsistency) {
    auto r = make_fp_ring(5, {"x"});
    EXPECT_TRUE(is_inconsistent(parse_all(r, {"x", "x-1"}), r));
    EXPECT_FALSE(is_inconsistent(parse_all(r, {"x"}), r));
    auto ra = make_fp_ring(5, {"a"});
    EXPECT_FALSE(is_inconsistent(parse_all(ra, {"a^2+1"}), ra));
}

TEST(Groebner, ReducedBasisProperties) {
    std::mt19937 g(42);
    auto r = make_fp_ring(7, {"x", "y", "z"});
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Poly> gens;
        int k = 2 + static_cast<int>(g() % 2);
        for (int i = 0; i < k; ++i) gens.push_back(random_poly(r, g, 3, 4));
        auto gb = groebner(gens, r, {false, 0});
        for (auto& f : gens) EXPECT_TRUE(normal_form(f, gb).is_zero());
        // monic, and no term divisible by another element's leading monomial
        for (std::size_t i = 0; i < gb.basis.size(); ++i) {
            EXPECT_EQ(gb.basis[i].leading_coefficient().value(), 1u);
            for (std::size_t j = 0; j < gb.basis.size(); ++j) {
                if (i == j) continue;
                for (auto& t : gb.basis[i].terms()) EXPECT_FALSE(gb.basis[j].leading_monomial().divides(t.first));
            }
        }
        // S-polynomials reduce to zero
        for (std::size_t i = 0; i < gb.basis.size(); ++i)
            for (std::size_t j = i + 1; j < gb.basis.size(); ++j) {
                auto& a = gb.basis[i];
                auto& b = gb.basis[j];
                auto l = Monomial::lcm(a.leading_monomial(), b.leading_monomial());
                auto s = a.mul_monomial(l / a.leading_monomial(), Fp(1, 7)) -
                         b.mul_monomial(l / b.leading_monomial(), Fp(1, 7));
                EXPECT_TRUE(normal_form(s, gb).is_zero());
            }
        // shuffled generators give the identical reduced basis
        auto shuffled = gens;
        std::shuffle(shuffled.begin(), shuffled.end(), g);
        auto gb2 = groebner(shuffled, r, {false, 0});
        ASSERT_EQ(gb2.basis.size(), gb.basis.size());
        for (std::size_t i = 0; i < gb.basis.size(); ++i) EXPECT_EQ(gb.basis[i], gb2.basis[i]);
        // recomputing from the basis is idempotent
        auto gb3 = groebner(gb.basis, r, {false, 0});
        ASSERT_EQ(gb3.basis.size(), gb.basis.size());
        for (std::size_t i = 0; i < gb.basis.size(); ++i) EXPECT_EQ(gb.basis[i], gb3.basis[i]);
    }
}

TEST(Groebner, MatrixAndPairwiseEnginesAgree) {
    std::mt19937 g(7);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + static_cast<int>(g() % 3);
        std::vector<std::string> names{"a", "b", "c", "d"};
        names.resize(static_cast<std::size_t>(n));
        std::uint32_t p = trial % 2 ? 5 : 11;
        auto r = make_fp_ring(p, names);
        std::vector<Poly> gens;
        int k = 2 + static_cast<int>(g() % 3);
        for (int i = 0; i < k; ++i) gens.push_back(random_poly(r, g, 4, 5));
        GBOptions f4{false, 0, true}, bb{false, 0, false};
        auto a = groebner(gens, r, f4), b = groebner(gens, r, bb);
        ASSERT_EQ(a.basis.size(), b.basis.size()) << trial;
        for (std::size_t i = 0; i < a.basis.size(); ++i) EXPECT_EQ(a.basis[i], b.basis[i]) << trial;
    }
}

TEST(Variety, SpecExamples) {
    auto ra = make_fp_ring(5, {"a"});
    EXPECT_EQ(variety_over_fq(parse_all(ra, {"a^2+1"}), ra, 5), (std::vector<Point>{{2}, {3}}));
    EXPECT_EQ(brute_force_variety(parse_all(ra, {"a^2+1"}), ra, 5), (std::vector<Point>{{2}, {3}}));
    EXPECT_TRUE(variety_over_fq(parse_all(ra, {"1"}), ra, 5).empty());
    EXPECT_EQ(brute_force_variety(parse_all(ra, {"a^5-a"}), ra, 5).size(), 5u);
    auto rb = make_fp_ring(11, {"a", "b"});
    EXPECT_EQ(variety_over_fq(parse_all(rb, {"a-3", "b-a"}), rb, 11), (std::vector<Point>{{3, 3}}));
    EXPECT_EQ(brute_force_variety({}, rb, 11).size(), 121u);
    EXPECT_EQ(variety_over_fq({}, rb, 11).size(), 121u);
    EXPECT_THROW(brute_force_variety({}, rb, 11, 100), BudgetExceeded);
}

TEST(Variety, UnitVariables) {
    auto r = make_fp_ring(5, {"a", "b"});
    SolveOptions o;
    o.units = {true, false};
    auto sols = variety_over_fq(parse_all(r, {"a*b"}), r, 5, o);
    EXPECT_EQ(sols.size(), 4u);  // a in F^x, b = 0
    for (auto& s : sols) EXPECT_EQ(s[1], 0u);
}

TEST(Variety, RestrictedVariety) {
    auto r = make_fp_ring(5, {"a", "b", "c"});
    auto gens = parse_all(r, {"a*b - c", "a + b + c - 1"});
    auto full = variety_over_fq(gens, r, 5);
    EXPECT_EQ(restricted_variety(gens, r, {1, 1, 1}, {}, 5), full);
    std::size_t total = 0;
    for (std::uint32_t v = 0; v < 5; ++v) {
        auto part = restricted_variety(gens, r, {1, 0, 1}, {v}, 5);
        for (auto& s : part) EXPECT_EQ(s[1], v);
        total += part.size();
        EXPECT_EQ(part, restricted_variety(gens, r, {1, 0, 1}, {v}, 5, false));
    }
    EXPECT_EQ(total, full.size());
    // all pinned: pure evaluation
    for (auto& s : full) EXPECT_EQ(restricted_variety(gens, r, {0, 0, 0}, s, 5), (std::vector<Point>{s}));
    EXPECT_TRUE(restricted_variety(gens, r, {0, 0, 0}, {1, 1, 1}, 5).empty());
    EXPECT_THROW(restricted_variety(gens, r, {0, 1}, {1}, 5), std::invalid_argument);
    EXPECT_THROW(restricted_variety(gens, r, {0, 1, 1}, {1, 2}, 5), std::invalid_argument);
}

TEST(Variety, GroebnerMatchesBruteForceRandom) {
    std::mt19937 g(2024);
    for (int trial = 0; trial < 500; ++trial) {
        int n = 1 + static_cast<int>(g() % 4);
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
        auto r = make_fp_ring(5, names);
        std::vector<Poly> gens;
        int k = 1 + static_cast<int>(g() % 3);
        for (int i = 0; i < k; ++i) gens.push_back(random_poly(r, g, 3, 3));
        auto a = variety_over_fq(gens, r, 5);
        auto b = brute_force_variety(gens, r, 5);
        ASSERT_EQ(a, b) << "trial " << trial;
    }
}
