#include <gtest/gtest.h>

#include <set>

#include "ssp4/field.hpp"

using namespace ssp4;

TEST(PrimeField, RejectsBadModuli) {
    EXPECT_THROW(PrimeField(9), std::invalid_argument);
    EXPECT_THROW(PrimeField(2), std::invalid_argument);
    EXPECT_THROW(PrimeField(1u << 16), std::invalid_argument);
    EXPECT_NO_THROW(PrimeField(65521));
}

TEST(PrimeField, InversesAndFermatExhaustive) {
    for (std::uint32_t p : {5u, 11u}) {
        PrimeField F(p);
        for (std::uint32_t a = 1; a < p; ++a) {
            EXPECT_EQ(F.mul(a, F.inv(a)), 1u);
            EXPECT_EQ(F.pow(a, p - 1), 1u);
        }
        EXPECT_THROW(F.inv(0), std::domain_error);
    }
}

TEST(PrimeField, PrimitiveElement) {
    EXPECT_EQ(primitive_element(5), 2u);
    EXPECT_EQ(primitive_element(11), 2u);
    EXPECT_EQ(primitive_element(3), 2u);
    EXPECT_EQ(primitive_element(7), 3u);
    EXPECT_THROW(primitive_element(15), std::invalid_argument);
    for (std::uint32_t p : {5u, 7u, 11u, 13u}) {
        PrimeField F(p);
        std::set<std::uint32_t> orbit;
        std::uint32_t g = primitive_element(p), x = 1;
        for (std::uint32_t k = 0; k < p - 1; ++k, x = F.mul(x, g)) orbit.insert(x);
        EXPECT_EQ(orbit.size(), p - 1);
    }
}

TEST(PrimeField, Nonsquares) {
    EXPECT_EQ(nonsquares(5), (std::vector<std::uint32_t>{2, 3}));
    EXPECT_EQ(nonsquares(11), (std::vector<std::uint32_t>{2, 6, 7, 8, 10}));
    EXPECT_EQ(nonsquares(3), (std::vector<std::uint32_t>{2}));
    EXPECT_EQ(default_nonsquare(5), 2u);
    EXPECT_EQ(default_nonsquare(11), 2u);
    EXPECT_EQ(default_nonsquare(7), 3u);
}

TEST(FpElement, Arithmetic) {
    Fp a(3, 5), b(4, 5);
    EXPECT_EQ((a + b).value(), 2u);
    EXPECT_EQ((a - b).value(), 4u);
    EXPECT_EQ((a * b).value(), 2u);
    EXPECT_EQ((a * a.inv()).value(), 1u);
    EXPECT_EQ(Fp(-1, 11).value(), 10u);
    EXPECT_EQ((Fp() + a).value(), 3u);
    EXPECT_THROW(Fp(0, 5).inv(), std::domain_error);
}

TEST(QuadExt, DefiningRelation) {
    QuadExt K(11, 2);
    auto t = K.make(0, 1);
    EXPECT_EQ(ext_arith(K, t, t, ExtOp::mul), K.embed(2));
    EXPECT_EQ(ext_arith(K, K.embed(1), {}, ExtOp::inv), K.embed(1));
    // (1+t)(1-t) = 1 - 2 = 10
    EXPECT_EQ(ext_arith(K, K.make(1, 1), K.make(1, 10), ExtOp::mul), K.embed(10));
    EXPECT_EQ(K.norm(K.make(1, 1)), 10u);
    EXPECT_THROW(ext_arith(K, K.embed(0), {}, ExtOp::inv), std::domain_error);
    EXPECT_THROW(QuadExt(11, 3), std::invalid_argument);  // 3 = 5^2 mod 11
}

TEST(QuadExt, FieldAxiomsExhaustive) {
    for (std::uint32_t p : {5u, 7u, 11u}) {
        QuadExt K(p);
        for (std::uint64_t i = 1; i < K.order(); ++i) {
            auto a = K.from_index(i);
            EXPECT_EQ(K.mul(a, K.inv(a)), K.embed(1));
            EXPECT_EQ(K.pow(a, K.order() - 1), K.embed(1));
        }
        // distributivity on a sample
        for (std::uint64_t i = 0; i < K.order(); i += 7)
            for (std::uint64_t j = 0; j < K.order(); j += 5) {
                auto a = K.from_index(i), b = K.from_index(j), c = K.from_index((i * 3 + j) % K.order());
                EXPECT_EQ(K.mul(a, K.add(b, c)), K.add(K.mul(a, b), K.mul(a, c)));
            }
    }
}
