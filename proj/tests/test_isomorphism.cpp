#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

#include "ssp4/isomorphism.hpp"
#include "ssp4/reference_curves.hpp"

using namespace ssp4;

namespace {

const QuadricCase kN1{QuadricKind::N1, 0}, kN2{QuadricKind::N2, 0}, kDege{QuadricKind::Dege, 0};

Poly cubic(std::uint32_t p, const std::string& s) { return parse_poly(xyzw_ring(p), s); }

std::vector<Poly> reference_cubics(const std::string& set) {
    std::vector<Poly> v;
    for (auto& c : load_reference_set(set)) v.push_back(c.rec.P);
    return v;
}

/// Matrix up to scalars, packed: first nonzero entry scaled to 1.
std::uint64_t projective_key(const FpMat& g) {
    std::uint32_t p = g[0][0].modulus();
    Fp s(0, p);
    for (auto& row : g)
        for (auto& e : row)
            if (s.is_zero() && !e.is_zero()) s = e.inv();
    std::uint64_t key = 0;
    for (auto& row : g)
        for (auto& e : row) key = key * p + (e * s).value();
    return key;
}

std::mt19937_64& rng() {
    static std::mt19937_64 r(20260416);
    return r;
}
std::uint32_t draw(std::uint32_t q, bool unit) {
    std::uniform_int_distribution<std::uint32_t> d(unit ? 1 : 0, q - 1);
    return d(rng());
}

/// A random similitude, from the literal Bruhat word of the case.
Similitude random_similitude(const QuadricCase& c, std::uint32_t q) {
    for (;;) {
        BruhatWord w;
        std::size_t n = c.kind == QuadricKind::Dege ? 8 : 7;
        w.a = static_cast<int>(draw(2, false));
        w.w = static_cast<int>(draw(c.kind == QuadricKind::N1 ? 4 : 2, false));
        for (std::size_t i = 0; i < n; ++i) w.t.push_back(draw(q, false));
        try {
            return bruhat_element(c, q, w);
        } catch (const std::invalid_argument&) {
        }
    }
}

}  // namespace

TEST(Similitude, BruhatFactorsAreSimilitudes) {
    const std::uint32_t p = 11;
    Fp one(1, p), a(3, p), b(7, p);
    std::uint32_t eps = resolve_eps(kN2, p);
    for (auto& g : {n1_u1(a), n1_u2(b), n1_a(1, one), n1_w(1, one), n1_w(2, one), n1_w(3, one)})
        EXPECT_EQ(similitude_factor(g, kN1, p), one);
    EXPECT_EQ(similitude_factor(mat_diag(a, b, a * b, b * b), kN1, p), a * b * b);
    for (auto& g : {n2_h(a, a.inv()), n2_u1(a), n2_u2(b, eps), n2_a(1, one), n2_w(1, one)})
        EXPECT_EQ(similitude_factor(g, kN2, p), one);
    EXPECT_EQ(similitude_factor(n2_r(a, b, eps), kN2, p), a * a - Fp(eps, p) * b * b);
    for (auto& g : {dege_t(a, a.inv()), dege_u(a), dege_s(one), dege_v(a, b, one, b), dege_a(1, one)})
        EXPECT_EQ(similitude_factor(g, kDege, p), one);
    EXPECT_EQ(similitude_factor(dege_scale(a), kDege, p), a * a);
    EXPECT_FALSE(similitude_factor(mat_diag(one, a, one, one), kN1, p).has_value());
}

TEST(Similitude, ConstructionChecks) {
    const std::uint32_t p = 7;
    Fp one(1, p), zero(0, p);
    EXPECT_THROW(make_similitude(mat_diag(one, one, zero, one), kN1, p), std::invalid_argument);
    EXPECT_THROW(make_similitude(mat_diag(one, Fp(2, p), one, one), kN1, p), std::invalid_argument);
    EXPECT_THROW(bruhat_element(kN1, p, {0, 0, {0, 1, 1, 0, 0, 0, 0}}), std::invalid_argument);
    EXPECT_THROW(bruhat_element(kN1, p, {0, 0, {1, 1}}), std::invalid_argument);
    EXPECT_THROW(bruhat_element(kN2, p, {0, 0, {1, 0, 0, 0, 0, 0, 0}}), std::invalid_argument);
    EXPECT_THROW(bruhat_element(kDege, p, {0, 1, {1, 1, 0, 0, 0, 1, 1, 1}}), std::invalid_argument);
    auto g = bruhat_element(kN1, p, {1, 3, {2, 3, 5, 1, 4, 6, 2}});
    EXPECT_EQ(g.mu, Fp(5, p));
    EXPECT_EQ(determinant(mat_mul(g.matrix, mat_inverse(g.matrix))), one);
}

TEST(Action, IdentityAndRightActionLaw) {
    for (auto [c, q] : std::vector<std::pair<QuadricCase, std::uint32_t>>{{kN1, 11}, {kN2, 11}, {kDege, 7}}) {
        Poly P = cubic(q, "x^3 + 2*x*y*z + 3*y^2*w + z^3 - w^3 + x*z*w");
        Poly Pr = mod_quad(P, quadric(c, q), mod_monomial(c.kind));
        EXPECT_EQ(act(mat_identity(Fp(1, q)), P, c), Pr);
        for (int trial = 0; trial < 5; ++trial) {
            auto g = random_similitude(c, q), h = random_similitude(c, q);
            EXPECT_EQ(act(h, act(g, P)), act(mat_mul(g.matrix, h.matrix), P, c));
        }
    }
}

TEST(Action, PreservesTheQuadricUpToMu) {
    for (auto [c, q] : std::vector<std::pair<QuadricCase, std::uint32_t>>{{kN1, 5}, {kN2, 11}, {kDege, 13}})
        for (int trial = 0; trial < 10; ++trial) {
            auto g = random_similitude(c, q);
            Poly Q = quadric(c, q);
            std::vector<std::vector<Fp>> M(4, std::vector<Fp>(4));
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g.matrix[i][j];
            EXPECT_EQ(Q.linear_substitute(M), Q.scale(g.mu));
        }
}

TEST(Cells, CoverTheSimilitudeGroupExactlyOnce) {
    for (std::uint32_t q : {5u, 7u})
        for (auto c : {kN1, kN2, kDege}) {
            if (q == 7 && c.kind == QuadricKind::Dege) continue;
            std::unordered_set<std::uint64_t> seen;
            std::uint64_t visits = 0, bad = 0;
            for_each_similitude(c, q, [&](const FpMat& g) {
                ++visits;
                if (!similitude_factor(g, c, q) || determinant(g).is_zero()) ++bad;
                seen.insert(projective_key(g));
            });
            EXPECT_EQ(bad, 0u);
            EXPECT_EQ(visits, similitude_group_order(c.kind, q)) << to_string(c.kind) << " q=" << q;
            EXPECT_EQ(seen.size(), visits) << to_string(c.kind) << " q=" << q;
        }
}

TEST(Cells, SymbolicCellsSpecializeToSimilitudes) {
    const std::uint32_t q = 7;
    for (auto c : {kN1, kN2, kDege})
        for (auto& cell : bruhat_cells(c, q, IsoGroup::Full)) {
            Point pt(static_cast<std::size_t>(cell.ring->nvars()), 3);
            FpMat g;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) g[i][j] = evaluate(cell.g[i][j], pt);
            EXPECT_TRUE(similitude_factor(g, c, q).has_value()) << cell.label;
        }
}

TEST(Isomorphism, ConstructedPairsAreRecognized) {
    // P2 = act(g, P1) / lambda for random g, lambda
    for (auto [c, q, set] : std::vector<std::tuple<QuadricCase, std::uint32_t, std::string>>{
             {kN1, 11, "f11-n1"}, {kN2, 11, "f11-n2"}, {kDege, 11, "f11-dege"}}) {
        auto curves = reference_cubics(set);
        for (int trial = 0; trial < 2; ++trial) {
            Poly P1 = curves[static_cast<std::size_t>(trial)];
            auto g = random_similitude(c, q);
            Fp lambda(draw(q, true), q);
            Poly P2 = act(g, P1).scale(lambda.inv());
            auto r = is_isomorphic(P1, P2, c, q);
            ASSERT_TRUE(r.isomorphic) << set;
            ASSERT_TRUE(r.witness.has_value());
            EXPECT_TRUE(check_witness(r.witness->g.matrix, r.witness->lambda, P1, P2, c));
            if (g.mu == Fp(1, q)) EXPECT_TRUE(is_isomorphic(P1, P2, c, q, IsoGroup::O).isomorphic);
        }
    }
}

TEST(Isomorphism, ReflexiveAndSymmetric) {
    auto curves = reference_cubics("f11-dege");
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(is_isomorphic(curves[i], curves[i], kDege, 11).isomorphic);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            EXPECT_EQ(is_isomorphic(curves[i], curves[j], kDege, 11).isomorphic,
                      is_isomorphic(curves[j], curves[i], kDege, 11).isomorphic);
}

TEST(Isomorphism, F11N1CurvesArePairwiseDistinct) {
    auto curves = reference_cubics("f11-n1");
    auto cls = classify(curves, kN1, 11);
    EXPECT_EQ(cls.representatives.size(), curves.size());
}

TEST(Isomorphism, SweepAgreesWithGroebner) {
    auto curves = reference_cubics("f5-dege");
    for (std::size_t i = 0; i < curves.size(); ++i)
        for (std::size_t j = i; j < curves.size(); ++j) {
            bool gb = is_isomorphic(curves[i], curves[j], kDege, 5).isomorphic;
            auto sw = sweep_isomorphic(curves[i], curves[j], kDege, 5);
            EXPECT_EQ(gb, sw.isomorphic) << i << " " << j;
            EXPECT_GT(sw.transforms, 0u);
        }
    auto n2 = reference_cubics("f11-n2");
    auto g = random_similitude(kN2, 11);
    auto sw = sweep_isomorphic(n2[0], act(g, n2[0]), kN2, 11);
    EXPECT_TRUE(sw.isomorphic);
    EXPECT_FALSE(sweep_isomorphic(n2[0], n2[1], kN2, 11).isomorphic);
    EXPECT_THROW(sweep_isomorphic(n2[0], n2[1], kN2, 11, 1000), BudgetExceeded);
}

TEST(Isomorphism, ClassCountDoesNotDependOnInputOrder) {
    auto curves = reference_cubics("f5-dege");
    // add transformed copies so that classes have several members
    for (std::size_t i = 0; i < 3; ++i) curves.push_back(act(random_similitude(kDege, 5), curves[i]));
    auto a = classify(curves, kDege, 5);
    std::shuffle(curves.begin(), curves.end(), rng());
    auto b = classify(curves, kDege, 5);
    ClassifyOptions no1;
    no1.phase1 = false;
    auto c = classify(curves, kDege, 5, no1);
    EXPECT_EQ(a.representatives.size(), b.representatives.size());
    EXPECT_EQ(b.representatives.size(), c.representatives.size());
    EXPECT_EQ(b.class_of, c.class_of);
    // every stored witness maps the representative onto the member
    int witnessed = 0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        if (!b.witness[i]) continue;
        ++witnessed;
        auto& w = *b.witness[i];
        EXPECT_TRUE(check_witness(w.g.matrix, w.lambda, curves[b.representatives[b.class_of[i]]], curves[i], kDege));
    }
    EXPECT_EQ(witnessed, static_cast<int>(curves.size() - b.representatives.size()));
}

TEST(Transport, MatrixCarriesN2QuadricToN1) {
    for (std::uint32_t p : {5u, 11u, 13u}) {
        std::uint32_t eps = default_nonsquare(p);
        QuadExt K(p, eps);
        auto M = n2_transport_matrix(p, eps);
        auto out = transform_form(K, M, quadric_matrix({QuadricKind::N2, eps}, p));
        auto n1 = quadric_matrix(kN1, p);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) EXPECT_EQ(out[i][j], K.embed(n1[i][j])) << p;
    }
}

TEST(Transport, RationalPartsAndClosureInvariance) {
    const std::uint32_t p = 11;
    std::uint32_t eps = resolve_eps(kN2, p);
    // a cubic in x, w and y^2 only has a rational image
    auto e = n2_to_n1(cubic(p, "x^3 + y^2*w + w^3"), eps);
    EXPECT_TRUE(e.is_rational());
    auto f = n2_to_n1(cubic(p, "x^2*z + y^3"), eps);
    EXPECT_FALSE(f.is_rational());
    // F_11-isomorphic N2 curves stay isomorphic over the closure after transport
    auto n2 = reference_cubics("f11-n2");
    auto g = random_similitude(kN2, p);
    EXPECT_TRUE(is_isomorphic_closure(n2[0], act(g, n2[0]), kN2));
}

TEST(Transport, ClosureSeparatesDistinctClasses) {
    auto n = reference_cubics("f11-closure-n");
    EXPECT_FALSE(is_isomorphic_closure(n[0], n[1], kN1));
    EXPECT_TRUE(is_isomorphic_closure(n[1], n[1], kN1));
    auto n2 = reference_cubics("f11-n2");
    auto e0 = n2_to_n1(n2[0], resolve_eps(kN2, 11));
    EXPECT_TRUE(is_isomorphic_closure(e0, e0, QuadricKind::N1, 11));
}
