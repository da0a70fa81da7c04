/**
 * @file curve.hpp
 * @brief Non-singularity, point counts and maximality for C = V(P,Q) in P^3.
 */
#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "families.hpp"
#include "groebner.hpp"

namespace ssp4 {

/// Q divides P: V(P,Q) is the whole quadric surface, not a curve.
class DegenerateCurve : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// The six 2x2 minors of the Jacobian matrix of (P, Q).
inline std::vector<Poly> jacobian_minors(const Poly& P, const Poly& Q) {
    auto r = P.ring_checked();
    int n = r->nvars();
    if (n != 4) throw std::invalid_argument("jacobian_minors: expected a form in 4 variables");
    std::vector<Poly> dP, dQ;
    for (int i = 0; i < n; ++i) {
        dP.push_back(P.partial_derivative(i));
        dQ.push_back(Q.partial_derivative(i));
    }
    std::vector<Poly> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.push_back(dP[i] * dQ[j] - dP[j] * dQ[i]);
    return out;
}

inline bool divides_quadric(const Poly& Q, const Poly& P) {
    auto gb = groebner({Q}, Q.ring_checked());
    return normal_form(P, gb).is_zero();
}

/**
 * True iff V(P,Q) is a smooth curve: for each coordinate X_i, the minors,
 * P, Q and 1 - Y X_i generate the unit ideal (Y appended as least variable).
 * Throws DegenerateCurve when Q | P.
 */
inline bool is_nonsingular(const Poly& P, const Poly& Q, GBStats* stats = nullptr) {
    if (P.is_zero() || P.is_constant() || Q.is_constant()) throw std::invalid_argument("is_nonsingular: nonconstant forms required");
    if (divides_quadric(Q, P)) throw DegenerateCurve("is_nonsingular: Q divides P");
    auto r4 = P.ring_checked();
    std::uint32_t p = r4->one.modulus();
    std::vector<std::string> names = r4->names;
    names.push_back("Y_");
    auto r5 = make_fp_ring(p, names);
    auto lift = [&](const Poly& f) {
        std::vector<Poly::Term> t;
        for (auto& term : f.terms()) {
            auto e = term.first.exponents(4);
            e.push_back(0);
            t.push_back({Monomial::from_exponents(e), term.second});
        }
        return Poly::from_terms(r5, std::move(t));
    };
    std::vector<Poly> base;
    for (auto& m : jacobian_minors(P, Q))
        if (!m.is_zero()) base.push_back(lift(m));
    base.push_back(lift(P));
    base.push_back(lift(Q));
    Poly Y = Poly::variable(r5, 4);
    for (int i = 0; i < 4; ++i) {
        auto gens = base;
        gens.push_back(Poly::one(r5) - Y * Poly::variable(r5, i));
        if (!is_inconsistent(gens, r5, stats)) return false;
    }
    return true;
}

/// Dense evaluator for forms with prime-field coefficients over GF(p^k).
class FormEvaluator {
   public:
    FormEvaluator(const GaloisField& K, const Poly& f) : K_(K) {
        for (auto& t : f.terms()) terms_.push_back({K.embed(t.second.value()), t.first.exponents(4)});
    }
    std::uint32_t operator()(const std::array<std::vector<std::uint32_t>, 4>& pw) const {
        std::uint32_t acc = 0;
        for (auto& [c, e] : terms_) {
            std::uint32_t v = c;
            for (int i = 0; i < 4 && v; ++i)
                if (e[static_cast<std::size_t>(i)]) v = K_.mul(v, pw[static_cast<std::size_t>(i)][static_cast<std::size_t>(e[static_cast<std::size_t>(i)])]);
            acc = K_.add(acc, v);
        }
        return acc;
    }

   private:
    const GaloisField& K_;
    std::vector<std::pair<std::uint32_t, std::vector<int>>> terms_;
};

/**
 * Calls visit(point) on every normalized projective point of P^3 over K
 * (first nonzero coordinate equal to 1) where all forms vanish.
 */
template <class Visit>
void for_each_point(const GaloisField& K, const std::vector<Poly>& forms, Visit&& visit) {
    std::vector<FormEvaluator> ev;
    int D = 0;
    for (auto& f : forms) {
        ev.emplace_back(K, f);
        D = std::max(D, f.total_degree());
    }
    std::uint32_t n = K.size();
    // pows[a][e] = a^e
    std::vector<std::vector<std::uint32_t>> pows(n, std::vector<std::uint32_t>(static_cast<std::size_t>(D) + 1));
    for (std::uint32_t a = 0; a < n; ++a) {
        pows[a][0] = 1;
        for (int e = 1; e <= D; ++e) pows[a][static_cast<std::size_t>(e)] = K.mul(pows[a][static_cast<std::size_t>(e - 1)], a);
    }
    std::array<std::uint32_t, 4> pt{};
    std::array<std::vector<std::uint32_t>, 4> pw;
    for (int lead = 0; lead < 4; ++lead) {
        // coordinates before lead are 0, lead is 1, the rest are free
        int free = 3 - lead;
        std::uint64_t total = 1;
        for (int i = 0; i < free; ++i) total *= n;
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            std::uint64_t t = idx;
            for (int i = 0; i < 4; ++i) {
                if (i < lead)
                    pt[static_cast<std::size_t>(i)] = 0;
                else if (i == lead)
                    pt[static_cast<std::size_t>(i)] = 1;
                else {
                    pt[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(t % n);
                    t /= n;
                }
                pw[static_cast<std::size_t>(i)] = pows[pt[static_cast<std::size_t>(i)]];
            }
            bool all = true;
            for (auto& e : ev)
                if (e(pw)) {
                    all = false;
                    break;
                }
            if (all) visit(pt);
        }
    }
}

/// Number of points of V(P,Q) over GF(p^k).
inline std::uint64_t count_points(const Poly& P, const Poly& Q, int k = 1) {
    GaloisField K(P.ring_checked()->one.modulus(), k);
    std::uint64_t n = 0;
    for_each_point(K, {Q, P}, [&](const std::array<std::uint32_t, 4>&) { ++n; });
    return n;
}

/// Singular points of V(P,Q) over GF(p^k), found exhaustively.
inline std::vector<std::array<std::uint32_t, 4>> singular_points(const Poly& P, const Poly& Q, int k) {
    GaloisField K(P.ring_checked()->one.modulus(), k);
    std::vector<Poly> forms{Q, P};
    for (auto& m : jacobian_minors(P, Q))
        if (!m.is_zero()) forms.push_back(m);
    std::vector<std::array<std::uint32_t, 4>> out;
    for_each_point(K, forms, [&](const std::array<std::uint32_t, 4>& pt) { out.push_back(pt); });
    return out;
}

/// Hasse–Weil upper bound p^2 + 1 + 2 g p for genus 4 over F_{p^2}.
inline std::uint64_t maximal_count_fp2(std::uint64_t p) { return p * p + 1 + 8 * p; }

struct CurveRecord {
    QuadricCase qcase;
    std::uint32_t p = 0;
    Poly Q, P;
    std::optional<bool> superspecial, smooth;
    std::optional<std::uint64_t> count_fp, count_fp2;
    std::map<std::string, std::uint32_t> slots;  ///< template slot values, when known
    std::string template_id;
};

inline bool is_maximal_fp2(const CurveRecord& rec) {
    if (!rec.count_fp2) throw std::invalid_argument("is_maximal_fp2: F_{p^2} count not computed");
    return *rec.count_fp2 == maximal_count_fp2(rec.p);
}

inline nlohmann::json to_json(const CurveRecord& r) {
    nlohmann::json j;
    j["case"] = to_string(r.qcase.kind);
    if (r.qcase.kind == QuadricKind::N2) j["eps"] = resolve_eps(r.qcase, r.p);
    j["p"] = r.p;
    j["Q"] = r.Q.to_string();
    j["P"] = r.P.to_string();
    if (!r.template_id.empty()) j["template"] = r.template_id;
    if (!r.slots.empty()) j["slots"] = r.slots;
    if (r.superspecial) j["superspecial"] = *r.superspecial;
    if (r.smooth) j["smooth"] = *r.smooth;
    if (r.count_fp) j["count_fp"] = *r.count_fp;
    if (r.count_fp2) j["count_fp2"] = *r.count_fp2;
    return j;
}

inline CurveRecord curve_from_json(const nlohmann::json& j) {
    CurveRecord r;
    r.qcase.kind = parse_kind(j.at("case").get<std::string>());
    r.qcase.eps = j.value("eps", 0u);
    r.p = j.at("p").get<std::uint32_t>();
    auto ring = xyzw_ring(r.p);
    r.Q = j.contains("Q") ? parse_poly(ring, j.at("Q").get<std::string>()) : quadric(r.qcase, r.p);
    r.P = parse_poly(ring, j.at("P").get<std::string>());
    r.template_id = j.value("template", std::string());
    if (j.contains("slots")) r.slots = j.at("slots").get<std::map<std::string, std::uint32_t>>();
    if (j.contains("superspecial")) r.superspecial = j.at("superspecial").get<bool>();
    if (j.contains("smooth")) r.smooth = j.at("smooth").get<bool>();
    if (j.contains("count_fp")) r.count_fp = j.at("count_fp").get<std::uint64_t>();
    if (j.contains("count_fp2")) r.count_fp2 = j.at("count_fp2").get<std::uint64_t>();
    return r;
}

}  // namespace ssp4
