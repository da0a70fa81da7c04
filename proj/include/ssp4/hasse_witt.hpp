/**
 * @file hasse_witt.hpp
 * @brief Superspeciality of V(P,Q) through the coefficients of (PQ)^(p-1).
 *
 * The curve is superspecial iff sixteen specific coefficients of
 * h = (PQ)^(p-1) vanish.  Since Q is always numeric here, each of them is
 * sum_v [Q^(p-1)]_v [P^(p-1)]_(M-v), and only the coefficients of P^(p-1) at
 * the monomials M - v are ever needed.  P^k is therefore built one factor at
 * a time, keeping only monomials that divide one of those targets, with the
 * coefficients stored as dense vectors over the symbolic variables.
 */
#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dense.hpp"
#include "mpoly.hpp"

namespace ssp4 {

/// The sixteen exponent vectors (x,y,z,w) whose coefficients in (PQ)^(p-1) form the Hasse–Witt matrix.
inline std::vector<std::array<int, 4>> hw_monomials(int p) {
    if (p < 5 || !is_prime(static_cast<std::uint64_t>(p)))
        throw std::invalid_argument("hw_monomials: p must be a prime >= 5");
    const int a = 2 * p - 2, b = p - 1, c = 2 * p - 1, d = p - 2;
    return {
        {a, b, b, b}, {c, d, b, b}, {c, b, d, b}, {c, b, b, d},  //
        {b, a, b, b}, {d, c, b, b}, {b, c, d, b}, {b, c, b, d},  //
        {b, b, a, b}, {d, b, c, b}, {b, d, c, b}, {b, b, c, d},  //
        {b, b, b, a}, {d, b, b, c}, {b, d, b, c}, {b, b, d, c},
    };
}

namespace detail {

inline Monomial mono4(const std::array<int, 4>& e) { return Monomial::from_exponents({e[0], e[1], e[2], e[3]}); }

/// All monomials of degree deg in x,y,z,w dividing t.
inline void divisors_of_degree(const Monomial& t, int deg, std::vector<Monomial>& out) {
    for (int a = 0; a <= std::min(t[0], deg); ++a)
        for (int b = 0; b <= std::min(t[1], deg - a); ++b)
            for (int c = 0; c <= std::min(t[2], deg - a - b); ++c) {
                int d = deg - a - b - c;
                if (d <= t[3]) out.push_back(Monomial::from_exponents({a, b, c, d}));
            }
}

}  // namespace detail

/**
 * The sixteen Hasse–Witt coefficients as dense vectors over the symbolic
 * variables of P's coefficient ring.
 */
class HasseWittExpander {
   public:
    /// P has coefficients in F_p[a_1..a_s]; Q is numeric in the same x,y,z,w.
    HasseWittExpander(const SymPoly& P, const Poly& Q, int p) : p_(static_cast<std::uint32_t>(p)) {
        if (P.is_zero() || P.total_degree() != 3 || !P.is_homogeneous())
            throw std::invalid_argument("superspecial_system: P must be a nonzero cubic form");
        if (Q.is_zero() || Q.total_degree() != 2 || !Q.is_homogeneous())
            throw std::invalid_argument("superspecial_system: Q must be a nonzero quadratic form");
        if (P.ring_checked()->nvars() != 4 || Q.ring_checked()->nvars() != 4)
            throw std::invalid_argument("superspecial_system: forms must be in four variables");
        aring_ = P.ring_checked()->one.ring_checked();
        if (aring_->one.modulus() != p_ || Q.ring_checked()->one.modulus() != p_)
            throw std::invalid_argument("superspecial_system: characteristic mismatch");
        int s = aring_->nvars();
        int da = 0;
        for (auto& t : P.terms()) da = std::max(da, t.second.total_degree());
        int D = static_cast<int>(p_ - 1) * da;
        space_ = std::make_unique<DenseSpace>(s, D);
        build(P, Q, da);
    }

    const DenseSpace& space() const noexcept { return *space_; }
    const RingPtr<Fp>& coefficient_ring() const noexcept { return aring_; }
    /// Coefficient vectors in hw_monomials order.
    const std::vector<DenseVec>& coefficients() const noexcept { return coeffs_; }

    std::vector<Poly> polynomials() const {
        std::vector<Poly> out;
        for (auto& v : coeffs_) out.push_back(from_dense(*space_, v, aring_));
        return out;
    }

   private:
    void build(const SymPoly& P, const Poly& Q, int da) {
        const std::uint32_t p = p_;
        const int k_max = static_cast<int>(p - 1);
        auto hw = hw_monomials(static_cast<int>(p));
        Poly Qp = Q.power(p - 1);

        // targets of P^(p-1)
        std::vector<std::pair<Monomial, std::vector<std::pair<Monomial, std::uint32_t>>>> plan;  // M -> (u, qcoef)
        std::unordered_set<Monomial, MonomialHash> targets;
        for (auto& e : hw) {
            Monomial M = detail::mono4(e);
            std::vector<std::pair<Monomial, std::uint32_t>> parts;
            for (auto& t : Qp.terms())
                if (t.first.divides(M)) {
                    parts.push_back({M / t.first, t.second.value()});
                    targets.insert(M / t.first);
                }
            plan.push_back({M, std::move(parts)});
        }

        // slots of P: monomial -> sparse coefficient over the a-variables
        struct Slot {
            Monomial m;
            std::vector<std::pair<int, std::uint32_t>> terms;  // (index of a-monomial table, coefficient)
        };
        std::vector<Slot> slots;
        std::vector<Monomial> amons;
        std::unordered_map<Monomial, int, MonomialHash> amon_index;
        for (auto& t : P.terms()) {
            Slot sl{t.first, {}};
            for (auto& ct : t.second.terms()) {
                auto [it, fresh] = amon_index.try_emplace(ct.first, static_cast<int>(amons.size()));
                if (fresh) amons.push_back(ct.first);
                sl.terms.push_back({it->second, ct.second.value()});
            }
            slots.push_back(std::move(sl));
        }
        // multiplication tables for each a-monomial occurring in P
        const DenseSpace& S = *space_;
        std::vector<std::vector<std::int32_t>> multab;
        for (auto& am : amons) {
            std::vector<std::int32_t> t(S.size(), -1);
            for (std::size_t i = 0; i < S.size(); ++i) {
                if (S.monomial(i).degree() + am.degree() > S.max_degree()) continue;
                t[i] = S.index(S.monomial(i) * am);
            }
            multab.push_back(std::move(t));
        }

        // P^1 restricted to divisors of targets
        using Level = std::unordered_map<Monomial, DenseVec, MonomialHash>;
        auto keep = [&](int k) {
            std::unordered_set<Monomial, MonomialHash> r;
            std::vector<Monomial> tmp;
            for (auto& t : targets) {
                tmp.clear();
                detail::divisors_of_degree(t, 3 * k, tmp);
                r.insert(tmp.begin(), tmp.end());
            }
            return r;
        };
        Level cur;
        cur.emplace(Monomial(), DenseVec(1, 1));  // P^0 = 1
        std::vector<std::uint64_t> acc;
        for (int k = 0; k < k_max; ++k) {
            auto want = keep(k + 1);
            std::size_t in_len = S.prefix(k * da);
            std::size_t out_len = S.prefix((k + 1) * da);
            Level next;
            for (auto& u : want) {
                acc.assign(out_len, 0);
                bool any = false;
                for (auto& sl : slots) {
                    if (!sl.m.divides(u)) continue;
                    auto it = cur.find(u / sl.m);
                    if (it == cur.end()) continue;
                    const DenseVec& X = it->second;
                    for (auto& [ai, c] : sl.terms) {
                        const auto& mt = multab[static_cast<std::size_t>(ai)];
                        for (std::size_t i = 0; i < in_len && i < X.size(); ++i) {
                            if (!X[i]) continue;
                            acc[static_cast<std::size_t>(mt[i])] += static_cast<std::uint64_t>(X[i]) * c;
                            any = true;
                        }
                    }
                }
                if (!any) continue;
                DenseVec v(out_len);
                bool nz = false;
                for (std::size_t i = 0; i < out_len; ++i) {
                    v[i] = static_cast<std::uint32_t>(acc[i] % p);
                    nz |= v[i] != 0;
                }
                if (nz) next.emplace(u, std::move(v));
            }
            cur = std::move(next);
        }
        // combine with Q^(p-1)
        std::size_t len = S.size();
        for (auto& [M, parts] : plan) {
            std::vector<std::uint64_t> h(len, 0);
            for (auto& [u, qc] : parts) {
                auto it = cur.find(u);
                if (it == cur.end()) continue;
                for (std::size_t i = 0; i < it->second.size(); ++i) h[i] += static_cast<std::uint64_t>(it->second[i]) * qc;
            }
            DenseVec v(len);
            for (std::size_t i = 0; i < len; ++i) v[i] = static_cast<std::uint32_t>(h[i] % p);
            coeffs_.push_back(std::move(v));
        }
    }

    std::uint32_t p_;
    RingPtr<Fp> aring_;
    std::unique_ptr<DenseSpace> space_;
    std::vector<DenseVec> coeffs_;
};

/// Drop zero polynomials and exact duplicates, keeping first occurrences.
inline std::vector<Poly> prune_system(const std::vector<Poly>& sys) {
    std::vector<Poly> out;
    for (auto& f : sys) {
        if (f.is_zero()) continue;
        if (std::find(out.begin(), out.end(), f) != out.end()) continue;
        out.push_back(f);
    }
    return out;
}

/**
 * The Hasse–Witt coefficients of V(P,Q) as polynomials in the symbolic
 * variables, zeros and duplicates removed.
 */
inline std::vector<Poly> superspecial_system(const SymPoly& P, const Poly& Q, int p) {
    return prune_system(HasseWittExpander(P, Q, p).polynomials());
}

/// Lift a numeric cubic to a nested ring with no symbolic variables.
inline SymPoly lift_numeric(const Poly& P) {
    std::uint32_t p = P.ring_checked()->one.modulus();
    static thread_local std::map<std::uint32_t, RingPtr<Fp>> empty_rings;
    auto& ar = empty_rings[p];
    if (!ar) ar = make_fp_ring(p, {});
    auto sr = make_ring<Poly>(P.ring_checked()->names, Poly::one(ar));
    return P.map_coefficients<Poly>(sr, [&](const Fp& c) { return Poly::constant(ar, c); });
}

/// All sixteen Hasse–Witt coefficients of a numeric pair, in hw_monomials order.
inline std::vector<std::uint32_t> hasse_witt_entries(const Poly& P, const Poly& Q, int p) {
    HasseWittExpander hw(lift_numeric(P), Q, p);
    std::vector<std::uint32_t> out;
    for (auto& v : hw.coefficients()) out.push_back(v.empty() ? 0 : v[0]);
    return out;
}

/// True iff every Hasse–Witt coefficient of (P,Q) vanishes (smoothness not checked).
inline bool is_superspecial(const Poly& P, const Poly& Q, int p) {
    auto e = hasse_witt_entries(P, Q, p);
    return std::all_of(e.begin(), e.end(), [](std::uint32_t v) { return v == 0; });
}

/**
 * Fast numeric test for exhaustive sweeps: P is given by its 20 cubic
 * coefficients, P^((p-1)/2) is formed densely, and each Hasse–Witt
 * coefficient is a bilinear form in that power.  Stops at the first
 * nonzero coefficient.
 */
class NumericHasseWitt {
   public:
    NumericHasseWitt(const Poly& Q, int p) : p_(static_cast<std::uint32_t>(p)), half_((p - 1) / 2) {
        cubic_ = std::make_unique<Space4>(3);
        for (int k = 1; k <= half_; ++k) pow_spaces_.push_back(std::make_unique<Space4>(3 * k));
        // product tables: (degree 3) x (degree 3(k-1)) -> degree 3k
        for (int k = 2; k <= half_; ++k) {
            auto& A = *pow_spaces_[static_cast<std::size_t>(k - 2)];
            auto& B = *pow_spaces_[static_cast<std::size_t>(k - 1)];
            std::vector<std::int32_t> t(cubic_->mons.size() * A.mons.size());
            for (std::size_t i = 0; i < cubic_->mons.size(); ++i)
                for (std::size_t j = 0; j < A.mons.size(); ++j)
                    t[i * A.mons.size() + j] = B.index.at(cubic_->mons[i] * A.mons[j]);
            prod_.push_back(std::move(t));
        }
        Poly Qp = Q.power(static_cast<unsigned>(p - 1));
        auto& H = *pow_spaces_.back();
        for (auto& e : hw_monomials(p)) {
            Monomial M = detail::mono4(e);
            std::vector<std::array<std::uint32_t, 3>> tri;
            for (auto& t : Qp.terms()) {
                if (!t.first.divides(M)) continue;
                Monomial u = M / t.first;
                for (std::size_t i = 0; i < H.mons.size(); ++i) {
                    if (!H.mons[i].divides(u)) continue;
                    auto j = H.index.at(u / H.mons[i]);
                    tri.push_back({t.second.value(), static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
                }
            }
            plans_.push_back(std::move(tri));
        }
    }

    /// Index of a cubic monomial in the 20-entry coefficient array.
    int cubic_index(const Monomial& m) const { return cubic_->index.at(m); }
    std::size_t cubic_size() const { return cubic_->mons.size(); }

    /// coeffs has cubic_size() entries in [0,p).
    bool is_superspecial(const std::vector<std::uint32_t>& coeffs) {
        const std::uint32_t p = p_;
        nz_.clear();
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (coeffs[i]) nz_.push_back(static_cast<std::uint32_t>(i));
        // P^half
        cur_.assign(coeffs.begin(), coeffs.end());
        for (int k = 2; k <= half_; ++k) {
            auto& A = *pow_spaces_[static_cast<std::size_t>(k - 2)];
            auto& B = *pow_spaces_[static_cast<std::size_t>(k - 1)];
            acc_.assign(B.mons.size(), 0);
            const auto& t = prod_[static_cast<std::size_t>(k - 2)];
            for (std::uint32_t i : nz_) {
                std::uint64_t c = coeffs[i];
                const std::int32_t* row = &t[i * A.mons.size()];
                for (std::size_t j = 0; j < A.mons.size(); ++j)
                    if (cur_[j]) acc_[static_cast<std::size_t>(row[j])] += c * cur_[j];
            }
            cur_.resize(B.mons.size());
            for (std::size_t j = 0; j < B.mons.size(); ++j) cur_[j] = static_cast<std::uint32_t>(acc_[j] % p);
        }
        for (auto& tri : plans_) {
            std::uint64_t s = 0;
            for (auto& [qc, i, j] : tri) {
                std::uint64_t a = cur_[i];
                if (!a) continue;
                s += (a * cur_[j] % p) * qc;
            }
            if (s % p) return false;
        }
        return true;
    }

   private:
    struct Space4 {
        explicit Space4(int d) {
            for (int a = d; a >= 0; --a)
                for (int b = d - a; b >= 0; --b)
                    for (int c = d - a - b; c >= 0; --c) {
                        Monomial m = Monomial::from_exponents({a, b, c, d - a - b - c});
                        index.emplace(m, static_cast<std::int32_t>(mons.size()));
                        mons.push_back(m);
                    }
        }
        std::vector<Monomial> mons;
        std::unordered_map<Monomial, std::int32_t, MonomialHash> index;
    };

    std::uint32_t p_;
    int half_;
    std::unique_ptr<Space4> cubic_;
    std::vector<std::unique_ptr<Space4>> pow_spaces_;
    std::vector<std::vector<std::int32_t>> prod_;
    std::vector<std::vector<std::array<std::uint32_t, 3>>> plans_;
    std::vector<std::uint32_t> nz_, cur_;
    std::vector<std::uint64_t> acc_;
};

}  // namespace ssp4
