/**
 * @file dense.hpp
 * @brief Dense polynomials of bounded total degree over F_p.
 *
 * A DenseSpace fixes s variables and a degree bound D and numbers every
 * monomial of degree <= D.  Coefficient vectors indexed this way support
 * multiplication by monomials and substitution of the first variable with
 * table lookups only, which is what the symbolic Hasse–Witt expansion and the
 * exhaustive solver spend their time on.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mpoly.hpp"

namespace ssp4 {

class DenseSpace {
   public:
    DenseSpace(int nvars, int max_degree) : n_(nvars), D_(max_degree) {
        if (nvars < 0 || nvars > Monomial::max_vars) throw std::invalid_argument("DenseSpace: bad variable count");
        if (max_degree < 0 || max_degree > Monomial::max_degree) throw std::invalid_argument("DenseSpace: bad degree");
        std::vector<int> e(static_cast<std::size_t>(n_), 0);
        for (int d = 0; d <= D_; ++d) enumerate(0, d, e);
        for (std::size_t i = 0; i < mons_.size(); ++i) index_.emplace(mons_[i], static_cast<std::int32_t>(i));
        mulvar_.assign(static_cast<std::size_t>(n_), {});
        for (int v = 0; v < n_; ++v) {
            auto& t = mulvar_[static_cast<std::size_t>(v)];
            t.resize(mons_.size(), -1);
            Monomial x = Monomial::variable(v);
            for (std::size_t i = 0; i < mons_.size(); ++i)
                if (mons_[i].degree() < D_) t[i] = index_.at(mons_[i] * x);
        }
    }

    int nvars() const noexcept { return n_; }
    int max_degree() const noexcept { return D_; }
    std::size_t size() const noexcept { return mons_.size(); }
    const Monomial& monomial(std::size_t i) const { return mons_[i]; }
    /// Index of m, or -1 when m is outside the space.
    std::int32_t index(const Monomial& m) const {
        auto it = index_.find(m);
        return it == index_.end() ? -1 : it->second;
    }
    const std::vector<std::int32_t>& mulvar(int v) const { return mulvar_[static_cast<std::size_t>(v)]; }

    /// Number of monomials of degree <= d (they occupy a prefix of the numbering).
    std::size_t prefix(int d) const {
        std::size_t k = 0;
        while (k < mons_.size() && mons_[k].degree() <= d) ++k;
        return k;
    }

   private:
    void enumerate(int v, int left, std::vector<int>& e) {
        if (v == n_ - 1 || n_ == 0) {
            if (n_ == 0) {
                if (left == 0) mons_.push_back(Monomial());
                return;
            }
            e[static_cast<std::size_t>(v)] = left;
            mons_.push_back(Monomial::from_exponents(e));
            e[static_cast<std::size_t>(v)] = 0;
            return;
        }
        for (int k = left; k >= 0; --k) {
            e[static_cast<std::size_t>(v)] = k;
            enumerate(v + 1, left - k, e);
        }
        e[static_cast<std::size_t>(v)] = 0;
    }

    int n_, D_;
    std::vector<Monomial> mons_;
    std::unordered_map<Monomial, std::int32_t, MonomialHash> index_;
    std::vector<std::vector<std::int32_t>> mulvar_;
};

using DenseVec = std::vector<std::uint32_t>;

/// Dense vector of a sparse polynomial whose variables are the first s of the space.
inline DenseVec to_dense(const DenseSpace& S, const Poly& f) {
    DenseVec v(S.size(), 0);
    for (auto& t : f.terms()) {
        std::int32_t i = S.index(t.first);
        if (i < 0) throw std::invalid_argument("to_dense: term outside the dense space");
        v[static_cast<std::size_t>(i)] = t.second.value();
    }
    return v;
}

inline Poly from_dense(const DenseSpace& S, const DenseVec& v, const RingPtr<Fp>& ring) {
    std::uint32_t p = ring->one.modulus();
    std::vector<Poly::Term> t;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) t.push_back({S.monomial(i), Fp::raw(v[i], p)});
    return Poly::from_terms(ring, std::move(t));
}

/**
 * Substitution of the first variable of a space by a constant, landing in the
 * space of the remaining variables with the same degree bound.
 */
class FirstVarEvaluator {
   public:
    FirstVarEvaluator(const DenseSpace& from, const DenseSpace& to) {
        if (to.nvars() + 1 != from.nvars() || to.max_degree() != from.max_degree())
            throw std::invalid_argument("FirstVarEvaluator: incompatible spaces");
        exp_.resize(from.size());
        dst_.resize(from.size());
        int n = from.nvars();
        for (std::size_t i = 0; i < from.size(); ++i) {
            const Monomial& m = from.monomial(i);
            exp_[i] = static_cast<std::uint8_t>(m[0]);
            std::vector<int> e;
            for (int k = 1; k < n; ++k) e.push_back(m[k]);
            dst_[i] = to.index(Monomial::from_exponents(e));
        }
        to_size_ = to.size();
    }

    /// out = f(c, rest); pw[k] must hold c^k for k <= degree bound.
    void apply(const DenseVec& f, const std::vector<std::uint32_t>& pw, std::uint32_t p, DenseVec& out) const {
        out.assign(to_size_, 0);
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::uint32_t c = f[i];
            if (!c) continue;
            std::uint32_t& o = out[static_cast<std::size_t>(dst_[i])];
            o = (o + c * pw[exp_[i]]) % p;
        }
    }

   private:
    std::vector<std::uint8_t> exp_;
    std::vector<std::int32_t> dst_;
    std::size_t to_size_ = 0;
};

}  // namespace ssp4
