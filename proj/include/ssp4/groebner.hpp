/**
 * @file groebner.hpp
 * @brief Buchberger's algorithm over F_p in grevlex.
 *
 * Pairs are managed with the Gebauer–Möller update and selected by sugar;
 * reductions run in a geobucket.  The output is the reduced basis, monic and
 * sorted by leading monomial (smallest first), so equal ideals give identical
 * output regardless of generator order.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <unordered_set>
#include <stdexcept>
#include <vector>

#include "mpoly.hpp"

namespace ssp4 {

struct GBStats {
    std::size_t pairs_considered = 0;
    std::size_t pairs_reduced = 0;
    std::size_t zero_reductions = 0;
    std::size_t basis_size = 0;
    bool stopped_at_unit = false;
};

struct GBOptions {
    /// Return {1} as soon as a nonzero constant shows up (skips the rest).
    bool stop_at_unit = true;
    /// Abort with std::runtime_error after this many S-pair reductions (0 = unlimited).
    std::size_t max_pairs = 0;
    /// Matrix (F4-style) reduction of pair batches instead of one pair at a time.
    bool linear_algebra = true;
};

namespace detail {

/// Open-addressing map from monomials to int32 values.
class MonoTable {
   public:
    MonoTable() { rehash(1024); }

    /// Pointer to the value for m and whether it was inserted with v.
    std::pair<std::int32_t*, bool> insert(const Monomial& m, std::int32_t v) {
        if ((used_ + 1) * 2 > keys_.size()) rehash(keys_.size() * 2);
        std::size_t mask = keys_.size() - 1;
        for (std::size_t i = m.hash() & mask;; i = (i + 1) & mask) {
            if (vals_[i] == kEmpty) {
                keys_[i] = m;
                vals_[i] = v;
                ++used_;
                return {&vals_[i], true};
            }
            if (keys_[i] == m) return {&vals_[i], false};
        }
    }

   private:
    static constexpr std::int32_t kEmpty = std::numeric_limits<std::int32_t>::min();
    void rehash(std::size_t n) {
        std::vector<Monomial> k = std::move(keys_);
        std::vector<std::int32_t> v = std::move(vals_);
        keys_.assign(n, Monomial());
        vals_.assign(n, kEmpty);
        used_ = 0;
        for (std::size_t i = 0; i < k.size(); ++i)
            if (v[i] != kEmpty) insert(k[i], v[i]);
    }
    std::vector<Monomial> keys_;
    std::vector<std::int32_t> vals_;
    std::size_t used_ = 0;
};

/// A polynomial over F_p stored as parallel arrays, terms in descending grevlex.
struct GPoly {
    std::vector<Monomial> mon;
    std::vector<std::uint32_t> coef;
    int sugar = 0;

    bool empty() const noexcept { return mon.empty(); }
    std::size_t size() const noexcept { return mon.size(); }
};

class Geobucket {
   public:
    explicit Geobucket(std::uint32_t p) : p_(p) {}

    /// Add c * m * f[from:], where f is in descending order.
    void add_scaled(const GPoly& f, std::size_t from, std::uint32_t c, const Monomial& m) {
        if (from >= f.size() || c == 0) return;
        std::vector<std::pair<Monomial, std::uint32_t>> v;
        v.reserve(f.size() - from);
        for (std::size_t i = f.size(); i-- > from;)
            v.push_back({f.mon[i] * m, static_cast<std::uint32_t>((static_cast<std::uint64_t>(f.coef[i]) * c) % p_)});
        insert(std::move(v));
    }
    void add(const GPoly& f) { add_scaled(f, 0, 1, Monomial()); }

    /// Remove and return the leading term; false when the bucket is empty.
    bool pop_leading(Monomial& m, std::uint32_t& c) {
        for (;;) {
            int best = -1;
            for (int k = 0; k < static_cast<int>(b_.size()); ++k) {
                if (b_[static_cast<std::size_t>(k)].empty()) continue;
                if (best < 0 || grevlex_greater(b_[static_cast<std::size_t>(k)].back().first,
                                                b_[static_cast<std::size_t>(best)].back().first))
                    best = k;
            }
            if (best < 0) return false;
            m = b_[static_cast<std::size_t>(best)].back().first;
            std::uint64_t s = 0;
            for (auto& bk : b_)
                if (!bk.empty() && bk.back().first == m) {
                    s += bk.back().second;
                    bk.pop_back();
                }
            c = static_cast<std::uint32_t>(s % p_);
            if (c) return true;
        }
    }

   private:
    using Vec = std::vector<std::pair<Monomial, std::uint32_t>>;  // ascending order

    Vec merge(const Vec& a, const Vec& b) const {
        Vec r;
        r.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i].first == b[j].first) {
                std::uint32_t s = a[i].second + b[j].second;
                if (s >= p_) s -= p_;
                if (s) r.push_back({a[i].first, s});
                ++i;
                ++j;
            } else if (grevlex_greater(b[j].first, a[i].first)) {
                r.push_back(a[i++]);
            } else {
                r.push_back(b[j++]);
            }
        }
        while (i < a.size()) r.push_back(a[i++]);
        while (j < b.size()) r.push_back(b[j++]);
        return r;
    }
    void insert(Vec v) {
        std::size_t k = 0;
        std::size_t cap = 8;
        while (v.size() > cap) {
            ++k;
            cap *= 4;
        }
        for (;;) {
            if (b_.size() <= k) b_.resize(k + 1);
            if (b_[k].empty()) {
                b_[k] = std::move(v);
                return;
            }
            v = merge(b_[k], v);
            b_[k].clear();
            if (v.size() <= cap) {
                b_[k] = std::move(v);
                return;
            }
            ++k;
            cap *= 4;
        }
    }

    std::uint32_t p_;
    std::vector<Vec> b_;
};

class Buchberger {
   public:
    Buchberger(std::uint32_t p, GBOptions opts) : F_(p), opts_(opts) {}

    GPoly to_gpoly(const Poly& f) const {
        GPoly g;
        for (auto& t : f.terms()) {
            g.mon.push_back(t.first);
            g.coef.push_back(t.second.value());
        }
        g.sugar = f.is_zero() ? 0 : f.total_degree();
        return g;
    }

    void make_monic(GPoly& f) const {
        if (f.empty() || f.coef[0] == 1) return;
        std::uint32_t inv = F_.inv(f.coef[0]);
        for (auto& c : f.coef) c = F_.mul(c, inv);
    }

    /// Index of an active basis element whose leading monomial divides m, or -1.
    int find_reducer(const Monomial& m, std::uint64_t mask) const {
        int best = -1;
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            if (!active_[i]) continue;
            if ((lead_mask_[i] & ~mask) != 0) continue;
            if (!basis_[i].mon[0].divides(m)) continue;
            if (best < 0 || basis_[i].size() < basis_[static_cast<std::size_t>(best)].size()) best = static_cast<int>(i);
        }
        return best;
    }

    /// Full reduction of f by the active basis; returns a monic remainder.
    GPoly reduce(const GPoly& f) const {
        Geobucket gb(F_.p());
        gb.add(f);
        GPoly r;
        r.sugar = f.sugar;
        Monomial m;
        std::uint32_t c;
        while (gb.pop_leading(m, c)) {
            int k = find_reducer(m, m.support_mask());
            if (k < 0) {
                r.mon.push_back(m);
                r.coef.push_back(c);
                continue;
            }
            const GPoly& g = basis_[static_cast<std::size_t>(k)];
            Monomial shift = m / g.mon[0];
            gb.add_scaled(g, 1, F_.neg(c), shift);  // g is monic
            if (r.mon.empty()) r.sugar = std::max(r.sugar, g.sugar + shift.degree());
        }
        make_monic(r);
        return r;
    }

    GPoly spoly(std::size_t i, std::size_t j, const Monomial& l) const {
        const GPoly& a = basis_[i];
        const GPoly& b = basis_[j];
        Geobucket gb(F_.p());
        Monomial sa = l / a.mon[0], sb = l / b.mon[0];
        gb.add_scaled(a, 1, 1, sa);
        gb.add_scaled(b, 1, F_.neg(1), sb);
        GPoly s;
        s.sugar = std::max(a.sugar + sa.degree(), b.sugar + sb.degree());
        Monomial m;
        std::uint32_t c;
        while (gb.pop_leading(m, c)) {
            s.mon.push_back(m);
            s.coef.push_back(c);
        }
        return s;
    }

    struct Pair {
        std::size_t i, j;
        Monomial lcm;
        int sugar;
    };

    void update(std::size_t h) {
        const Monomial& lh = basis_[h].mon[0];
        std::vector<Pair> cand;
        for (std::size_t g = 0; g < h; ++g) {
            if (!active_[g]) continue;
            Monomial l = Monomial::lcm(lh, basis_[g].mon[0]);
            int s = std::max(basis_[h].sugar + (l.degree() - lh.degree()),
                             basis_[g].sugar + (l.degree() - basis_[g].mon[0].degree()));
            cand.push_back({g, h, l, s});
        }
        // chain criterion among the new pairs; keep one representative per lcm class
        std::vector<char> keep(cand.size(), 1);
        for (std::size_t a = 0; a < cand.size(); ++a) {
            if (Monomial::coprime(lh, basis_[cand[a].i].mon[0])) continue;
            for (std::size_t b = 0; b < cand.size(); ++b) {
                if (a == b || !keep[b]) continue;
                if (cand[b].lcm.divides(cand[a].lcm) && !(cand[b].lcm == cand[a].lcm)) {
                    keep[a] = 0;
                    break;
                }
            }
        }
        // among pairs with equal lcm keep one, preferring a coprime one (which is then dropped)
        for (std::size_t a = 0; a < cand.size(); ++a) {
            if (!keep[a]) continue;
            for (std::size_t b = a + 1; b < cand.size(); ++b) {
                if (!keep[b] || !(cand[a].lcm == cand[b].lcm)) continue;
                bool cop_b = Monomial::coprime(lh, basis_[cand[b].i].mon[0]);
                if (cop_b) {
                    keep[a] = 0;
                    break;
                }
                keep[b] = 0;
            }
        }
        std::vector<Pair> fresh;
        for (std::size_t a = 0; a < cand.size(); ++a)
            if (keep[a] && !Monomial::coprime(lh, basis_[cand[a].i].mon[0])) fresh.push_back(cand[a]);
        // Buchberger's chain criterion on the old pairs
        std::vector<Pair> kept;
        kept.reserve(pairs_.size() + fresh.size());
        for (auto& pr : pairs_) {
            if (lh.divides(pr.lcm)) {
                Monomial l1 = Monomial::lcm(basis_[pr.i].mon[0], lh);
                Monomial l2 = Monomial::lcm(basis_[pr.j].mon[0], lh);
                if (!(l1 == pr.lcm) && !(l2 == pr.lcm)) continue;
            }
            kept.push_back(pr);
        }
        for (auto& f : fresh) kept.push_back(f);
        pairs_ = std::move(kept);
        for (std::size_t g = 0; g < h; ++g)
            if (active_[g] && lh.divides(basis_[g].mon[0])) active_[g] = 0;
    }

    void add_to_basis(GPoly f) {
        basis_.push_back(std::move(f));
        active_.push_back(1);
        lead_mask_.push_back(basis_.back().mon[0].support_mask());
        update(basis_.size() - 1);
    }

    /// Run Buchberger; returns false if a unit was found and stop_at_unit is set.
    bool run(const std::vector<GPoly>& input, GBStats* stats) {
        std::vector<GPoly> gens;
        for (auto& g : input)
            if (!g.empty()) gens.push_back(g);
        // feed generators smallest first so early basis elements reduce the rest
        std::sort(gens.begin(), gens.end(), [](const GPoly& a, const GPoly& b) {
            if (a.mon[0] == b.mon[0]) return a.size() < b.size();
            return grevlex_greater(b.mon[0], a.mon[0]);
        });
        for (auto& g : gens) {
            GPoly r = reduce(g);
            if (r.empty()) continue;
            if (r.mon[0].is_one()) return unit_found(stats);
            add_to_basis(std::move(r));
        }
        while (!pairs_.empty()) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < pairs_.size(); ++k) {
                auto& a = pairs_[k];
                auto& b = pairs_[best];
                if (a.sugar < b.sugar || (a.sugar == b.sugar && grevlex_greater(b.lcm, a.lcm))) best = k;
            }
            Pair pr = pairs_[best];
            pairs_[best] = pairs_.back();
            pairs_.pop_back();
            if (stats) ++stats->pairs_reduced;
            if (opts_.max_pairs && ++reduced_ > opts_.max_pairs)
                throw std::runtime_error("groebner: pair budget exhausted");
            GPoly s = spoly(pr.i, pr.j, pr.lcm);
            GPoly r = reduce(s);
            if (r.empty()) {
                if (stats) ++stats->zero_reductions;
                continue;
            }
            if (r.mon[0].is_one()) return unit_found(stats);
            add_to_basis(std::move(r));
        }
        return true;
    }

    /**
     * Linear-algebra variant: all pairs of the lowest sugar degree are
     * reduced together as the rows of one sparse matrix, with reducer rows
     * found by symbolic preprocessing.
     */
    bool run_f4(const std::vector<GPoly>& input, GBStats* stats) {
        std::vector<GPoly> gens;
        for (auto& g : input)
            if (!g.empty()) gens.push_back(g);
        std::sort(gens.begin(), gens.end(), [](const GPoly& a, const GPoly& b) {
            if (a.mon[0] == b.mon[0]) return a.size() < b.size();
            return grevlex_greater(b.mon[0], a.mon[0]);
        });
        for (auto& g : gens) {
            GPoly r = reduce(g);
            if (r.empty()) continue;
            if (r.mon[0].is_one()) return unit_found(stats);
            add_to_basis(std::move(r));
        }
        while (!pairs_.empty()) {
            int d = std::numeric_limits<int>::max();
            for (auto& pr : pairs_) d = std::min(d, pr.sugar);
            std::vector<Pair> sel, rest;
            for (auto& pr : pairs_) (pr.sugar == d ? sel : rest).push_back(pr);
            pairs_ = std::move(rest);
            if (stats) stats->pairs_reduced += sel.size();
            reduced_ += sel.size();
            if (opts_.max_pairs && reduced_ > opts_.max_pairs) throw std::runtime_error("groebner: pair budget exhausted");
            std::vector<GPoly> fresh = f4_step(sel);
            if (stats) stats->zero_reductions += sel.size() > fresh.size() ? sel.size() - fresh.size() : 0;
            std::sort(fresh.begin(), fresh.end(),
                      [](const GPoly& a, const GPoly& b) { return grevlex_greater(b.mon[0], a.mon[0]); });
            for (auto& f : fresh) {
                if (f.mon[0].is_one()) return unit_found(stats);
                f.sugar = d;
                add_to_basis(std::move(f));
            }
        }
        return true;
    }

    /// One matrix reduction; returns the rows with new leading monomials, monic.
    std::vector<GPoly> f4_step(const std::vector<Pair>& sel) {
        struct RowSrc {
            std::size_t g;
            Monomial shift;
        };
        struct Row {
            std::vector<std::uint32_t> col, coef;
        };
        std::vector<RowSrc> rows;
        std::vector<Row> mat;
        MonoTable table;
        std::vector<Monomial> mons;  // in discovery order
        std::vector<char> done;      // per discovered monomial: covered by a row lead
        std::vector<std::uint32_t> todo;
        MonoTable row_keys;          // shift -> first row with that shift
        std::vector<std::int32_t> row_next;
        auto add_row = [&](std::size_t g, const Monomial& shift) {
            auto [slot, fresh] = row_keys.insert(shift, static_cast<std::int32_t>(rows.size()));
            if (!fresh) {
                for (std::int32_t r = *slot; r >= 0; r = row_next[static_cast<std::size_t>(r)])
                    if (rows[static_cast<std::size_t>(r)].g == g) return;
                row_next.push_back(*slot);
                *slot = static_cast<std::int32_t>(rows.size());
            } else {
                row_next.push_back(-1);
            }
            rows.push_back({g, shift});
            Row row;
            row.coef = basis_[g].coef;
            row.col.reserve(row.coef.size());
            for (auto& m : basis_[g].mon) {
                Monomial t = m * shift;
                auto [v, ins] = table.insert(t, static_cast<std::int32_t>(mons.size()));
                if (ins) {
                    todo.push_back(static_cast<std::uint32_t>(mons.size()));
                    mons.push_back(t);
                    done.push_back(0);
                }
                row.col.push_back(static_cast<std::uint32_t>(*v));
            }
            done[row.col[0]] = 1;
            mat.push_back(std::move(row));
        };
        for (auto& pr : sel) {
            add_row(pr.i, pr.lcm / basis_[pr.i].mon[0]);
            add_row(pr.j, pr.lcm / basis_[pr.j].mon[0]);
        }
        while (!todo.empty()) {
            std::uint32_t d = todo.back();
            todo.pop_back();
            if (done[d]) continue;
            done[d] = 1;
            Monomial m = mons[d];
            int k = find_reducer(m, m.support_mask());
            if (k >= 0) add_row(static_cast<std::size_t>(k), m / basis_[static_cast<std::size_t>(k)].mon[0]);
        }
        // renumber columns in descending grevlex
        std::vector<std::uint32_t> order_m(mons.size());
        for (std::size_t i = 0; i < mons.size(); ++i) order_m[i] = static_cast<std::uint32_t>(i);
        std::sort(order_m.begin(), order_m.end(),
                  [&](std::uint32_t a, std::uint32_t b) { return grevlex_greater(mons[a], mons[b]); });
        std::vector<std::uint32_t> col_of(mons.size());
        for (std::size_t i = 0; i < order_m.size(); ++i) col_of[order_m[i]] = static_cast<std::uint32_t>(i);
        for (auto& row : mat)
            for (auto& c : row.col) c = col_of[c];
        std::vector<Monomial> sorted_mons(mons.size());
        for (std::size_t i = 0; i < mons.size(); ++i) sorted_mons[col_of[i]] = mons[i];
        mons = std::move(sorted_mons);
        const std::size_t ncols = mons.size();

        // one pivot per leading column, shortest row preferred; the others get reduced
        std::vector<std::int32_t> pivot(ncols, -1);
        std::vector<std::size_t> order(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) order[r] = r;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (mat[a].col[0] != mat[b].col[0]) return mat[a].col[0] < mat[b].col[0];
            return mat[a].col.size() < mat[b].col.size();
        });
        std::vector<std::size_t> pending;
        std::vector<char> original(ncols, 0);
        for (std::size_t r : order) {
            std::uint32_t c = mat[r].col[0];
            original[c] = 1;
            if (pivot[c] < 0)
                pivot[c] = static_cast<std::int32_t>(r);
            else
                pending.push_back(r);
        }
        const std::uint32_t p = F_.p();
        std::vector<std::uint64_t> acc(ncols, 0);
        std::vector<GPoly> out;
        for (std::size_t r : pending) {
            Row& row = mat[r];
            std::fill(acc.begin(), acc.end(), 0);
            for (std::size_t k = 0; k < row.col.size(); ++k) acc[row.col[k]] = row.coef[k];
            std::size_t start = row.col[0];
            Row res;
            for (std::size_t c = start; c < ncols; ++c) {
                std::uint64_t v = acc[c] % p;
                if (!v) continue;
                if (pivot[c] >= 0) {
                    const Row& pv = mat[static_cast<std::size_t>(pivot[c])];
                    std::uint64_t mul = p - v;  // pivot rows are monic
                    for (std::size_t k = 0; k < pv.col.size(); ++k) acc[pv.col[k]] += mul * pv.coef[k];
                    acc[c] = 0;
                } else {
                    res.col.push_back(static_cast<std::uint32_t>(c));
                    res.coef.push_back(static_cast<std::uint32_t>(v));
                }
            }
            if (res.col.empty()) continue;
            std::uint32_t inv = F_.inv(res.coef[0]);
            for (auto& x : res.coef) x = F_.mul(x, inv);
            std::uint32_t lc = res.col[0];
            mat[r] = std::move(res);
            pivot[lc] = static_cast<std::int32_t>(r);
            if (!original[lc]) {
                GPoly g;
                for (std::size_t k = 0; k < mat[r].col.size(); ++k) {
                    g.mon.push_back(mons[mat[r].col[k]]);
                    g.coef.push_back(mat[r].coef[k]);
                }
                out.push_back(std::move(g));
            }
        }
        return out;
    }

    bool unit_found(GBStats* stats) {
        basis_.clear();
        active_.clear();
        lead_mask_.clear();
        pairs_.clear();
        GPoly one;
        one.mon.push_back(Monomial());
        one.coef.push_back(1);
        basis_.push_back(one);
        active_.push_back(1);
        lead_mask_.push_back(0);
        if (stats) stats->stopped_at_unit = true;
        return false;
    }

    /// Minimal, fully interreduced, sorted by leading monomial ascending.
    std::vector<GPoly> reduced_basis() {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < basis_.size(); ++i)
            if (active_[i]) idx.push_back(i);
        // drop elements whose lead is divisible by another active lead
        std::vector<std::size_t> minimal;
        for (std::size_t a : idx) {
            bool red = false;
            for (std::size_t b : idx)
                if (a != b && basis_[b].mon[0].divides(basis_[a].mon[0]) &&
                    (!(basis_[b].mon[0] == basis_[a].mon[0]) || b < a)) {
                    red = true;
                    break;
                }
            if (!red) minimal.push_back(a);
        }
        std::sort(minimal.begin(), minimal.end(),
                  [&](std::size_t a, std::size_t b) { return grevlex_greater(basis_[b].mon[0], basis_[a].mon[0]); });
        std::vector<GPoly> out;
        for (std::size_t k = 0; k < minimal.size(); ++k) {
            // reduce the tail against the other minimal elements
            std::fill(active_.begin(), active_.end(), 0);
            for (std::size_t l = 0; l < minimal.size(); ++l)
                if (l != k) active_[minimal[l]] = 1;
            const GPoly& g = basis_[minimal[k]];
            GPoly tail;
            tail.mon.assign(g.mon.begin() + 1, g.mon.end());
            tail.coef.assign(g.coef.begin() + 1, g.coef.end());
            GPoly rt;
            if (!tail.empty()) {
                Geobucket gb(F_.p());
                gb.add(tail);
                Monomial m;
                std::uint32_t c;
                while (gb.pop_leading(m, c)) {
                    int r = find_reducer(m, m.support_mask());
                    if (r < 0) {
                        rt.mon.push_back(m);
                        rt.coef.push_back(c);
                    } else {
                        const GPoly& h = basis_[static_cast<std::size_t>(r)];
                        gb.add_scaled(h, 1, F_.neg(c), m / h.mon[0]);
                    }
                }
            }
            GPoly res;
            res.mon.push_back(g.mon[0]);
            res.coef.push_back(1);
            res.mon.insert(res.mon.end(), rt.mon.begin(), rt.mon.end());
            res.coef.insert(res.coef.end(), rt.coef.begin(), rt.coef.end());
            res.sugar = g.sugar;
            out.push_back(std::move(res));
        }
        return out;
    }

    std::size_t raw_size() const noexcept { return basis_.size(); }
    const std::vector<GPoly>& raw_basis() const noexcept { return basis_; }

    /// Install an already reduced basis for use as a reducer set.
    void load_reducers(const std::vector<GPoly>& gb) {
        basis_ = gb;
        active_.assign(gb.size(), 1);
        lead_mask_.clear();
        for (auto& g : gb) lead_mask_.push_back(g.mon[0].support_mask());
    }
    GPoly remainder(const GPoly& f) const {
        Geobucket gb(F_.p());
        gb.add(f);
        GPoly r;
        Monomial m;
        std::uint32_t c;
        while (gb.pop_leading(m, c)) {
            int k = find_reducer(m, m.support_mask());
            if (k < 0) {
                r.mon.push_back(m);
                r.coef.push_back(c);
                continue;
            }
            const GPoly& g = basis_[static_cast<std::size_t>(k)];
            gb.add_scaled(g, 1, F_.neg(c), m / g.mon[0]);
        }
        return r;
    }

   private:
    PrimeField F_;
    GBOptions opts_;
    std::vector<GPoly> basis_;
    std::vector<char> active_;
    std::vector<std::uint64_t> lead_mask_;
    std::vector<Pair> pairs_;
    std::size_t reduced_ = 0;
};

inline Poly to_poly(const RingPtr<Fp>& r, const GPoly& g) {
    std::uint32_t p = r->one.modulus();
    std::vector<Poly::Term> t;
    t.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) t.push_back({g.mon[i], Fp::raw(g.coef[i], p)});
    return Poly::from_terms(r, std::move(t));
}

}  // namespace detail

/// A Gröbner basis together with the ring (and hence the grevlex order) it lives in.
struct GroebnerBasis {
    RingPtr<Fp> ring;
    std::vector<Poly> basis;
    bool reduced = true;

    bool is_unit() const { return basis.size() == 1 && basis[0].is_constant() && !basis[0].is_zero(); }
};

inline void check_system(const std::vector<Poly>& gens, const RingPtr<Fp>& ring) {
    for (auto& g : gens)
        if (g.ring() && g.ring() != ring && g.ring()->names != ring->names)
            throw std::invalid_argument("groebner: generators from different rings");
}

/**
 * Reduced Gröbner basis of the ideal generated by gens, in the grevlex order
 * of their ring.  With stop_at_unit the computation ends early on {1}.
 */
inline GroebnerBasis groebner(const std::vector<Poly>& gens, const RingPtr<Fp>& ring, GBOptions opts = {},
                              GBStats* stats = nullptr) {
    check_system(gens, ring);
    GroebnerBasis out{ring, {}, true};
    std::uint32_t p = ring->one.modulus();
    detail::Buchberger bb(p, opts);
    std::vector<detail::GPoly> in;
    for (auto& g : gens) in.push_back(bb.to_gpoly(g));
    bool ok = opts.linear_algebra ? bb.run_f4(in, stats) : bb.run(in, stats);
    if (!ok) {
        out.basis.push_back(Poly::one(ring));
        if (stats) stats->basis_size = 1;
        return out;
    }
    for (auto& g : bb.reduced_basis()) out.basis.push_back(detail::to_poly(ring, g));
    if (stats) stats->basis_size = out.basis.size();
    return out;
}

inline GroebnerBasis groebner(const std::vector<Poly>& gens, GBOptions opts = {}, GBStats* stats = nullptr) {
    RingPtr<Fp> ring;
    for (auto& g : gens)
        if (g.ring()) {
            ring = g.ring();
            break;
        }
    if (!ring) throw std::invalid_argument("groebner: cannot infer ring from generators");
    return groebner(gens, ring, opts, stats);
}

/// Remainder of f on division by a Gröbner basis.
inline Poly normal_form(const Poly& f, const GroebnerBasis& gb) {
    std::uint32_t p = gb.ring->one.modulus();
    detail::Buchberger bb(p, {});
    std::vector<detail::GPoly> g;
    for (auto& b : gb.basis)
        if (!b.is_zero()) {
            auto gp = bb.to_gpoly(b);
            bb.make_monic(gp);
            g.push_back(std::move(gp));
        }
    if (g.empty()) return f;
    bb.load_reducers(g);
    return detail::to_poly(gb.ring, bb.remainder(bb.to_gpoly(f)));
}

/// True iff the system has no common zero over the algebraic closure.
inline bool is_inconsistent(const std::vector<Poly>& gens, const RingPtr<Fp>& ring, GBStats* stats = nullptr) {
    return groebner(gens, ring, {}, stats).is_unit();
}

}  // namespace ssp4
