/**
 * @file families.hpp
 * @brief Quadric normal forms, reduced cubic templates and hybrid split presets.
 *
 * Cubic templates are a fixed numeric part plus named slots (a0..a10, b1,
 * b2), each slot contributing value * shape.  Hybrid splits say which slots
 * are swept in the outer loop, which are symbolic while (PQ)^(p-1) is
 * expanded, and which of those are solved for; they are data loaded from a
 * versioned JSON preset table.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpoly.hpp"

namespace ssp4 {

enum class QuadricKind { N1, N2, Dege };

inline std::string to_string(QuadricKind k) {
    switch (k) {
        case QuadricKind::N1: return "n1";
        case QuadricKind::N2: return "n2";
        case QuadricKind::Dege: return "dege";
    }
    return "?";
}

inline QuadricKind parse_kind(const std::string& s) {
    std::string t = s;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "n1") return QuadricKind::N1;
    if (t == "n2") return QuadricKind::N2;
    if (t == "dege") return QuadricKind::Dege;
    throw std::invalid_argument("unknown quadric case '" + s + "' (expected n1, n2 or dege)");
}

struct QuadricCase {
    QuadricKind kind = QuadricKind::N1;
    std::uint32_t eps = 0;  ///< non-square used by N2 (0 = default for the prime)
};

/// The shared ring F_p[x,y,z,w].
inline RingPtr<Fp> xyzw_ring(std::uint32_t p) {
    static thread_local std::map<std::uint32_t, RingPtr<Fp>> cache;
    auto& r = cache[p];
    if (!r) r = make_fp_ring(p, {"x", "y", "z", "w"});
    return r;
}

inline std::uint32_t resolve_eps(const QuadricCase& c, std::uint32_t p) {
    std::uint32_t e = c.eps ? c.eps % p : default_nonsquare(p);
    if (PrimeField(p).is_square(e)) throw std::invalid_argument("N2 requires a non-square eps");
    return e;
}

/// Normal form of the quadric: 2xw+2yz, 2xw+y^2-eps z^2, or 2yw+z^2.
inline Poly quadric(const QuadricCase& c, std::uint32_t p) {
    auto r = xyzw_ring(p);
    switch (c.kind) {
        case QuadricKind::N1: return parse_poly(r, "2*x*w + 2*y*z");
        case QuadricKind::N2: return parse_poly(r, "2*x*w + y^2 - " + std::to_string(resolve_eps(c, p)) + "*z^2");
        case QuadricKind::Dege: return parse_poly(r, "2*y*w + z^2");
    }
    throw std::logic_error("quadric: bad case");
}

/// The monomial eliminated by reduction modulo Q: xw for N1/N2, yw for Dege.
inline Monomial mod_monomial(QuadricKind k) {
    return k == QuadricKind::Dege ? Monomial::from_exponents({0, 1, 0, 1}) : Monomial::from_exponents({1, 0, 0, 1});
}

/// Symmetric matrix phi with Q(v) = v^t phi v.
inline std::array<std::array<std::uint32_t, 4>, 4> quadric_matrix(const QuadricCase& c, std::uint32_t p) {
    std::array<std::array<std::uint32_t, 4>, 4> m{};
    switch (c.kind) {
        case QuadricKind::N1:
            m[0][3] = m[3][0] = m[1][2] = m[2][1] = 1;
            break;
        case QuadricKind::N2:
            m[0][3] = m[3][0] = m[1][1] = 1;
            m[2][2] = p - resolve_eps(c, p);
            break;
        case QuadricKind::Dege:
            m[1][3] = m[3][1] = m[2][2] = 1;
            break;
    }
    return m;
}

struct Slot {
    std::string name;
    Poly shape;                          ///< cubic multiplied by the slot value
    std::vector<std::uint32_t> domain;   ///< admissible values, ascending
};

class CubicTemplate {
   public:
    std::string id;
    QuadricKind kind = QuadricKind::N1;
    std::uint32_t q = 0;
    std::uint32_t eps = 0;  ///< for N2
    Poly fixed;
    std::vector<Slot> slots;
    std::vector<std::vector<std::string>> not_all_zero;  ///< groups of slots that may not vanish together

    int slot_index(const std::string& name) const {
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i].name == name) return static_cast<int>(i);
        return -1;
    }
    const Slot& slot(const std::string& name) const {
        int i = slot_index(name);
        if (i < 0) throw std::invalid_argument("template " + id + " has no slot " + name);
        return slots[static_cast<std::size_t>(i)];
    }
    std::vector<std::string> slot_names() const {
        std::vector<std::string> n;
        for (auto& s : slots) n.push_back(s.name);
        return n;
    }

    /// Cubic for a full assignment of slot values.
    Poly instantiate(const std::map<std::string, std::uint32_t>& values) const {
        Poly P = fixed;
        for (auto& s : slots) {
            auto it = values.find(s.name);
            if (it == values.end()) throw std::invalid_argument("instantiate: missing value for " + s.name);
            if (it->second % q) P += s.shape.scale(Fp(it->second, q));
        }
        return P;
    }

    /// Domains and the not-all-zero constraints, for a full or partial assignment.
    bool admissible(const std::map<std::string, std::uint32_t>& values) const {
        for (auto& [k, v] : values) {
            auto& d = slot(k).domain;
            if (!std::binary_search(d.begin(), d.end(), v)) return false;
        }
        for (auto& grp : not_all_zero) {
            bool all_known = true, all_zero = true;
            for (auto& n : grp) {
                auto it = values.find(n);
                if (it == values.end())
                    all_known = false;
                else if (it->second)
                    all_zero = false;
            }
            if (all_known && all_zero) return false;
        }
        return true;
    }

    /**
     * Slot values with instantiate(values) == P, when P lies in the span of
     * the template (domains are not checked).  Slot shapes are linearly
     * independent in every shipped template, so the answer is unique.
     */
    std::optional<std::map<std::string, std::uint32_t>> decompose(const Poly& P) const {
        PrimeField F(q);
        std::vector<Monomial> mons;
        auto collect = [&](const Poly& f) {
            for (auto& t : f.terms())
                if (std::find(mons.begin(), mons.end(), t.first) == mons.end()) mons.push_back(t.first);
        };
        collect(P);
        collect(fixed);
        for (auto& s : slots) collect(s.shape);
        std::size_t n = slots.size(), m = mons.size();
        // rows: monomials, columns: slots | rhs
        std::vector<std::vector<std::uint32_t>> A(m, std::vector<std::uint32_t>(n + 1, 0));
        Poly rhs = P - fixed;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) A[i][j] = slots[j].shape.coefficient_of(mons[i]).value();
            A[i][n] = rhs.coefficient_of(mons[i]).value();
        }
        std::vector<int> pivot_col;
        std::size_t r = 0;
        for (std::size_t c = 0; c < n && r < m; ++c) {
            std::size_t k = r;
            while (k < m && !A[k][c]) ++k;
            if (k == m) continue;
            std::swap(A[k], A[r]);
            std::uint32_t inv = F.inv(A[r][c]);
            for (auto& x : A[r]) x = F.mul(x, inv);
            for (std::size_t i = 0; i < m; ++i)
                if (i != r && A[i][c]) {
                    std::uint32_t f = A[i][c];
                    for (std::size_t j = 0; j <= n; ++j) A[i][j] = F.sub(A[i][j], F.mul(f, A[r][j]));
                }
            pivot_col.push_back(static_cast<int>(c));
            ++r;
        }
        for (std::size_t i = r; i < m; ++i)
            if (A[i][n]) return std::nullopt;
        std::map<std::string, std::uint32_t> out;
        for (auto& s : slots) out[s.name] = 0;
        for (std::size_t i = 0; i < r; ++i) out[slots[static_cast<std::size_t>(pivot_col[i])].name] = A[i][n];
        if (!(instantiate(out) == P)) return std::nullopt;
        return out;
    }

    /**
     * Cubic over F_q[symbols]: slots listed in `symbols` become variables (in
     * that order), every other slot takes its value from `values`.
     */
    SymPoly symbolic(const std::map<std::string, std::uint32_t>& values, const std::vector<std::string>& symbols) const {
        auto ar = make_fp_ring(q, symbols);
        auto sr = make_ring<Poly>({"x", "y", "z", "w"}, Poly::one(ar));
        auto lift = [&](const Poly& f, const Poly& c) {
            return f.map_coefficients<Poly>(sr, [&](const Fp& v) { return c.scale(v); });
        };
        SymPoly P = lift(fixed, Poly::one(ar));
        for (auto& s : slots) {
            auto pos = std::find(symbols.begin(), symbols.end(), s.name);
            if (pos != symbols.end()) {
                P += lift(s.shape, Poly::variable(ar, static_cast<int>(pos - symbols.begin())));
                continue;
            }
            auto it = values.find(s.name);
            if (it == values.end()) throw std::invalid_argument("symbolic: slot " + s.name + " neither symbolic nor set");
            if (it->second % q) P += lift(s.shape, Poly::constant(ar, Fp(it->second, q)));
        }
        return P;
    }
};

namespace detail {

inline std::vector<std::uint32_t> all_values(std::uint32_t q) {
    std::vector<std::uint32_t> v(q);
    for (std::uint32_t i = 0; i < q; ++i) v[i] = i;
    return v;
}
inline std::vector<std::uint32_t> unit_values(std::uint32_t q) {
    std::vector<std::uint32_t> v;
    for (std::uint32_t i = 1; i < q; ++i) v.push_back(i);
    return v;
}

inline CubicTemplate make_template(const std::string& id, QuadricKind kind, std::uint32_t q, std::uint32_t eps,
                                   const std::string& fixed,
                                   const std::vector<std::tuple<std::string, std::string, std::vector<std::uint32_t>>>& s) {
    auto r = xyzw_ring(q);
    CubicTemplate t;
    t.id = id;
    t.kind = kind;
    t.q = q;
    t.eps = eps;
    t.fixed = parse_poly(r, fixed);
    for (auto& [name, shape, dom] : s) {
        std::vector<std::uint32_t> d = dom;
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        t.slots.push_back({name, parse_poly(r, shape), d});
    }
    return t;
}

}  // namespace detail

/**
 * The reduced cubic families for a quadric case.  Dege over F_5 has two
 * templates ("dege1", "dege2"); every other supported case has one.
 */
inline std::vector<CubicTemplate> templates(const QuadricCase& c, std::uint32_t q) {
    if (q < 5 || !is_prime(q)) throw std::invalid_argument("templates: q must be a prime >= 5");
    auto all = detail::all_values(q), units = detail::unit_values(q);
    std::vector<CubicTemplate> out;
    switch (c.kind) {
        case QuadricKind::N1: {
            std::uint32_t zeta = primitive_element(q);
            out.push_back(detail::make_template(
                "n1", c.kind, q, 0, "x^2*y",
                {{"b1", "x^2*z", {0, 1, zeta}}, {"b2", "x*z^2", {0, 1}}, {"a1", "y^3", all},
                 {"a2", "y^2*z", all},           {"a3", "y*z^2", all},    {"a4", "z^3", all},
                 {"a5", "y^2*w", all},           {"a6", "y*z*w", all},    {"a7", "z^2*w", all},
                 {"a8", "y*w^2", all},           {"a9", "z*w^2", all},    {"a10", "w^3", all}}));
            break;
        }
        case QuadricKind::N2: {
            std::uint32_t e = resolve_eps(c, q);
            std::string E = std::to_string(e);
            auto t = detail::make_template(
                "n2", c.kind, q, e, "0",
                {{"a1", "x^2*y", all},
                 {"a2", "x^2*z", all},
                 {"a3", "(y^2 - " + E + "*z^2)*x", all},
                 {"b1", "y*(y^2 - " + E + "*z^2)", {0, 1}},
                 {"a4", "y*(y^2 + 3*" + E + "*z^2)", all},
                 {"a5", "z*(3*y^2 + " + E + "*z^2)", all},
                 {"a6", "y^2*w", all},
                 {"a7", "y*z*w", all},
                 {"b2", "z^2*w", {0, 1}},
                 {"a8", "y*w^2", all},
                 {"a9", "z*w^2", all},
                 {"a10", "w^3", all}});
            t.not_all_zero.push_back({"a1", "a2"});
            out.push_back(std::move(t));
            break;
        }
        case QuadricKind::Dege: {
            out.push_back(detail::make_template(
                "dege1", c.kind, q, 0, "0",
                {{"a0", "x^3", units},   {"a1", "x*y^2", all},  {"a2", "x*z^2", all},   {"a3", "x*w^2", all},
                 {"a4", "x*y*z", all},   {"a5", "x*z*w", all},  {"a6", "y^3", units},   {"a7", "z^3", all},
                 {"a8", "w^3", all},     {"a9", "y*z^2", all},  {"b1", "z^2*w", {0, 1}}, {"b2", "z*w^2", {0, 1}}}));
            if (q == 5)
                out.push_back(detail::make_template("dege2", c.kind, q, 0, "x^3 + y^2*z + z*w^2",
                                                    {{"a1", "x*y^2", all},
                                                     {"a2", "x*z^2", all},
                                                     {"a3", "x*w^2", all},
                                                     {"a4", "x*y*z", all},
                                                     {"b1", "x*z*w", {0, 1}}}));
            break;
        }
    }
    return out;
}

inline CubicTemplate find_template(const QuadricCase& c, std::uint32_t q, const std::string& id) {
    for (auto& t : templates(c, q))
        if (t.id == id) return t;
    throw std::invalid_argument("no template '" + id + "' for case " + to_string(c.kind) + " over F_" +
                                std::to_string(q));
}

/**
 * One configuration of the double hybrid method.  Slots not in `symbolic`
 * form the outer loop (A1); symbolic slots not in `solve` form the inner loop
 * (A2); `solve_order` lists the solved slots smallest first in grevlex.
 */
struct HybridSplit {
    std::string id;
    std::string label;
    QuadricKind kind = QuadricKind::N1;
    std::uint32_t q = 0;
    std::string template_id;
    std::map<std::string, std::vector<std::uint32_t>> restrict;  ///< narrowed slot domains
    std::vector<std::string> symbolic;                           ///< s1 slots
    std::vector<std::string> solve_order;                        ///< s2 slots, smallest first

    std::size_t s1() const noexcept { return symbolic.size(); }
    std::size_t s2() const noexcept { return solve_order.size(); }

    std::vector<std::uint32_t> domain(const CubicTemplate& t, const std::string& slot) const {
        auto it = restrict.find(slot);
        if (it != restrict.end()) return it->second;
        return t.slot(slot).domain;
    }
    std::vector<std::string> outer(const CubicTemplate& t) const {
        std::vector<std::string> o;
        for (auto& s : t.slots)
            if (std::find(symbolic.begin(), symbolic.end(), s.name) == symbolic.end()) o.push_back(s.name);
        return o;
    }
    std::vector<std::string> inner(const CubicTemplate& t) const {
        std::vector<std::string> o;
        for (auto& s : t.slots)
            if (std::find(symbolic.begin(), symbolic.end(), s.name) != symbolic.end() &&
                std::find(solve_order.begin(), solve_order.end(), s.name) == solve_order.end())
                o.push_back(s.name);
        return o;
    }

    void validate(const CubicTemplate& t) const {
        std::set<std::string> seen;
        for (auto& s : symbolic) {
            t.slot(s);
            if (!seen.insert(s).second) throw std::invalid_argument("split " + id + ": repeated symbolic slot " + s);
        }
        for (auto& s : solve_order)
            if (!seen.count(s)) throw std::invalid_argument("split " + id + ": solved slot " + s + " is not symbolic");
        std::set<std::string> so(solve_order.begin(), solve_order.end());
        if (so.size() != solve_order.size()) throw std::invalid_argument("split " + id + ": repeated solved slot");
        for (auto& [k, dom] : restrict) {
            auto& full = t.slot(k).domain;
            for (auto v : dom)
                if (!std::binary_search(full.begin(), full.end(), v))
                    throw std::invalid_argument("split " + id + ": restriction of " + k + " leaves its domain");
        }
        for (auto& s : solve_order)
            if (domain(t, s).size() != q)
                throw std::invalid_argument("split " + id + ": solved slot " + s + " must range over all of F_q");
    }
};

/// Product of domain sizes over a list of slots.
inline std::uint64_t domain_product(const HybridSplit& s, const CubicTemplate& t, const std::vector<std::string>& names) {
    std::uint64_t n = 1;
    for (auto& k : names) n *= s.domain(t, k).size();
    return n;
}

struct PresetTable {
    std::string version;
    std::vector<HybridSplit> splits;

    std::vector<HybridSplit> for_case(QuadricKind k, std::uint32_t q) const {
        std::vector<HybridSplit> out;
        for (auto& s : splits)
            if (s.kind == k && s.q == q) out.push_back(s);
        return out;
    }
};

/**
 * Parse a preset table.  Domain entries are integers or the token "zeta"
 * (the smallest primitive root); a restriction may also be the string
 * "units".
 */
inline PresetTable parse_presets(const nlohmann::json& j) {
    PresetTable t;
    t.version = j.at("version").get<std::string>();
    for (auto& e : j.at("splits")) {
        HybridSplit s;
        s.id = e.at("id").get<std::string>();
        s.label = e.value("label", s.id);
        s.kind = parse_kind(e.at("case").get<std::string>());
        s.q = e.at("q").get<std::uint32_t>();
        s.template_id = e.at("template").get<std::string>();
        s.symbolic = e.at("symbolic").get<std::vector<std::string>>();
        s.solve_order = e.at("solve_order").get<std::vector<std::string>>();
        if (e.contains("restrict"))
            for (auto& [k, v] : e.at("restrict").items()) {
                std::vector<std::uint32_t> dom;
                if (v.is_string()) {
                    if (v.get<std::string>() != "units") throw std::invalid_argument("preset: bad restriction " + k);
                    dom = detail::unit_values(s.q);
                } else {
                    for (auto& x : v) {
                        if (x.is_string()) {
                            if (x.get<std::string>() != "zeta") throw std::invalid_argument("preset: bad value " + k);
                            dom.push_back(primitive_element(s.q));
                        } else {
                            dom.push_back(static_cast<std::uint32_t>(((x.get<long long>() % s.q) + s.q) % s.q));
                        }
                    }
                }
                std::sort(dom.begin(), dom.end());
                s.restrict[k] = dom;
            }
        t.splits.push_back(std::move(s));
    }
    for (auto& s : t.splits) {
        QuadricCase qc{s.kind, 0};
        s.validate(find_template(qc, s.q, s.template_id));
    }
    return t;
}

inline PresetTable load_presets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open preset file " + path);
    nlohmann::json j;
    in >> j;
    return parse_presets(j);
}

#ifdef SSP4_PRESET_DIR
inline std::string default_preset_path() { return std::string(SSP4_PRESET_DIR) + "/splits.json"; }
#endif

/// The splits shipped with the library for (case, q).
inline std::vector<HybridSplit> preset_splits(const PresetTable& table, QuadricKind k, std::uint32_t q) {
    auto s = table.for_case(k, q);
    if (s.empty())
        throw std::invalid_argument("no preset splits for case " + to_string(k) + " over F_" + std::to_string(q));
    return s;
}

}  // namespace ssp4
