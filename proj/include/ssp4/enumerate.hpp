/**
 * @file enumerate.hpp
 * @brief Enumeration of superspecial cubics in a family, by the double hybrid
 * method and by exhaustive search.
 *
 * Hybrid path, per outer point: the cubic with the symbolic slots as
 * indeterminates is expanded into its sixteen Hasse–Witt coefficients once;
 * the inner slots are then substituted value by value and the remaining
 * system in the solved slots is handed to a solver.  Each solution is
 * re-checked numerically and filtered for smoothness.
 */
#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "curve.hpp"
#include "families.hpp"
#include "hasse_witt.hpp"
#include "solve.hpp"
#include "version.hpp"

namespace ssp4 {

/// Raised for inconsistent task descriptions (bad slice, mismatched checkpoint, ...).
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct Budgets {
    double solver_threshold = 2e6;    ///< exhaustive inner solve when q^s2 <= this
    double brute_candidates = 3e7;    ///< refuse exhaustive enumeration above this many cubics
    double group_sweep = 2e7;         ///< refuse the group-sweep isomorphism oracle above this many elements

    /// Defaults overridden by SSP4_SOLVER_THRESHOLD, SSP4_BRUTE_BUDGET, SSP4_SWEEP_BUDGET.
    static Budgets from_env() {
        Budgets b;
        auto rd = [](const char* name, double& v) {
            if (const char* s = std::getenv(name)) {
                char* end = nullptr;
                double x = std::strtod(s, &end);
                if (end == s || *end || !(x >= 0)) throw ConfigError(std::string("bad value for ") + name);
                v = x;
            }
        };
        rd("SSP4_SOLVER_THRESHOLD", b.solver_threshold);
        rd("SSP4_BRUTE_BUDGET", b.brute_candidates);
        rd("SSP4_SWEEP_BUDGET", b.group_sweep);
        return b;
    }
};

enum class SolverChoice { Auto, Groebner, Exhaustive };

struct EnumerationTask {
    QuadricCase qcase;
    std::uint32_t q = 0;
    HybridSplit split;
    SolverChoice solver = SolverChoice::Auto;
    /// Narrowed domains for any slots (a one-element list pins the slot).
    std::map<std::string, std::vector<std::uint32_t>> slice;
    bool check_smoothness = true;
    unsigned workers = 1;
    std::string checkpoint;  ///< append-only progress file, empty for none
    Budgets budgets;
    std::string preset_version;
};

struct EnumerationStats {
    std::uint64_t iterations1 = 0;        ///< outer points processed
    std::uint64_t iterations2 = 0;        ///< inner systems solved
    std::uint64_t candidates = 0;         ///< cubics tested (exhaustive path)
    std::uint64_t systems_groebner = 0;
    std::uint64_t systems_exhaustive = 0;
    std::uint64_t hw_solutions = 0;       ///< superspecial cubics before the smoothness filter
    std::uint64_t degenerate = 0;         ///< rejected because Q | P
    std::uint64_t singular = 0;
    std::uint64_t smooth = 0;
    std::uint64_t resumed = 0;            ///< outer points taken from the checkpoint
    double t_symbolic = 0, t_specialize = 0, t_solve = 0, t_smooth = 0, t_total = 0;

    void merge(const EnumerationStats& o) {
        iterations1 += o.iterations1;
        iterations2 += o.iterations2;
        candidates += o.candidates;
        systems_groebner += o.systems_groebner;
        systems_exhaustive += o.systems_exhaustive;
        hw_solutions += o.hw_solutions;
        degenerate += o.degenerate;
        singular += o.singular;
        smooth += o.smooth;
        resumed += o.resumed;
        t_symbolic += o.t_symbolic;
        t_specialize += o.t_specialize;
        t_solve += o.t_solve;
        t_smooth += o.t_smooth;
    }
};

inline nlohmann::json to_json(const EnumerationStats& s) {
    return {{"iterations1", s.iterations1},
            {"iterations2", s.iterations2},
            {"candidates", s.candidates},
            {"systems_groebner", s.systems_groebner},
            {"systems_exhaustive", s.systems_exhaustive},
            {"hw_solutions", s.hw_solutions},
            {"degenerate", s.degenerate},
            {"singular", s.singular},
            {"smooth", s.smooth},
            {"resumed", s.resumed},
            {"seconds", {{"symbolic", s.t_symbolic},
                         {"specialize", s.t_specialize},
                         {"solve", s.t_solve},
                         {"smooth", s.t_smooth},
                         {"total", s.t_total}}}};
}

inline EnumerationStats stats_from_json(const nlohmann::json& j) {
    EnumerationStats s;
    s.iterations1 = j.value("iterations1", 0ull);
    s.iterations2 = j.value("iterations2", 0ull);
    s.candidates = j.value("candidates", 0ull);
    s.systems_groebner = j.value("systems_groebner", 0ull);
    s.systems_exhaustive = j.value("systems_exhaustive", 0ull);
    s.hw_solutions = j.value("hw_solutions", 0ull);
    s.degenerate = j.value("degenerate", 0ull);
    s.singular = j.value("singular", 0ull);
    s.smooth = j.value("smooth", 0ull);
    return s;
}

struct EnumerationReport {
    std::vector<CurveRecord> curves;
    EnumerationStats stats;
    nlohmann::json metadata;
};

/// Provenance block embedded in every output document.
inline nlohmann::json report_metadata(std::uint32_t q, const std::string& preset_version) {
    nlohmann::json m;
    m["code_version"] = code_version;
    m["preset_version"] = preset_version;
    m["q"] = q;
    m["zeta"] = primitive_element(q);
    m["eps"] = default_nonsquare(q);
    return m;
}

inline nlohmann::json to_json(const EnumerationReport& r) {
    nlohmann::json j;
    j["metadata"] = r.metadata;
    j["stats"] = to_json(r.stats);
    j["curves"] = nlohmann::json::array();
    for (auto& c : r.curves) j["curves"].push_back(to_json(c));
    return j;
}

inline EnumerationReport report_from_json(const nlohmann::json& j) {
    EnumerationReport r;
    r.metadata = j.value("metadata", nlohmann::json::object());
    if (j.contains("stats")) r.stats = stats_from_json(j.at("stats"));
    for (auto& c : j.at("curves")) r.curves.push_back(curve_from_json(c));
    return r;
}

/// Canonical order of curve lists: template, then rendered cubic.
inline void sort_curves(std::vector<CurveRecord>& v) {
    std::sort(v.begin(), v.end(), [](const CurveRecord& a, const CurveRecord& b) {
        if (a.template_id != b.template_id) return a.template_id < b.template_id;
        return a.P.to_string() < b.P.to_string();
    });
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string point_key(const std::vector<std::string>& names, const std::vector<std::uint32_t>& vals) {
    std::string k;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) k += ",";
        k += names[i] + "=" + std::to_string(vals[i]);
    }
    return k;
}

/// All tuples of a mixed-radix product, first coordinate slowest.
inline std::vector<std::vector<std::uint32_t>> product_points(const std::vector<std::vector<std::uint32_t>>& doms) {
    std::vector<std::vector<std::uint32_t>> out;
    for (auto& d : doms)
        if (d.empty()) return out;
    std::vector<std::size_t> idx(doms.size(), 0);
    for (;;) {
        std::vector<std::uint32_t> v(doms.size());
        for (std::size_t i = 0; i < doms.size(); ++i) v[i] = doms[i][idx[i]];
        out.push_back(std::move(v));
        std::size_t k = doms.size();
        while (k > 0) {
            --k;
            if (++idx[k] < doms[k].size()) break;
            idx[k] = 0;
            if (k == 0) return out;
        }
        if (doms.empty()) return out;
    }
}

/// Accept a candidate: smoothness filter and record construction.
inline void accept_candidate(const CubicTemplate& t, const Poly& Q, const std::map<std::string, std::uint32_t>& values,
                             const EnumerationTask& task, std::vector<CurveRecord>& out, EnumerationStats& st) {
    Poly P = t.instantiate(values);
    ++st.hw_solutions;
    CurveRecord rec;
    rec.qcase = task.qcase;
    rec.p = task.q;
    rec.Q = Q;
    rec.P = P;
    rec.slots = values;
    rec.template_id = t.id;
    rec.superspecial = true;
    if (task.check_smoothness) {
        auto t0 = std::chrono::steady_clock::now();
        bool smooth = false;
        try {
            smooth = is_nonsingular(P, Q);
        } catch (const DegenerateCurve&) {
            ++st.degenerate;
            st.t_smooth += seconds_since(t0);
            return;
        }
        st.t_smooth += seconds_since(t0);
        if (!smooth) {
            ++st.singular;
            return;
        }
        rec.smooth = true;
        ++st.smooth;
    }
    out.push_back(std::move(rec));
}

/// Append-only progress log: one JSON line per completed outer point.
class CheckpointStore {
   public:
    CheckpointStore(const std::string& path, const nlohmann::json& signature) : path_(path) {
        if (path.empty()) return;
        std::ifstream in(path);
        bool have_header = false;
        std::string line;
        while (in && std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error&) {
                continue;  // torn final line after an interruption
            }
            if (j.value("type", "") == "header") {
                if (j.at("signature") != signature)
                    throw ConfigError("checkpoint " + path + " belongs to a different task");
                have_header = true;
            } else if (j.value("type", "") == "point") {
                done_[j.at("key").get<std::string>()] = j;
            }
        }
        bool torn_tail = false;
        {
            std::ifstream tail(path, std::ios::binary | std::ios::ate);
            if (tail && tail.tellg() > 0) {
                tail.seekg(-1, std::ios::end);
                torn_tail = tail.get() != '\n';
            }
        }
        out_.open(path, std::ios::app);
        if (!out_) throw ConfigError("cannot write checkpoint " + path);
        if (torn_tail) out_ << "\n";
        if (!have_header) {
            nlohmann::json h{{"type", "header"}, {"signature", signature}};
            out_ << h.dump() << "\n" << std::flush;
        }
    }

    bool enabled() const { return !path_.empty(); }
    const nlohmann::json* find(const std::string& key) const {
        auto it = done_.find(key);
        return it == done_.end() ? nullptr : &it->second;
    }
    void append(const std::string& key, const std::vector<CurveRecord>& curves, const EnumerationStats& st) {
        if (!enabled()) return;
        nlohmann::json j{{"type", "point"}, {"key", key}, {"stats", to_json(st)}, {"curves", nlohmann::json::array()}};
        for (auto& c : curves) j["curves"].push_back(to_json(c));
        std::lock_guard<std::mutex> lk(mu_);
        out_ << j.dump() << "\n" << std::flush;
    }

   private:
    std::string path_;
    std::map<std::string, nlohmann::json> done_;
    std::ofstream out_;
    std::mutex mu_;
};

/// Run f(i) for i in [0,n) on up to `workers` threads; the first exception is rethrown.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& f) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next++;
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                    next = n;
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace detail

/**
 * Hybrid enumeration of one split: every cubic of the (sliced) family with
 * V(P,Q) superspecial, and nonsingular unless smoothness checking is off.
 */
inline EnumerationReport enumerate_case(const EnumerationTask& task) {
    auto t_start = std::chrono::steady_clock::now();
    const std::uint32_t q = task.q;
    if (q < 5 || !is_prime(q)) throw ConfigError("enumerate_case: q must be a prime >= 5");
    const HybridSplit& sp = task.split;
    if (sp.kind != task.qcase.kind || sp.q != q) throw ConfigError("enumerate_case: split does not belong to the task");
    CubicTemplate t = find_template(task.qcase, q, sp.template_id);
    sp.validate(t);
    Poly Q = quadric(task.qcase, q);

    auto domain = [&](const std::string& s) {
        auto d = sp.domain(t, s);
        auto it = task.slice.find(s);
        if (it == task.slice.end()) return d;
        t.slot(s);
        std::vector<std::uint32_t> out;
        for (auto v : it->second)
            if (std::find(d.begin(), d.end(), v % q) != d.end()) out.push_back(v % q);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };
    for (auto& [k, v] : task.slice)
        if (t.slot_index(k) < 0) throw ConfigError("slice names unknown slot " + k);

    // pinned solve slots move to the inner loop
    std::vector<std::string> outer = sp.outer(t), inner = sp.inner(t), solve;  // solve: largest first
    for (auto it = sp.solve_order.rbegin(); it != sp.solve_order.rend(); ++it) {
        if (task.slice.count(*it) && domain(*it).size() < q)
            inner.push_back(*it);
        else
            solve.push_back(*it);
    }
    std::vector<std::string> symbols = inner;
    symbols.insert(symbols.end(), solve.begin(), solve.end());
    const int s1 = static_cast<int>(symbols.size()), s2 = static_cast<int>(solve.size());

    std::vector<std::vector<std::uint32_t>> outer_doms, inner_doms;
    for (auto& s : outer) outer_doms.push_back(domain(s));
    for (auto& s : inner) inner_doms.push_back(domain(s));

    std::vector<std::vector<std::uint32_t>> outer_pts;
    for (auto& pt : detail::product_points(outer_doms)) {
        std::map<std::string, std::uint32_t> v;
        for (std::size_t i = 0; i < outer.size(); ++i) v[outer[i]] = pt[i];
        if (t.admissible(v)) outer_pts.push_back(pt);
    }

    EnumerationReport report;
    report.metadata = report_metadata(q, task.preset_version);
    report.metadata["case"] = to_string(task.qcase.kind);
    report.metadata["eps"] = task.qcase.kind == QuadricKind::N2 ? resolve_eps(task.qcase, q) : default_nonsquare(q);
    report.metadata["split"] = sp.id;
    report.metadata["backend"] = "hybrid";
    nlohmann::json slice_json = nlohmann::json::object();
    for (auto& [k, v] : task.slice) slice_json[k] = v;
    report.metadata["slice"] = slice_json;

    nlohmann::json signature{{"case", to_string(task.qcase.kind)}, {"q", q},  {"split", sp.id},
                             {"slice", slice_json},                  {"smooth", task.check_smoothness},
                             {"preset_version", task.preset_version}};
    detail::CheckpointStore ckpt(task.checkpoint, signature);

    // dense spaces shared by all outer points: level k has s1-k variables
    const int D = static_cast<int>(q - 1);
    std::vector<std::unique_ptr<DenseSpace>> spaces;
    std::vector<std::unique_ptr<FirstVarEvaluator>> evals;
    for (int k = 0; k <= static_cast<int>(inner.size()); ++k) spaces.push_back(std::make_unique<DenseSpace>(s1 - k, D));
    for (std::size_t k = 0; k < inner.size(); ++k) evals.push_back(std::make_unique<FirstVarEvaluator>(*spaces[k], *spaces[k + 1]));
    auto solve_ring = make_fp_ring(q, solve);
    std::vector<std::vector<std::uint32_t>> pw(q, std::vector<std::uint32_t>(static_cast<std::size_t>(D) + 1));
    PrimeField F(q);
    for (std::uint32_t a = 0; a < q; ++a) {
        pw[a][0] = 1;
        for (int e = 1; e <= D; ++e) pw[a][static_cast<std::size_t>(e)] = F.mul(pw[a][static_cast<std::size_t>(e - 1)], a);
    }
    double qs2 = 1;
    for (int i = 0; i < s2; ++i) qs2 *= q;
    bool exhaustive = task.solver == SolverChoice::Exhaustive ||
                      (task.solver == SolverChoice::Auto && qs2 <= task.budgets.solver_threshold);

    std::vector<std::vector<CurveRecord>> results(outer_pts.size());
    std::vector<EnumerationStats> stats(outer_pts.size());

    detail::parallel_for(outer_pts.size(), task.workers, [&](std::size_t idx) {
        const auto& opt = outer_pts[idx];
        std::string key = detail::point_key(outer, opt);
        EnumerationStats& st = stats[idx];
        if (const nlohmann::json* done = ckpt.find(key)) {
            st = stats_from_json(done->at("stats"));
            st.resumed = 1;
            for (auto& c : done->at("curves")) results[idx].push_back(curve_from_json(c));
            return;
        }
        std::map<std::string, std::uint32_t> values;
        for (std::size_t i = 0; i < outer.size(); ++i) values[outer[i]] = opt[i];
        ++st.iterations1;

        auto t0 = std::chrono::steady_clock::now();
        std::vector<DenseVec> hw;
        {
            HasseWittExpander ex(t.symbolic(values, symbols), Q, static_cast<int>(q));
            if (ex.space().size() != spaces[0]->size()) throw std::logic_error("enumerate_case: dense space mismatch");
            hw = ex.coefficients();
        }
        st.t_symbolic += detail::seconds_since(t0);
        NumericHasseWitt check(Q, static_cast<int>(q));

        // level buffers: cur[k] holds the 16 vectors after k inner substitutions
        std::vector<std::vector<DenseVec>> cur(inner.size() + 1, std::vector<DenseVec>(hw.size()));
        cur[0] = std::move(hw);
        std::vector<std::uint32_t> ipt(inner.size());

        auto leaf = [&]() {
            for (std::size_t i = 0; i < inner.size(); ++i) values[inner[i]] = ipt[i];
            for (auto& s : solve) values.erase(s);
            if (!t.admissible(values)) return;
            ++st.iterations2;
            auto ts = std::chrono::steady_clock::now();
            std::vector<Poly> sys;
            bool dead = false;
            for (auto& v : cur[inner.size()]) {
                Poly f = from_dense(*spaces[inner.size()], v, solve_ring);
                if (f.is_zero()) continue;
                if (f.is_constant()) {
                    dead = true;
                    break;
                }
                sys.push_back(std::move(f));
            }
            sys = prune_system(sys);
            st.t_specialize += detail::seconds_since(ts);
            if (dead) return;
            ts = std::chrono::steady_clock::now();
            std::vector<Point> sols;
            if (exhaustive) {
                ++st.systems_exhaustive;
                sols = brute_force_variety(sys, solve_ring, q, std::max(task.budgets.solver_threshold, qs2));
            } else {
                ++st.systems_groebner;
                sols = variety_over_fq(sys, solve_ring, q);
            }
            st.t_solve += detail::seconds_since(ts);
            for (auto& s : sols) {
                for (int i = 0; i < s2; ++i) values[solve[static_cast<std::size_t>(i)]] = s[static_cast<std::size_t>(i)];
                if (!t.admissible(values)) continue;
                // independent numeric re-check of superspeciality
                Poly P = t.instantiate(values);
                std::vector<std::uint32_t> c(check.cubic_size(), 0);
                for (auto& term : P.terms()) c[static_cast<std::size_t>(check.cubic_index(term.first))] = term.second.value();
                if (!check.is_superspecial(c))
                    throw std::logic_error("enumerate_case: solver returned a non-superspecial cubic at " + key);
                detail::accept_candidate(t, Q, values, task, results[idx], st);
            }
        };
        auto rec = [&](auto&& self, std::size_t k) -> void {
            if (k == inner.size()) {
                leaf();
                return;
            }
            for (std::uint32_t a : inner_doms[k]) {
                ipt[k] = a;
                auto ts = std::chrono::steady_clock::now();
                for (std::size_t j = 0; j < cur[k].size(); ++j) evals[k]->apply(cur[k][j], pw[a], q, cur[k + 1][j]);
                st.t_specialize += detail::seconds_since(ts);
                self(self, k + 1);
            }
        };
        try {
            rec(rec, 0);
        } catch (const BudgetExceeded& e) {
            throw BudgetExceeded(std::string(e.what()) + " at outer point " + key);
        }
        ckpt.append(key, results[idx], st);
    });

    std::set<std::string> seen;
    for (std::size_t i = 0; i < outer_pts.size(); ++i) {
        report.stats.merge(stats[i]);
        for (auto& c : results[i]) {
            if (!seen.insert(c.P.to_string()).second)
                throw std::logic_error("enumerate_case: duplicate cubic " + c.P.to_string());
            report.curves.push_back(std::move(c));
        }
    }
    sort_curves(report.curves);
    report.stats.t_total = detail::seconds_since(t_start);
    return report;
}

/// Merge reports of disjoint splits; a cubic found twice is a partition error.
inline EnumerationReport merge_reports(const std::vector<EnumerationReport>& parts) {
    EnumerationReport out;
    std::set<std::string> seen;
    nlohmann::json splits = nlohmann::json::array();
    for (auto& r : parts) {
        if (out.metadata.is_null()) out.metadata = r.metadata;
        if (r.metadata.contains("split")) splits.push_back(r.metadata["split"]);
        out.stats.merge(r.stats);
        out.stats.t_total += r.stats.t_total;
        for (auto& c : r.curves) {
            if (!seen.insert(c.template_id + ":" + c.P.to_string()).second)
                throw std::logic_error("merge_reports: cubic appears in two splits: " + c.P.to_string());
            out.curves.push_back(c);
        }
    }
    if (!out.metadata.is_null()) {
        out.metadata.erase("split");
        out.metadata["splits"] = splits;
    }
    sort_curves(out.curves);
    return out;
}

struct EnumerateOptions {
    SolverChoice solver = SolverChoice::Auto;
    bool check_smoothness = true;
    unsigned workers = 1;
    std::string checkpoint_prefix;  ///< per-split checkpoint files <prefix>.<split id>
    Budgets budgets;
};

/// Every preset split of (case, q), merged.
inline EnumerationReport enumerate_splits(QuadricKind kind, std::uint32_t q, const PresetTable& presets,
                                          const EnumerateOptions& opt = {}) {
    std::vector<EnumerationReport> parts;
    for (auto& s : preset_splits(presets, kind, q)) {
        EnumerationTask task;
        task.qcase = {kind, 0};
        task.q = q;
        task.split = s;
        task.solver = opt.solver;
        task.check_smoothness = opt.check_smoothness;
        task.workers = opt.workers;
        task.budgets = opt.budgets;
        task.preset_version = presets.version;
        if (!opt.checkpoint_prefix.empty()) task.checkpoint = opt.checkpoint_prefix + "." + s.id;
        parts.push_back(enumerate_case(task));
    }
    return merge_reports(parts);
}

/**
 * All cases needed for q: Dege only for q = 5 (N1 and N2 carry no
 * superspecial curves there), all three cases otherwise.
 */
inline std::map<QuadricKind, EnumerationReport> enumerate_all(std::uint32_t q, const PresetTable& presets,
                                                              const EnumerateOptions& opt = {}) {
    std::map<QuadricKind, EnumerationReport> out;
    std::vector<QuadricKind> kinds{QuadricKind::Dege};
    if (q != 5) kinds = {QuadricKind::N1, QuadricKind::N2, QuadricKind::Dege};
    for (auto k : kinds) out[k] = enumerate_splits(k, q, presets, opt);
    return out;
}

/**
 * Exhaustive oracle: every cubic of the template (optionally sliced) is
 * tested numerically.  Refuses with BudgetExceeded above the candidate budget.
 */
inline EnumerationReport brute_force_enumerate(const QuadricCase& qcase, std::uint32_t q, const CubicTemplate& t,
                                               const std::map<std::string, std::vector<std::uint32_t>>& slice = {},
                                               const Budgets& budgets = {}, bool check_smoothness = true,
                                               const std::string& preset_version = "") {
    auto t_start = std::chrono::steady_clock::now();
    Poly Q = quadric(qcase, q);
    std::vector<std::vector<std::uint32_t>> doms;
    double total = 1;
    for (auto& s : t.slots) {
        auto d = s.domain;
        auto it = slice.find(s.name);
        if (it != slice.end()) {
            std::vector<std::uint32_t> n;
            for (auto v : it->second)
                if (std::binary_search(d.begin(), d.end(), v % q)) n.push_back(v % q);
            std::sort(n.begin(), n.end());
            n.erase(std::unique(n.begin(), n.end()), n.end());
            d = n;
        }
        doms.push_back(d);
        total *= static_cast<double>(d.size());
    }
    for (auto& [k, v] : slice)
        if (t.slot_index(k) < 0) throw ConfigError("slice names unknown slot " + k);
    if (total > budgets.brute_candidates)
        throw BudgetExceeded("brute_force_enumerate: " + std::to_string(static_cast<long long>(total)) +
                             " candidates exceed the budget");

    NumericHasseWitt hw(Q, static_cast<int>(q));
    std::vector<std::uint32_t> base(hw.cubic_size(), 0);
    for (auto& term : t.fixed.terms()) base[static_cast<std::size_t>(hw.cubic_index(term.first))] = term.second.value();
    std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>> shapes;
    for (auto& s : t.slots) {
        std::vector<std::pair<std::size_t, std::uint32_t>> sh;
        for (auto& term : s.shape.terms())
            sh.push_back({static_cast<std::size_t>(hw.cubic_index(term.first)), term.second.value()});
        shapes.push_back(std::move(sh));
    }

    EnumerationReport report;
    report.metadata = report_metadata(q, preset_version);
    report.metadata["case"] = to_string(qcase.kind);
    report.metadata["template"] = t.id;
    report.metadata["backend"] = "brute";
    EnumerationTask acc;
    acc.qcase = qcase;
    acc.q = q;
    acc.check_smoothness = check_smoothness;

    std::size_t n = doms.size();
    for (auto& d : doms)
        if (d.empty()) return report;
    std::vector<std::size_t> idx(n, 0);
    std::vector<std::uint32_t> c(base.size());
    std::map<std::string, std::uint32_t> values;
    for (;;) {
        c = base;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t v = doms[i][idx[i]];
            if (!v) continue;
            for (auto& [k, w] : shapes[i]) c[k] = static_cast<std::uint32_t>((c[k] + v * w) % q);
        }
        ++report.stats.candidates;
        bool ok = true;
        if (!t.not_all_zero.empty()) {
            values.clear();
            for (std::size_t i = 0; i < n; ++i) values[t.slots[i].name] = doms[i][idx[i]];
            ok = t.admissible(values);
        }
        if (ok && hw.is_superspecial(c)) {
            values.clear();
            for (std::size_t i = 0; i < n; ++i) values[t.slots[i].name] = doms[i][idx[i]];
            detail::accept_candidate(t, Q, values, acc, report.curves, report.stats);
        }
        std::size_t k = n;
        bool done = true;
        while (k > 0) {
            --k;
            if (++idx[k] < doms[k].size()) {
                done = false;
                break;
            }
            idx[k] = 0;
        }
        if (done) break;
    }
    sort_curves(report.curves);
    report.stats.t_total = detail::seconds_since(t_start);
    return report;
}

}  // namespace ssp4
