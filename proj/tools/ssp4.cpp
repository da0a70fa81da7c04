// ssp4: enumerate, classify and verify superspecial genus-4 curves V(P,Q).
//
// Exit codes: 0 ok, 2 configuration error, 3 budget refusal, 4 verification
// failures found, 1 anything else.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "ssp4/enumerate.hpp"
#include "ssp4/isomorphism.hpp"
#include "ssp4/reference_curves.hpp"

using namespace ssp4;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2, kExitBudget = 3, kExitVerify = 4;

bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

void check_q(std::uint32_t q) {
    if (q < 5) throw ConfigError("q = " + std::to_string(q) + ": characteristic p >= 5 required");
    if (!is_prime(q)) throw ConfigError("q = " + std::to_string(q) + ": only prime fields are supported");
}

/// "b1=1,b2=0,a1=1|2"; values may be "zeta".
std::map<std::string, std::vector<std::uint32_t>> parse_slice(const std::string& text, std::uint32_t q) {
    std::map<std::string, std::vector<std::uint32_t>> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("bad slice entry '" + item + "'");
        std::string key = item.substr(0, eq);
        std::stringstream vs(item.substr(eq + 1));
        std::string v;
        std::vector<std::uint32_t> vals;
        while (std::getline(vs, v, '|')) {
            if (v == "zeta") {
                vals.push_back(primitive_element(q));
                continue;
            }
            try {
                std::size_t used = 0;
                long long x = std::stoll(v, &used);
                if (used != v.size()) throw std::invalid_argument(v);
                vals.push_back(static_cast<std::uint32_t>(((x % q) + q) % q));
            } catch (const std::exception&) {
                throw ConfigError("bad slice value '" + v + "' for " + key);
            }
        }
        if (out.count(key)) throw ConfigError("slot " + key + " sliced twice");
        out[key] = vals;
    }
    return out;
}

void write_json(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << "\n";
    if (!out) throw ConfigError("cannot write " + path);
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Curve records of a report ({"curves": [...]}) or a bare list.
const json& curve_list(const json& doc, const std::string& path) {
    if (doc.is_array()) return doc;
    if (doc.is_object() && doc.contains("curves") && doc.at("curves").is_array()) return doc.at("curves");
    throw ConfigError(path + ": expected a list of curve records or an object with \"curves\"");
}

std::vector<CurveRecord> reference_records(const std::string& set) {
    std::vector<CurveRecord> out;
    try {
        for (auto& c : load_reference_set(set)) out.push_back(c.rec);
    } catch (const std::exception& e) {
        throw ConfigError("unknown reference set '" + set + "'");
    }
    return out;
}

void log_stats(const EnumerationReport& r) {
    auto& s = r.stats;
    std::cerr << "outer points " << s.iterations1 << ", inner systems " << s.iterations2 << ", candidates "
              << s.candidates << "\n"
              << "superspecial before smoothness " << s.hw_solutions << ", singular " << s.singular << ", degenerate "
              << s.degenerate << ", smooth " << s.smooth << "\n"
              << "curves " << r.curves.size() << "\n";
}

struct Common {
    std::string kase;
    std::uint32_t q = 0;
    std::string slice;
    std::string out;
    std::string preset_file;
    bool no_smoothness = false;
};

PresetTable presets_of(const Common& c) {
    try {
        return load_presets(c.preset_file.empty() ? default_preset_path() : c.preset_file);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::vector<HybridSplit> select_splits(const PresetTable& t, QuadricKind k, std::uint32_t q, const std::string& sel) {
    auto all = t.for_case(k, q);
    if (all.empty()) throw ConfigError("no preset splits for case " + to_string(k) + " over F_" + std::to_string(q));
    if (sel.empty()) return all;
    for (auto& s : all)
        if (s.id == sel || s.label == sel) return {s};
    throw ConfigError("no split '" + sel + "' for case " + to_string(k) + " over F_" + std::to_string(q));
}

EnumerationReport concatenate(std::vector<EnumerationReport> parts) {
    EnumerationReport out;
    json templates = json::array();
    for (auto& p : parts) {
        if (out.metadata.is_null()) out.metadata = p.metadata;
        templates.push_back(p.metadata.value("template", ""));
        out.stats.merge(p.stats);
        out.stats.t_total += p.stats.t_total;
        out.curves.insert(out.curves.end(), p.curves.begin(), p.curves.end());
    }
    if (!out.metadata.is_null()) {
        out.metadata.erase("template");
        out.metadata["templates"] = templates;
    }
    sort_curves(out.curves);
    return out;
}

/// Exhaustive enumeration of the given templates, each sliced by the user slice and the split restrictions.
EnumerationReport brute(const QuadricCase& qc, std::uint32_t q, const std::vector<std::pair<std::string, std::map<std::string, std::vector<std::uint32_t>>>>& jobs,
                        const std::map<std::string, std::vector<std::uint32_t>>& slice, const Budgets& b, bool smooth,
                        const std::string& preset_version) {
    std::vector<EnumerationReport> parts;
    for (auto& [tid, restrict] : jobs) {
        auto t = find_template(qc, q, tid);
        auto sl = restrict;
        for (auto& [k, v] : slice) {
            if (t.slot_index(k) < 0) throw ConfigError("slice names unknown slot " + k);
            auto it = sl.find(k);
            if (it == sl.end()) {
                sl[k] = v;
                continue;
            }
            std::vector<std::uint32_t> both;
            for (auto x : v)
                if (std::find(it->second.begin(), it->second.end(), x) != it->second.end()) both.push_back(x);
            it->second = both;
        }
        parts.push_back(brute_force_enumerate(qc, q, t, sl, b, smooth, preset_version));
    }
    return concatenate(std::move(parts));
}

int cmd_enumerate(const Common& c, const std::string& split, const std::string& backend, const std::string& solver,
                  unsigned workers, const std::string& checkpoint) {
    check_q(c.q);
    QuadricCase qc{parse_kind(c.kase), 0};
    auto presets = presets_of(c);
    auto splits = select_splits(presets, qc.kind, c.q, split);
    auto slice = parse_slice(c.slice, c.q);
    Budgets budgets = Budgets::from_env();
    EnumerationReport report;
    if (backend == "brute") {
        std::vector<std::pair<std::string, std::map<std::string, std::vector<std::uint32_t>>>> jobs;
        for (auto& s : splits) jobs.push_back({s.template_id, s.restrict});
        report = brute(qc, c.q, jobs, slice, budgets, !c.no_smoothness, presets.version);
    } else {
        std::vector<EnumerationReport> parts;
        for (auto& s : splits) {
            EnumerationTask task;
            task.qcase = qc;
            task.q = c.q;
            task.split = s;
            task.slice = slice;
            task.solver = solver == "groebner" ? SolverChoice::Groebner
                          : solver == "exhaustive" ? SolverChoice::Exhaustive
                                                   : SolverChoice::Auto;
            task.check_smoothness = !c.no_smoothness;
            task.workers = workers;
            task.budgets = budgets;
            task.preset_version = presets.version;
            if (!checkpoint.empty()) task.checkpoint = splits.size() == 1 ? checkpoint : checkpoint + "." + s.id;
            std::cerr << "split " << s.id << "\n";
            parts.push_back(enumerate_case(task));
        }
        report = parts.size() == 1 ? parts.front() : merge_reports(parts);
    }
    log_stats(report);
    write_json(to_json(report), c.out);
    return 0;
}

int cmd_oracle(const Common& c, const std::vector<std::string>& template_ids) {
    check_q(c.q);
    QuadricCase qc{parse_kind(c.kase), 0};
    auto presets = presets_of(c);
    std::vector<std::pair<std::string, std::map<std::string, std::vector<std::uint32_t>>>> jobs;
    if (template_ids.empty()) {
        for (auto& t : templates(qc, c.q)) jobs.push_back({t.id, {}});
    } else {
        for (auto& id : template_ids) {
            try {
                find_template(qc, c.q, id);
            } catch (const std::exception&) {
                throw ConfigError("no template '" + id + "' for case " + c.kase);
            }
            jobs.push_back({id, {}});
        }
    }
    auto report = brute(qc, c.q, jobs, parse_slice(c.slice, c.q), Budgets::from_env(), !c.no_smoothness, presets.version);
    log_stats(report);
    write_json(to_json(report), c.out);
    return 0;
}

std::vector<CurveRecord> gather(const std::vector<std::string>& inputs, const std::vector<std::string>& refs) {
    std::vector<CurveRecord> curves;
    for (auto& path : inputs) {
        auto doc = read_json(path);
        for (auto& r : curve_list(doc, path)) {
            try {
                curves.push_back(curve_from_json(r));
            } catch (const std::exception& e) {
                throw ConfigError(path + ": bad curve record: " + e.what());
            }
        }
    }
    for (auto& s : refs) {
        auto v = reference_records(s);
        curves.insert(curves.end(), v.begin(), v.end());
    }
    if (curves.empty()) throw ConfigError("no input curves");
    return curves;
}

int cmd_classify(const std::vector<std::string>& inputs, const std::vector<std::string>& refs, const std::string& field,
                 bool no_phase1, const std::string& out) {
    auto curves = gather(inputs, refs);
    std::uint32_t p = curves.front().p;
    std::set<QuadricKind> kinds;
    std::set<std::uint32_t> epses;
    for (auto& c : curves) {
        if (c.p != p) throw ConfigError("input curves over different fields");
        kinds.insert(c.qcase.kind);
        if (c.qcase.kind == QuadricKind::N2) epses.insert(resolve_eps(c.qcase, p));
        if (!(c.Q == quadric(c.qcase, p))) throw ConfigError("input curve with a quadric other than the normal form");
    }
    if (epses.size() > 1) throw ConfigError("N2 inputs with different eps");
    Classification cls;
    json doc;
    if (field == "closure") {
        if (kinds.count(QuadricKind::Dege) && kinds.size() > 1)
            throw ConfigError("closure classification mixes the degenerate quadric with N1/N2");
        QuadricKind target = kinds.count(QuadricKind::Dege) ? QuadricKind::Dege : QuadricKind::N1;
        std::vector<ExtCubic> ext;
        for (auto& c : curves) ext.push_back(closure_form(c.P, c.qcase, p));
        cls = classify_closure(ext, target, p);
    } else {
        if (kinds.size() > 1) throw ConfigError("classification over F_q needs curves of a single case");
        ClassifyOptions opt;
        opt.phase1 = !no_phase1;
        opt.log = [](const std::string& s) { std::cerr << s << "\n"; };
        cls = classify(std::vector<Poly>([&] {
                           std::vector<Poly> v;
                           for (auto& c : curves) v.push_back(c.P);
                           return v;
                       }()),
                       curves.front().qcase, p, opt);
    }
    doc = to_json(cls, curves, field == "closure" ? "closure" : "F_q");
    doc["metadata"] = report_metadata(p, "");
    doc["metadata"].erase("preset_version");
    std::cerr << cls.representatives.size() << " classes\n";
    write_json(doc, out);
    return 0;
}

int cmd_verify(const std::vector<std::string>& inputs, const std::vector<std::string>& refs, bool skip_fp2,
               const std::string& out) {
    json raw = json::array();
    for (auto& path : inputs) {
        auto doc = read_json(path);
        for (auto& r : curve_list(doc, path)) raw.push_back(r);
    }
    for (auto& s : refs)
        for (auto& c : reference_records(s)) raw.push_back(to_json(c));
    if (raw.empty()) throw ConfigError("no input curves");
    json results = json::array();
    std::size_t failures = 0;
    std::optional<std::uint32_t> field;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        json e{{"index", i}};
        std::vector<std::string> problems;
        try {
            auto c = curve_from_json(raw[i]);
            field = c.p;
            check_q(c.p);
            e["case"] = to_string(c.qcase.kind);
            e["P"] = c.P.to_string();
            bool ss = is_superspecial(c.P, c.Q, static_cast<int>(c.p));
            bool smooth = false;
            try {
                smooth = is_nonsingular(c.P, c.Q);
            } catch (const DegenerateCurve&) {
                problems.push_back("Q divides P");
            }
            auto n1 = count_points(c.P, c.Q, 1);
            e["superspecial"] = ss;
            e["smooth"] = smooth;
            e["count_fp"] = n1;
            bool cong = n1 % c.p == 1 % c.p;
            e["count_fp_mod_p_is_1"] = cong;
            if (!ss) problems.push_back("not superspecial");
            if (!smooth) problems.push_back("singular");
            if (!cong) problems.push_back("#C(F_p) not 1 mod p");
            if (c.superspecial && *c.superspecial != ss) problems.push_back("recorded superspecial flag disagrees");
            if (c.smooth && *c.smooth != smooth) problems.push_back("recorded smooth flag disagrees");
            if (c.count_fp && *c.count_fp != n1) problems.push_back("recorded #C(F_p) disagrees");
            if (!skip_fp2) {
                auto n2 = count_points(c.P, c.Q, 2);
                std::uint64_t p = c.p;
                e["count_fp2"] = n2;
                e["maximal"] = n2 == maximal_count_fp2(p);
                e["minimal"] = n2 + 8 * p == p * p + 1;
                if (c.count_fp2 && *c.count_fp2 != n2) problems.push_back("recorded #C(F_p^2) disagrees");
            }
        } catch (const std::exception& ex) {
            problems.push_back(std::string("bad record: ") + ex.what());
        }
        e["ok"] = problems.empty();
        if (!problems.empty()) {
            e["problems"] = problems;
            ++failures;
        }
        results.push_back(e);
    }
    json doc{{"curves", results}, {"failures", failures}};
    doc["metadata"] = report_metadata(field.value_or(5), "");
    doc["metadata"].erase("preset_version");
    std::cerr << raw.size() - failures << " of " << raw.size() << " curves pass\n";
    write_json(doc, out);
    return failures ? kExitVerify : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Superspecial nonhyperelliptic genus-4 curves V(P,Q) over prime fields"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(code_version));

    Common common;
    std::string split, backend = "hybrid", solver = "auto", checkpoint;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    auto add_common = [&](CLI::App* sub, bool out_only) {
        sub->add_option("--out", common.out, "output file (default stdout)");
        if (out_only) return;
        sub->add_option("--case", common.kase, "quadric case")->required()->check(CLI::IsMember({"n1", "n2", "dege"}));
        sub->add_option("--q", common.q, "field size (a prime p >= 5)")->required();
        sub->add_option("--slice", common.slice, "slot restrictions, e.g. b1=1,b2=0,a4=1|2");
        sub->add_option("--preset-file", common.preset_file, "split preset table");
        sub->add_flag("--no-smoothness", common.no_smoothness, "skip the smoothness filter");
    };

    auto* en = app.add_subcommand("enumerate", "enumerate superspecial curves of one case");
    add_common(en, false);
    en->add_option("--split", split, "preset split id or label (default: all splits of the case)");
    en->add_option("--backend", backend, "hybrid or brute")->check(CLI::IsMember({"hybrid", "brute"}));
    en->add_option("--solver", solver, "inner solver of the hybrid backend")
        ->check(CLI::IsMember({"auto", "groebner", "exhaustive"}));
    en->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    en->add_option("--checkpoint", checkpoint, "append-only checkpoint file");

    std::vector<std::string> templ;
    auto* orc = app.add_subcommand("oracle", "exhaustive enumeration for differential testing");
    add_common(orc, false);
    orc->add_option("--template", templ, "template id (default: all templates of the case)");

    std::vector<std::string> inputs, refs;
    std::string field = "fq";
    bool no_phase1 = false, skip_fp2 = false;
    auto* cl = app.add_subcommand("classify", "partition curves into isomorphism classes");
    add_common(cl, true);
    cl->add_option("--in", inputs, "report or curve-list JSON (repeatable)");
    cl->add_option("--reference", refs, "built-in reference set (repeatable)");
    cl->add_option("--field", field, "fq or closure")->check(CLI::IsMember({"fq", "closure"}));
    cl->add_flag("--no-phase1", no_phase1, "skip the pass with similitude factor 1");

    auto* ve = app.add_subcommand("verify", "check superspeciality, smoothness and point counts");
    add_common(ve, true);
    ve->add_option("--in", inputs, "report or curve-list JSON (repeatable)");
    ve->add_option("--reference", refs, "built-in reference set (repeatable)");
    ve->add_flag("--no-fp2", skip_fp2, "skip the count over F_{p^2}");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*en) return cmd_enumerate(common, split, backend, solver, workers, checkpoint);
        if (*orc) return cmd_oracle(common, templ);
        if (*cl) return cmd_classify(inputs, refs, field, no_phase1, common.out);
        if (*ve) return cmd_verify(inputs, refs, skip_fp2, common.out);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget refusal: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
