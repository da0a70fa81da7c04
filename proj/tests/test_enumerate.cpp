#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ssp4/enumerate.hpp"
#include "ssp4/reference_curves.hpp"

using namespace ssp4;

namespace {

PresetTable presets() { return load_presets(default_preset_path()); }

HybridSplit split_by_id(const std::string& id) {
    for (auto& s : presets().splits)
        if (s.id == id) return s;
    throw std::runtime_error("no split " + id);
}

EnumerationTask make_task(const std::string& split_id, QuadricKind kind, std::uint32_t q) {
    EnumerationTask t;
    t.qcase = {kind, 0};
    t.q = q;
    t.split = split_by_id(split_id);
    t.preset_version = presets().version;
    return t;
}

std::vector<std::string> cubics(const EnumerationReport& r) {
    std::vector<std::string> v;
    for (auto& c : r.curves) v.push_back(c.template_id + ":" + c.P.to_string());
    std::sort(v.begin(), v.end());
    return v;
}

std::string temp_path(const std::string& stem) {
    auto p = std::filesystem::temp_directory_path() / (stem + "-" + std::to_string(::getpid()));
    std::filesystem::remove(p);
    return p.string();
}

}  // namespace

TEST(Enumerate, DegeSecondFormOverF5MatchesBruteForce) {
    auto task = make_task("dege-5-2", QuadricKind::Dege, 5);
    auto hybrid = enumerate_case(task);
    auto brute = brute_force_enumerate(task.qcase, 5, find_template(task.qcase, 5, "dege2"));
    EXPECT_EQ(cubics(hybrid), cubics(brute));
    EXPECT_FALSE(hybrid.curves.empty());
    for (auto& c : hybrid.curves) {
        EXPECT_TRUE(is_superspecial(c.P, c.Q, 5));
        EXPECT_TRUE(is_nonsingular(c.P, c.Q));
    }
}

TEST(Enumerate, SolverBackendsAgree) {
    auto task = make_task("dege-5-2", QuadricKind::Dege, 5);
    task.solver = SolverChoice::Groebner;
    auto gb = enumerate_case(task);
    task.solver = SolverChoice::Exhaustive;
    auto ex = enumerate_case(task);
    EXPECT_EQ(cubics(gb), cubics(ex));
    EXPECT_GT(gb.stats.systems_groebner, 0u);
    EXPECT_EQ(gb.stats.systems_exhaustive, 0u);
    EXPECT_GT(ex.stats.systems_exhaustive, 0u);
}

TEST(Enumerate, DegeFirstFormSliceOverF5MatchesBruteForce) {
    auto task = make_task("dege-5-1", QuadricKind::Dege, 5);
    task.slice = {{"a0", {1}}, {"a6", {1, 2}}, {"b1", {0}}, {"a4", {0, 1}}};
    auto hybrid = enumerate_case(task);
    auto brute = brute_force_enumerate(task.qcase, 5, find_template(task.qcase, 5, "dege1"), task.slice);
    EXPECT_EQ(cubics(hybrid), cubics(brute));
}

TEST(Enumerate, F11SlicesMatchBruteForce) {
    // N2 with four free slots, everything else pinned: 11^4 candidates
    auto task = make_task("n2-11", QuadricKind::N2, 11);
    task.slice = {{"a1", {1}}, {"a2", {0}}, {"a3", {0}},  {"b1", {1}}, {"a4", {0}},
                  {"a5", {1}}, {"b2", {0}}, {"a6", {0}}};
    auto t = find_template(task.qcase, 11, "n2");
    auto hybrid = enumerate_case(task);
    auto brute = brute_force_enumerate(task.qcase, 11, t, task.slice);
    EXPECT_EQ(cubics(hybrid), cubics(brute));
    EXPECT_EQ(brute.stats.candidates, 14641u);

    auto task1 = make_task("n1-11-iii", QuadricKind::N1, 11);
    task1.slice = {{"b1", {0}}, {"b2", {1}}, {"a1", {1}}, {"a2", {0}}, {"a3", {1}}, {"a4", {0}},
                   {"a5", {0}}, {"a6", {2}}};
    auto t1 = find_template(task1.qcase, 11, "n1");
    EXPECT_EQ(cubics(enumerate_case(task1)), cubics(brute_force_enumerate(task1.qcase, 11, t1, task1.slice)));
}

TEST(Enumerate, KnownCurvesAreFoundInTheirSlice) {
    // each F11 reference curve reappears when its own outer slots are pinned
    for (auto& [set, split, kind] : std::vector<std::tuple<std::string, std::string, QuadricKind>>{
             {"f11-n2", "n2-11", QuadricKind::N2}, {"f11-dege", "dege-11", QuadricKind::Dege}}) {
        auto curves = load_reference_set(set);
        auto lc = curves.front();
        auto task = make_task(split, kind, 11);
        auto t = find_template(task.qcase, 11, task.split.template_id);
        auto vals = t.decompose(lc.rec.P);
        ASSERT_TRUE(vals.has_value()) << set;
        for (auto& [k, v] : *vals) {
            bool solved = std::find(task.split.solve_order.begin(), task.split.solve_order.end(), k) !=
                          task.split.solve_order.end();
            if (!solved) task.slice[k] = {v};
        }
        auto r = enumerate_case(task);
        auto got = cubics(r);
        EXPECT_NE(std::find(got.begin(), got.end(), t.id + ":" + lc.rec.P.to_string()), got.end()) << set;
    }
}

TEST(Enumerate, WorkerCountDoesNotChangeTheResult) {
    auto task = make_task("dege-5-1", QuadricKind::Dege, 5);
    task.slice = {{"a0", {1, 2}}, {"a6", {1}}, {"b1", {0}}, {"b2", {0}}, {"a4", {0, 1, 2}}};
    auto one = enumerate_case(task);
    task.workers = 3;
    auto three = enumerate_case(task);
    EXPECT_EQ(cubics(one), cubics(three));
    EXPECT_EQ(one.stats.iterations1, three.stats.iterations1);
    EXPECT_EQ(one.stats.iterations2, three.stats.iterations2);
    EXPECT_EQ(to_json(one).at("curves"), to_json(three).at("curves"));
}

TEST(Enumerate, CheckpointResumes) {
    auto task = make_task("dege-5-2", QuadricKind::Dege, 5);
    task.checkpoint = temp_path("ssp4-ckpt");
    auto first = enumerate_case(task);
    EXPECT_EQ(first.stats.resumed, 0u);
    auto second = enumerate_case(task);
    EXPECT_EQ(cubics(first), cubics(second));
    EXPECT_EQ(second.stats.resumed, first.stats.iterations1);
    EXPECT_EQ(first.stats.iterations2, second.stats.iterations2);

    // a torn final line is ignored and that point recomputed
    {
        std::ofstream out(task.checkpoint, std::ios::app);
        out << "{\"key\": \"trunc";
    }
    EXPECT_EQ(cubics(enumerate_case(task)), cubics(first));
    std::ifstream in(task.checkpoint);
    std::string line;
    int parsed = 0;
    while (std::getline(in, line))
        if (!line.empty()) {
            parsed += nlohmann::json::accept(line);
        }
    EXPECT_EQ(static_cast<std::uint64_t>(parsed), 1 + first.stats.iterations1);

    // a checkpoint written for another slice is refused
    auto other = task;
    other.slice = {{"b1", {0}}};
    EXPECT_THROW(enumerate_case(other), ConfigError);
    std::filesystem::remove(task.checkpoint);
}

TEST(Enumerate, EmptySliceGivesEmptyReport) {
    auto task = make_task("dege-5-2", QuadricKind::Dege, 5);
    task.slice = {{"b1", {}}};
    auto r = enumerate_case(task);
    EXPECT_TRUE(r.curves.empty());
    EXPECT_EQ(r.stats.iterations1, 0u);
    auto b = brute_force_enumerate(task.qcase, 5, find_template(task.qcase, 5, "dege2"), task.slice);
    EXPECT_TRUE(b.curves.empty());
}

TEST(Enumerate, ConfigurationErrors) {
    auto task = make_task("dege-5-2", QuadricKind::Dege, 5);
    auto bad = task;
    bad.slice = {{"a99", {0}}};
    EXPECT_THROW(enumerate_case(bad), ConfigError);
    bad = task;
    bad.q = 7;
    EXPECT_THROW(enumerate_case(bad), ConfigError);
    bad = task;
    bad.q = 3;
    EXPECT_THROW(enumerate_case(bad), ConfigError);
    bad = task;
    bad.qcase.kind = QuadricKind::N1;
    EXPECT_THROW(enumerate_case(bad), ConfigError);
}

TEST(Enumerate, BudgetRefusal) {
    QuadricCase c{QuadricKind::N1, 0};
    auto t = find_template(c, 11, "n1");
    Budgets b;
    b.brute_candidates = 1000;
    EXPECT_THROW(brute_force_enumerate(c, 11, t, {}, b), BudgetExceeded);
}

TEST(Enumerate, BudgetsFromEnvironment) {
    ::setenv("SSP4_BRUTE_BUDGET", "12345", 1);
    EXPECT_EQ(Budgets::from_env().brute_candidates, 12345);
    ::setenv("SSP4_BRUTE_BUDGET", "lots", 1);
    EXPECT_THROW(Budgets::from_env(), ConfigError);
    ::unsetenv("SSP4_BRUTE_BUDGET");
    EXPECT_EQ(Budgets::from_env().brute_candidates, Budgets{}.brute_candidates);
}

TEST(Enumerate, ReportRoundTripCarriesMetadata) {
    auto task = make_task("dege-5-2", QuadricKind::Dege, 5);
    auto r = enumerate_case(task);
    auto j = to_json(r);
    EXPECT_EQ(j.at("metadata").at("zeta"), 2);
    EXPECT_EQ(j.at("metadata").at("code_version"), code_version);
    EXPECT_EQ(j.at("metadata").at("preset_version"), presets().version);
    auto back = report_from_json(j);
    EXPECT_EQ(cubics(back), cubics(r));
    EXPECT_EQ(back.stats.iterations2, r.stats.iterations2);
}

TEST(Enumerate, MergeRejectsOverlap) {
    auto task = make_task("dege-5-2", QuadricKind::Dege, 5);
    auto r = enumerate_case(task);
    ASSERT_FALSE(r.curves.empty());
    EXPECT_THROW(merge_reports({r, r}), std::logic_error);
}
