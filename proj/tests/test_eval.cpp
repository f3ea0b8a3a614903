#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "groundctl/eval.hpp"
#include "stats_oracle.hpp"
#include "support.hpp"

using namespace groundctl;
using eval::Arm;
using eval::Metric;

namespace {

stats_oracle::Result oracle(const std::vector<double>& a, const std::vector<double>& b) {
    return stats_oracle::welch_cohen(a, b);
}

eval::EvalRecord rec(std::uint64_t seed, Arm arm, std::string sid, bool syntax, std::size_t m, std::size_t n,
                     bool success) {
    eval::EvalRecord r;
    r.seed = seed;
    r.arm = arm;
    r.scenario_id = std::move(sid);
    r.syntax_valid = syntax;
    r.resolved = m;
    r.locators = n;
    r.execution_success = success;
    if (!success) r.failure_mode = syntax ? eval::FailureMode::hallucination : eval::FailureMode::syntax;
    return r;
}

struct Env {
    embed::LocalEmbedder embedder;
    store::VectorStore store = testsupport::fixture_store(embedder);
    exec::Fixture fixture = exec::Fixture::load(testsupport::manifest_path());
};

const Env& env() {
    static const Env e;
    return e;
}

class FailingGenerator : public gen::Generator {
public:
    gen::GeneratorKind kind() const override { return gen::GeneratorKind::remote_llm; }
    std::string generate(std::string_view) const override { throw ProviderError("down", true, 503); }
};

}  // namespace

TEST_CASE("basic statistics") {
    CHECK(stats::mean({1, 2, 3, 4}) == 2.5);
    CHECK(*stats::sample_std({2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-15));
    CHECK_FALSE(stats::sample_std({1}));
    CHECK(stats::incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(stats::incomplete_beta(2, 3, 0) == 0.0);
    CHECK(stats::incomplete_beta(2, 3, 1) == 1.0);
    // I_x(a, 1) = x^a
    CHECK(std::abs(stats::incomplete_beta(3.5, 1, 0.6) - std::pow(0.6, 3.5)) < 1e-12);
}

TEST_CASE("welch and cohen against the oracle") {
    const std::vector<double> a{40, 41, 39}, b{95, 94, 96};
    const auto w = stats::welch_t_test(a, b);
    const auto o = oracle(a, b);
    REQUIRE(w);
    CHECK(std::abs(w->t - o.t) <= 1e-9);
    CHECK(std::abs(*w->df - o.df) <= 1e-9);
    CHECK(std::abs(w->p - o.p) <= 1e-9);
    CHECK(std::abs(*stats::cohens_d(a, b) - o.d) <= 1e-9);

    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        std::uniform_int_distribution<int> size(2, 12);
        std::normal_distribution<double> noise(0, 1);
        std::vector<double> x(size(rng)), y(size(rng));
        const double shift = std::uniform_real_distribution<double>(-3, 3)(rng);
        const double sx = std::uniform_real_distribution<double>(0.2, 20)(rng);
        for (auto& v : x) v = 50 + sx * noise(rng);
        for (auto& v : y) v = 50 + shift + noise(rng);
        const auto got = stats::welch_t_test(x, y);
        const auto want = oracle(x, y);
        REQUIRE(got);
        CHECK(std::abs(got->t - want.t) <= 1e-9);
        CHECK(std::abs(got->p - want.p) <= 1e-9);
        CHECK(std::abs(*stats::cohens_d(x, y) - want.d) <= 1e-9);

        // Antisymmetry, and scale invariance of the standardized statistics.
        const auto swapped = stats::welch_t_test(y, x);
        CHECK(std::abs(swapped->t + got->t) <= 1e-12);
        CHECK(std::abs(swapped->p - got->p) <= 1e-12);
        std::vector<double> x3 = x, y3 = y;
        for (auto& v : x3) v *= 3.7;
        for (auto& v : y3) v *= 3.7;
        CHECK(std::abs(stats::welch_t_test(x3, y3)->t - got->t) <= 1e-9);
        CHECK(std::abs(stats::welch_t_test(x3, y3)->p - got->p) <= 1e-9);
        CHECK(std::abs(*stats::cohens_d(x3, y3) - *stats::cohens_d(x, y)) <= 1e-9);
        const double diff = stats::mean(x) - stats::mean(y);
        CHECK((*stats::cohens_d(x, y) > 0) == (diff > 0));
    }
}

TEST_CASE("degenerate samples") {
    const auto eq = stats::welch_t_test({5, 6, 7}, {5, 6, 7});
    REQUIRE(eq);
    CHECK(eq->t == 0.0);
    CHECK(eq->p == 1.0);
    CHECK(*stats::cohens_d({5, 6, 7}, {5, 6, 7}) == 0.0);

    const auto flat = stats::welch_t_test({3, 3, 3}, {3, 3, 3});
    CHECK(flat->t == 0.0);
    CHECK(flat->p == 1.0);
    CHECK_FALSE(flat->df);
    CHECK(*stats::cohens_d({3, 3, 3}, {3, 3, 3}) == 0.0);

    const auto apart = stats::welch_t_test({9, 9, 9}, {3, 3, 3});
    CHECK(std::isinf(apart->t));
    CHECK(apart->t > 0);
    CHECK(apart->p == 0.0);
    CHECK_FALSE(stats::cohens_d({9, 9, 9}, {3, 3, 3}));

    CHECK_FALSE(stats::welch_t_test({1}, {1, 2}));
    CHECK_FALSE(stats::cohens_d({1, 2}, {2}));
}

TEST_CASE("resolution rate of a record") {
    auto r = rec(1, Arm::grounded, "1", true, 3, 4, false);
    CHECK(r.resolution_rate() == 0.75);
    r.locators = 0;
    r.resolved = 0;
    CHECK_FALSE(r.resolution_rate());
    r.syntax_valid = false;
    CHECK(r.resolution_rate() == 0.0);
}

TEST_CASE("summarize aggregates per seed first") {
    std::vector<eval::EvalRecord> rs;
    // Seed 1: grounded 2/2 succeed; seed 2: 1/2. Ungrounded all fail.
    rs.push_back(rec(1, Arm::grounded, "1", true, 2, 2, true));
    rs.push_back(rec(1, Arm::grounded, "2", true, 2, 2, true));
    rs.push_back(rec(2, Arm::grounded, "1", true, 2, 2, true));
    rs.push_back(rec(2, Arm::grounded, "2", true, 1, 2, false));
    rs.push_back(rec(1, Arm::ungrounded, "1", true, 0, 2, false));
    rs.push_back(rec(1, Arm::ungrounded, "2", false, 0, 0, false));
    rs.push_back(rec(2, Arm::ungrounded, "1", true, 1, 2, false));
    rs.push_back(rec(2, Arm::ungrounded, "2", true, 0, 2, false));
    auto inc = rec(2, Arm::ungrounded, "3", false, 0, 0, false);
    inc.incomplete = true;
    inc.failure_mode.reset();
    rs.push_back(inc);

    const auto s = eval::summarize(rs);
    CHECK(s.seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(s.scenarios == 3);
    REQUIRE(s.arms.size() == 2);
    const auto* g = s.arm(Arm::grounded);
    REQUIRE(g);
    CHECK(g->metrics.at(Metric::execution_success).runs == std::vector<double>{100, 50});
    CHECK(g->metrics.at(Metric::execution_success).mean == 75);
    CHECK(*g->metrics.at(Metric::execution_success).std == doctest::Approx(std::sqrt(1250.0)));
    CHECK(g->metrics.at(Metric::element_resolution).runs == std::vector<double>{100, 75});

    const auto* u = s.arm(Arm::ungrounded);
    CHECK(u->incomplete == 1);
    CHECK(u->records == 5);
    CHECK(u->metrics.at(Metric::syntax_validity).runs == std::vector<double>{50, 100});
    CHECK(u->metrics.at(Metric::element_resolution).runs == std::vector<double>{0, 25});
    CHECK(u->failures.at(eval::FailureMode::syntax) == 1);

    REQUIRE(s.comparisons.size() == 3);
    for (const auto& c : s.comparisons) {
        const auto& x = g->metrics.at(c.metric).runs;
        const auto& y = u->metrics.at(c.metric).runs;
        const auto o = oracle(x, y);
        REQUIRE(c.welch);
        CHECK(std::abs(c.welch->t - o.t) <= 1e-9);
        CHECK(std::abs(c.welch->p - o.p) <= 1e-9);
    }
}

TEST_CASE("identical runs give zero spread") {
    std::vector<eval::EvalRecord> rs;
    for (std::uint64_t seed : {1, 2, 3}) {
        rs.push_back(rec(seed, Arm::grounded, "1", true, 2, 2, true));
        rs.push_back(rec(seed, Arm::grounded, "2", true, 1, 2, false));
    }
    const auto s = eval::summarize(rs);
    for (auto m : eval::kMetrics) CHECK(*s.arm(Arm::grounded)->metrics.at(m).std == 0.0);
}

TEST_CASE("markdown and json reports") {
    std::vector<eval::EvalRecord> rs;
    for (std::uint64_t seed : {42, 123}) {
        for (auto arm : {Arm::grounded, Arm::ungrounded}) {
            rs.push_back(rec(seed, arm, "1", true, arm == Arm::grounded ? 2 : seed % 2, 2, arm == Arm::grounded));
        }
    }
    const auto s = eval::summarize(rs);
    const auto md = eval::render_markdown(s);
    CHECK(md.find("| Metric | grounded | ungrounded |") != std::string::npos);
    CHECK(md.find("| Element Resolution (%) |") != std::string::npos);
    CHECK(md.find("## Ablation") == std::string::npos);

    const auto j = eval::to_json(s);
    const auto back = eval::summary_from_json(nlohmann::json::parse(j.dump()));
    CHECK(eval::render_markdown(back) == md);
    CHECK(eval::to_json(back) == j);
    CHECK_THROWS_AS(eval::summary_from_json(nlohmann::json::parse(R"({"seeds": "x"})")), ParseError);
}

TEST_CASE("suite over the fixture") {
    eval::SuiteConfig cfg;
    cfg.arms = {Arm::grounded, Arm::ungrounded, Arm::text_only, Arm::html_only};
    std::size_t last_done = 0, calls = 0;
    const auto records = eval::run_suite(env().store, env().embedder, env().fixture, cfg, gen::make_generator,
                                         [&](std::size_t done, std::size_t total) {
                                             CHECK(done > last_done);
                                             CHECK(total == 240);
                                             last_done = done;
                                             ++calls;
                                         });
    CHECK(records.size() == 240);
    CHECK(calls == 240);

    // Ordered by seed, then arm, then scenario.
    CHECK(records.front().seed == 42);
    CHECK(records.front().arm == Arm::grounded);
    CHECK(records.front().scenario_id == "1");
    CHECK(records[20].arm == Arm::ungrounded);
    CHECK(records[80].seed == 123);

    for (const auto& r : records) {
        CHECK(r.failure_mode.has_value() == !r.execution_success);
        if (r.execution_success) CHECK(r.resolution_rate() == 1.0);
        if (r.arm == Arm::ungrounded && r.failure_mode == eval::FailureMode::hallucination) {
            CHECK(std::find(r.step_outcomes.begin(), r.step_outcomes.end(), "not_found") != r.step_outcomes.end());
        }
    }

    const auto s = eval::summarize(records);
    for (const auto& a : s.arms) {
        CHECK(a.metrics.at(Metric::execution_success).mean <= a.metrics.at(Metric::element_resolution).mean);
    }
    const auto md = eval::render_markdown(s);
    for (const char* row : {"| Text-Only RAG |", "| HTML-Only RAG |", "| Full RAG (Text + HTML) |"})
        CHECK(md.find(row) != std::string::npos);

    eval::SuiteConfig one;
    one.arms = {Arm::grounded};
    one.scenario_ids = {"1", "8"};
    one.seeds = {7};
    one.workers = 3;
    const auto few = eval::run_suite(env().store, env().embedder, env().fixture, one);
    REQUIRE(few.size() == 2);
    CHECK(few[1].scenario_id == "8");
    CHECK(few[0].execution_success);
}

TEST_CASE("provider failures become incomplete records") {
    eval::SuiteConfig cfg;
    cfg.arms = {Arm::remote};
    cfg.seeds = {1};
    cfg.scenario_ids = {"1", "2"};
    const auto rs = eval::run_suite(env().store, env().embedder, env().fixture, cfg,
                                    [](gen::GeneratorKind) { return std::make_unique<FailingGenerator>(); });
    REQUIRE(rs.size() == 2);
    for (const auto& r : rs) {
        CHECK(r.incomplete);
        CHECK(r.error.find("down") != std::string::npos);
    }
    const auto s = eval::summarize(rs);
    CHECK(s.arm(Arm::remote)->incomplete == 2);
}

TEST_CASE("write_reports") {
    eval::SuiteConfig cfg;
    cfg.arms = {Arm::grounded, Arm::ungrounded};
    cfg.scenario_ids = {"1", "2", "3"};
    const auto rs = eval::run_suite(env().store, env().embedder, env().fixture, cfg);
    testsupport::TempDir dir;
    const auto files = eval::write_reports(dir.path / "out", rs, eval::summarize(rs));
    REQUIRE(files.size() == 3);
    for (const auto& f : files) CHECK(std::filesystem::exists(f));
    std::ifstream in(dir.path / "out" / "raw_records.jsonl");
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) {
        const auto j = nlohmann::json::parse(l);
        CHECK(j.contains("scenario_id"));
        ++lines;
    }
    CHECK(lines == rs.size());
    const auto summary = eval::summary_from_json(nlohmann::json::parse(testsupport::slurp(dir.path / "out" / "report.json")));
    CHECK(summary.arms.size() == 2);
}
