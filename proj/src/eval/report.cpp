#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "groundctl/eval.hpp"

namespace groundctl::eval {

using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string fmt_stat(double v, const char* f) {
    if (std::isnan(v)) return "n/a";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt(f, v);
}

std::string fmt_p(double p) {
    if (std::isnan(p)) return "n/a";
    if (p < 0.001) return "< 0.001";
    return fmt("%.3f", p);
}

std::string mean_std(const MetricStats& m) {
    if (m.runs.empty()) return "n/a";
    std::string s = fmt("%.1f", m.mean);
    if (m.std) s += " ± " + fmt("%.1f", *m.std);
    return s;
}

// Non-finite values travel as strings so the document stays valid JSON.
json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double num_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ParseError("expected a number, got " + j.dump(), 0);
}

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::optional<double> opt_num_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return num_from(j);
}

Metric metric_from_string(const std::string& s) {
    for (auto m : kMetrics) {
        if (to_string(m) == s) return m;
    }
    throw ParseError("unknown metric " + s, 0);
}

Arm arm_from(const std::string& s) {
    const auto a = pipeline::arm_from_string(s);
    if (!a) throw ParseError("unknown arm " + s, 0);
    return *a;
}

MetricStats finish(std::vector<double> runs) {
    MetricStats m;
    m.runs = std::move(runs);
    if (!m.runs.empty()) {
        m.mean = stats::mean(m.runs);
        m.std = stats::sample_std(m.runs);
    }
    return m;
}

}  // namespace

std::string display_name(Metric m) {
    switch (m) {
        case Metric::syntax_validity: return "Syntax Validity (%)";
        case Metric::element_resolution: return "Element Resolution (%)";
        case Metric::execution_success: return "Execution Success (%)";
    }
    return "?";
}

std::string to_string(Metric m) {
    switch (m) {
        case Metric::syntax_validity: return "syntax_validity";
        case Metric::element_resolution: return "element_resolution";
        case Metric::execution_success: return "execution_success";
    }
    return "?";
}

const ArmSummary* MetricsSummary::arm(Arm a) const {
    for (const auto& s : arms) {
        if (s.arm == a) return &s;
    }
    return nullptr;
}

MetricsSummary summarize(const std::vector<EvalRecord>& records) {
    MetricsSummary out;
    std::vector<Arm> arms;
    std::set<std::string> scenarios;
    for (const auto& r : records) {
        if (std::find(out.seeds.begin(), out.seeds.end(), r.seed) == out.seeds.end()) out.seeds.push_back(r.seed);
        if (std::find(arms.begin(), arms.end(), r.arm) == arms.end()) arms.push_back(r.arm);
        scenarios.insert(r.scenario_id);
    }
    out.scenarios = scenarios.size();

    for (Arm a : arms) {
        ArmSummary s;
        s.arm = a;
        std::map<Metric, std::vector<double>> runs;
        for (auto seed : out.seeds) {
            std::size_t n = 0, valid = 0, ok = 0;
            double rate_sum = 0.0;
            std::size_t rate_n = 0;
            for (const auto& r : records) {
                if (r.arm != a || r.seed != seed) continue;
                ++s.records;
                if (r.incomplete) {
                    ++s.incomplete;
                    continue;
                }
                ++n;
                valid += r.syntax_valid ? 1 : 0;
                ok += r.execution_success ? 1 : 0;
                if (const auto rate = r.resolution_rate()) {
                    rate_sum += *rate;
                    ++rate_n;
                }
                if (r.failure_mode) ++s.failures[*r.failure_mode];
            }
            if (n == 0) continue;
            runs[Metric::syntax_validity].push_back(100.0 * static_cast<double>(valid) / static_cast<double>(n));
            runs[Metric::execution_success].push_back(100.0 * static_cast<double>(ok) / static_cast<double>(n));
            if (rate_n > 0) runs[Metric::element_resolution].push_back(100.0 * rate_sum / static_cast<double>(rate_n));
        }
        for (auto m : kMetrics) s.metrics[m] = finish(runs[m]);
        out.arms.push_back(std::move(s));
    }

    for (std::size_t i = 0; i < out.arms.size(); ++i) {
        for (std::size_t j = i + 1; j < out.arms.size(); ++j) {
            for (auto m : kMetrics) {
                const auto& a = out.arms[i].metrics.at(m).runs;
                const auto& b = out.arms[j].metrics.at(m).runs;
                out.comparisons.push_back(
                    {out.arms[i].arm, out.arms[j].arm, m, stats::welch_t_test(a, b), stats::cohens_d(a, b)});
            }
        }
    }
    return out;
}

std::string render_markdown(const MetricsSummary& s) {
    std::string md = "# Evaluation report\n\n";
    std::string seeds;
    for (std::size_t i = 0; i < s.seeds.size(); ++i) seeds += (i ? ", " : "") + std::to_string(s.seeds[i]);
    md += "Seeds: " + seeds + ". Scenarios: " + std::to_string(s.scenarios) + ".\n\n";

    md += "## Main results\n\nMean ± std over seeds.\n\n| Metric |";
    for (const auto& a : s.arms) md += " " + pipeline::to_string(a.arm) + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < s.arms.size(); ++i) md += "---|";
    md += "\n";
    for (auto m : kMetrics) {
        md += "| " + display_name(m) + " |";
        for (const auto& a : s.arms) md += " " + mean_std(a.metrics.at(m)) + " |";
        md += "\n";
    }

    const auto* text = s.arm(Arm::text_only);
    const auto* html = s.arm(Arm::html_only);
    const auto* full = s.arm(Arm::grounded);
    if (text && html && full) {
        md += "\n## Ablation\n\n| Configuration |";
        for (auto m : kMetrics) md += " " + display_name(m) + " |";
        md += "\n|---|---|---|---|\n";
        for (const auto* a : {text, html, full}) {
            md += "| " + pipeline::display_name(a->arm) + " |";
            for (auto m : kMetrics) md += " " + mean_std(a->metrics.at(m)) + " |";
            md += "\n";
        }
    }

    if (!s.comparisons.empty()) {
        md += "\n## Statistical tests\n\nWelch's t-test (two-sided) and Cohen's d with pooled sd; a minus b.\n\n";
        md += "| Metric | a | b | t | df | p | Cohen's d |\n|---|---|---|---|---|---|---|\n";
        for (const auto& c : s.comparisons) {
            md += "| " + display_name(c.metric) + " | " + pipeline::to_string(c.a) + " | " + pipeline::to_string(c.b) +
                  " | ";
            if (c.welch) {
                md += fmt_stat(c.welch->t, "%.2f") + " | " +
                      (c.welch->df ? fmt_stat(*c.welch->df, "%.2f") : std::string("n/a")) + " | " +
                      fmt_p(c.welch->p);
            } else {
                md += "n/a | n/a | n/a";
            }
            md += " | " + (c.cohens_d ? fmt_stat(*c.cohens_d, "%.2f") : std::string("n/a")) + " |\n";
        }
    }

    md += "\n## Failure modes\n\n| Arm | records | incomplete |";
    const FailureMode modes[] = {FailureMode::syntax, FailureMode::hallucination, FailureMode::ambiguous,
                                 FailureMode::timeout, FailureMode::logic};
    for (auto f : modes) md += " " + to_string(f) + " |";
    md += "\n|---|---|---|---|---|---|---|---|\n";
    for (const auto& a : s.arms) {
        md += "| " + pipeline::to_string(a.arm) + " | " + std::to_string(a.records) + " | " +
              std::to_string(a.incomplete) + " |";
        for (auto f : modes) {
            const auto it = a.failures.find(f);
            md += " " + std::to_string(it == a.failures.end() ? 0 : it->second) + " |";
        }
        md += "\n";
    }
    return md;
}

json to_json(const MetricsSummary& s) {
    json j;
    j["seeds"] = s.seeds;
    j["scenarios"] = s.scenarios;
    j["arms"] = json::array();
    for (const auto& a : s.arms) {
        json ja;
        ja["arm"] = pipeline::to_string(a.arm);
        ja["display_name"] = pipeline::display_name(a.arm);
        ja["records"] = a.records;
        ja["incomplete"] = a.incomplete;
        for (const auto& [m, ms] : a.metrics) {
            json jm;
            jm["runs"] = json::array();
            for (double v : ms.runs) jm["runs"].push_back(num(v));
            jm["mean"] = num(ms.mean);
            jm["std"] = opt_num(ms.std);
            jm["n"] = ms.runs.size();
            ja["metrics"][to_string(m)] = jm;
        }
        ja["failures"] = json::object();
        for (const auto& [f, n] : a.failures) ja["failures"][to_string(f)] = n;
        j["arms"].push_back(ja);
    }
    j["comparisons"] = json::array();
    for (const auto& c : s.comparisons) {
        json jc;
        jc["a"] = pipeline::to_string(c.a);
        jc["b"] = pipeline::to_string(c.b);
        jc["metric"] = to_string(c.metric);
        if (c.welch) {
            jc["t"] = num(c.welch->t);
            jc["df"] = opt_num(c.welch->df);
            jc["p"] = num(c.welch->p);
        } else {
            jc["t"] = jc["df"] = jc["p"] = nullptr;
        }
        jc["cohens_d"] = opt_num(c.cohens_d);
        j["comparisons"].push_back(jc);
    }
    return j;
}

MetricsSummary summary_from_json(const json& j) {
    try {
        MetricsSummary s;
        s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        s.scenarios = j.at("scenarios").get<std::size_t>();
        for (const auto& ja : j.at("arms")) {
            ArmSummary a;
            a.arm = arm_from(ja.at("arm").get<std::string>());
            a.records = ja.at("records").get<std::size_t>();
            a.incomplete = ja.at("incomplete").get<std::size_t>();
            for (const auto& [name, jm] : ja.at("metrics").items()) {
                MetricStats ms;
                for (const auto& v : jm.at("runs")) ms.runs.push_back(num_from(v));
                ms.mean = num_from(jm.at("mean"));
                ms.std = opt_num_from(jm.at("std"));
                a.metrics[metric_from_string(name)] = ms;
            }
            for (const auto& [name, n] : ja.at("failures").items()) {
                const auto f = failure_mode_from_string(name);
                if (!f) throw ParseError("unknown failure mode " + name, 0);
                a.failures[*f] = n.get<std::size_t>();
            }
            s.arms.push_back(std::move(a));
        }
        for (const auto& jc : j.at("comparisons")) {
            Comparison c;
            c.a = arm_from(jc.at("a").get<std::string>());
            c.b = arm_from(jc.at("b").get<std::string>());
            c.metric = metric_from_string(jc.at("metric").get<std::string>());
            if (!jc.at("t").is_null()) {
                stats::WelchResult w;
                w.t = num_from(jc.at("t"));
                w.df = opt_num_from(jc.at("df"));
                w.p = num_from(jc.at("p"));
                c.welch = w;
            }
            c.cohens_d = opt_num_from(jc.at("cohens_d"));
            s.comparisons.push_back(c);
        }
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("report json: ") + e.what(), 0);
    }
}

std::vector<std::filesystem::path> write_reports(const std::filesystem::path& dir, const std::vector<EvalRecord>& records,
                                                 const MetricsSummary& summary) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

    const std::vector<std::filesystem::path> paths{dir / "report.md", dir / "report.json", dir / "raw_records.jsonl"};
    const auto write = [](const std::filesystem::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) throw Error("cannot write " + p.string());
    };
    write(paths[0], render_markdown(summary));
    write(paths[1], to_json(summary).dump(2) + "\n");
    std::string lines;
    for (const auto& r : records) lines += to_json(r).dump() + "\n";
    write(paths[2], lines);
    return paths;
}

}  // namespace groundctl::eval
