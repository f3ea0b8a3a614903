#include "groundctl/exec.hpp"

namespace groundctl::exec {

namespace {

void apply(const EffectSpec& effect, const std::string& input, State& state) {
    for (const auto& m : effect.mutations) {
        if (m.op == Mutation::Op::set) {
            state[m.key] = m.from_input ? StateValue(input) : m.value;
            continue;
        }
        std::int64_t current = 0;
        const auto it = state.find(m.key);
        if (it != state.end()) {
            if (const auto* i = std::get_if<std::int64_t>(&it->second)) current = *i;
        }
        state[m.key] = current + std::get<std::int64_t>(m.value);
    }
}

bool goal_holds(const Goal& g, const Fixture& fx, const State& state, const std::string& page) {
    if (g.kind == Goal::Kind::state) {
        const auto it = state.find(g.key);
        return it != state.end() && it->second == g.equals;
    }
    if (page != g.page) return false;
    return dom::resolve(fx.index(), page, g.locator).kind() == dom::ResolveResult::Kind::unique;
}

std::string initial_page(const Fixture& fx, const std::optional<std::string>& start_page) {
    const std::string page = start_page.value_or(fx.manifest().start_page);
    if (!fx.manifest().pages.count(page)) throw ConfigError("unknown start page '" + page + "'");
    return page;
}

}  // namespace

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::resolved: return "resolved";
        case Outcome::not_found: return "not_found";
        case Outcome::ambiguous: return "ambiguous";
        case Outcome::timeout: return "timeout";
        case Outcome::state_mismatch: return "state_mismatch";
    }
    return "?";
}

std::optional<Outcome> ExecutionTrace::failure() const {
    for (const auto& s : steps) {
        if (s.outcome != Outcome::resolved) return s.outcome;
    }
    return std::nullopt;
}

ExecutionTrace execute(const gen::ActionScript& script, const Fixture& fx, const ScenarioSpec* scenario,
                       std::optional<std::string> start_page) {
    ExecutionTrace trace;
    std::string page = initial_page(fx, start_page);
    State state = fx.manifest().initial_state;
    bool failed = false;

    for (std::size_t i = 0; i < script.steps.size() && !failed; ++i) {
        const auto& step = script.steps[i];
        StepTrace st;
        st.step_index = i;
        st.line_no = step.line_no;
        st.action = step.action;
        st.page = page;

        if (step.action == gen::Action::navigate) {
            if (fx.manifest().pages.count(step.page)) {
                page = step.page;
            } else {
                st.outcome = Outcome::not_found;
                st.detail = "unknown page '" + step.page + "'";
            }
        } else if (step.action == gen::Action::assert_state) {
            const auto it = state.find(step.key);
            if (it == state.end() || it->second != step.expected) {
                st.outcome = Outcome::state_mismatch;
                st.detail = step.key + " is " + (it == state.end() ? "unset" : gen::to_string(it->second)) +
                            ", expected " + gen::to_string(step.expected);
            }
        } else {
            const auto r = dom::resolve(fx.index(), page, step.locator);
            switch (r.kind()) {
                case dom::ResolveResult::Kind::none:
                    if (step.action == gen::Action::wait_for && fx.is_dynamic(page, step.locator)) {
                        st.outcome = Outcome::timeout;
                        st.detail = "element never appeared within " + std::to_string(step.timeout_ms) + " ms";
                    } else {
                        st.outcome = Outcome::not_found;
                        st.detail = "no element matches " + gen::render_locator(step.locator) + " on " + page;
                    }
                    break;
                case dom::ResolveResult::Kind::ambiguous:
                    st.outcome = Outcome::ambiguous;
                    st.detail = std::to_string(r.count()) + " elements match " + gen::render_locator(step.locator);
                    break;
                case dom::ResolveResult::Kind::unique: {
                    const std::string uid = r.matches.front()->element_uid;
                    st.element_uid = uid;
                    if (step.action == gen::Action::click) {
                        for (const auto* e : fx.effects_for(page, uid, EffectSpec::Trigger::click)) apply(*e, "", state);
                        if (const auto to = fx.transition_for(page, uid)) page = *to;
                    } else if (step.action == gen::Action::type_text) {
                        for (const auto* e : fx.effects_for(page, uid, EffectSpec::Trigger::type))
                            apply(*e, step.text, state);
                    }
                    break;
                }
            }
        }
        failed = st.outcome != Outcome::resolved;
        trace.steps.push_back(std::move(st));
    }

    trace.completed = !failed;
    trace.final_state = std::move(state);
    trace.final_page = page;
    trace.goal_met = true;
    if (scenario) {
        for (const auto& g : scenario->goals) {
            if (!goal_holds(g, fx, trace.final_state, page)) {
                trace.goal_met = false;
                trace.unmet_goals.push_back(g.describe());
            }
        }
    }
    return trace;
}

std::optional<double> ResolutionStats::rate() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(matched) / static_cast<double>(total);
}

ResolutionStats resolution_stats(const gen::ActionScript& script, const Fixture& fx,
                                 std::optional<std::string> start_page) {
    ResolutionStats stats;
    std::string page = initial_page(fx, start_page);
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const auto& step = script.steps[i];
        if (step.action == gen::Action::navigate) {
            if (fx.manifest().pages.count(step.page)) page = step.page;
            continue;
        }
        if (!step.has_locator()) continue;
        const auto r = dom::resolve(fx.index(), page, step.locator);
        LocatorCheck c{i, step.line_no, page, step.locator, r.kind(), r.count()};
        ++stats.total;
        if (r.kind() == dom::ResolveResult::Kind::unique) {
            ++stats.matched;
            if (step.action == gen::Action::click) {
                if (const auto to = fx.transition_for(page, r.matches.front()->element_uid)) page = *to;
            }
        }
        stats.checks.push_back(std::move(c));
    }
    return stats;
}

}  // namespace groundctl::exec
