#include "groundctl/api.hpp"

namespace groundctl::api {

namespace {

json state_value(const gen::StateValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    return std::get<std::string>(v);
}

json locator(const dom::Locator& l) {
    return {{"strategy", dom::to_string(l.strategy)}, {"value", l.value}, {"token", gen::render_locator(l)}};
}

}  // namespace

json state_to_json(const exec::State& s) {
    json j = json::object();
    for (const auto& [k, v] : s) j[k] = state_value(v);
    return j;
}

json to_json(const gen::ActionStep& s) {
    json j{{"action", gen::to_string(s.action)}, {"line", s.line_no}, {"text", gen::render_step(s)}};
    switch (s.action) {
        case gen::Action::navigate: j["page"] = s.page; break;
        case gen::Action::type_text: j["value"] = s.text; [[fallthrough]];
        case gen::Action::click:
        case gen::Action::assert_present: j["locator"] = locator(s.locator); break;
        case gen::Action::wait_for:
            j["locator"] = locator(s.locator);
            j["timeout_ms"] = s.timeout_ms;
            break;
        case gen::Action::assert_state:
            j["key"] = s.key;
            j["expected"] = state_value(s.expected);
            break;
    }
    return j;
}

json to_json(const exec::ExecutionTrace& t) {
    json steps = json::array();
    for (const auto& s : t.steps) {
        json js{{"step_index", s.step_index},
                {"line", s.line_no},
                {"action", gen::to_string(s.action)},
                {"page", s.page},
                {"outcome", exec::to_string(s.outcome)},
                {"element_uid", s.element_uid ? json(*s.element_uid) : json(nullptr)}};
        if (!s.detail.empty()) js["detail"] = s.detail;
        steps.push_back(std::move(js));
    }
    const auto failure = t.failure();
    return {{"steps", std::move(steps)},
            {"final_page", t.final_page},
            {"final_state", state_to_json(t.final_state)},
            {"completed", t.completed},
            {"goal_met", t.goal_met},
            {"unmet_goals", t.unmet_goals},
            {"success", t.success()},
            {"failure", failure ? json(exec::to_string(*failure)) : json(nullptr)}};
}

json to_json(const exec::ResolutionStats& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"step_index", c.step_index},
                          {"line", c.line_no},
                          {"page", c.page},
                          {"locator", locator(c.locator)},
                          {"resolution", dom::to_string(c.kind)},
                          {"matches", c.matches}});
    }
    const auto rate = r.rate();
    return {{"matched", r.matched},
            {"total", r.total},
            {"rate", rate ? json(*rate) : json(nullptr)},
            {"checks", std::move(checks)}};
}

json to_json(const rag::RetrievedContext& c) {
    json chunks = json::array();
    for (const auto* ch : c.ranked()) {
        chunks.push_back({{"chunk_id", ch->chunk_id},
                          {"source_id", ch->source_id},
                          {"source_type", ingest::to_string(ch->source_type)},
                          {"score", ch->score},
                          {"rank", ch->rank},
                          {"backfilled", ch->backfilled}});
    }
    return {{"query", c.query}, {"candidates", c.candidates}, {"chunks", std::move(chunks)}};
}

json to_json(const dom::IdCollision& c) {
    return {{"page", c.page_id}, {"id", c.id}, {"element_uids", c.element_uids}};
}

}  // namespace groundctl::api
