#include <fstream>
#include <sstream>

#include <json.hpp>

#include "groundctl/exec.hpp"
#include "groundctl/ingest.hpp"
#include "groundctl/rag.hpp"

namespace groundctl::exec {

using nlohmann::json;

namespace {

StateValue state_value(const json& j, const std::string& where) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) return j.get<std::string>();
    throw ConfigError(where + ": state values must be integers or strings");
}

dom::Locator locator(const json& j, const std::string& where) {
    if (!j.is_string()) throw ConfigError(where + ": selector must be a string");
    try {
        return gen::parse_locator(j.get<std::string>());
    } catch (const dom::InvalidSelector& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::string str(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string() || it->get<std::string>().empty())
        throw ConfigError(where + ": missing string field '" + key + "'");
    return it->get<std::string>();
}

const json& arr(const json& obj, const char* key) {
    static const json empty = json::array();
    const auto it = obj.find(key);
    if (it == obj.end()) return empty;
    if (!it->is_array()) throw ConfigError(std::string("manifest field '") + key + "' must be an array");
    return *it;
}

Mutation parse_mutation(const json& m, const std::string& where) {
    Mutation mu;
    mu.key = str(m, "key", where);
    const bool has_add = m.contains("add");
    const bool has_set = m.contains("set");
    if (has_add == has_set) throw ConfigError(where + ": a mutation needs exactly one of 'add' or 'set'");
    if (has_add) {
        if (!m["add"].is_number_integer()) throw ConfigError(where + ": 'add' takes an integer");
        mu.op = Mutation::Op::add;
        mu.value = m["add"].get<std::int64_t>();
    } else {
        mu.op = Mutation::Op::set;
        if (m["set"].is_string() && m["set"].get<std::string>() == "$value") {
            mu.from_input = true;
            mu.value = std::string();
        } else {
            mu.value = state_value(m["set"], where);
        }
    }
    return mu;
}

}  // namespace

std::string Goal::describe() const {
    if (kind == Kind::state) return key + " == " + gen::to_string(equals);
    return gen::render_locator(locator) + " present on " + page;
}

FixtureManifest FixtureManifest::parse(std::string_view json_text, const std::filesystem::path& root) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("manifest: ") + e.what(), e.byte);
    }
    if (!j.is_object()) throw ConfigError("manifest must be a JSON object");

    FixtureManifest m;
    m.root = root;
    m.schema_version = j.value("schema_version", 0);
    if (m.schema_version != kManifestSchemaVersion)
        throw ConfigError("unsupported manifest schema_version " + std::to_string(m.schema_version));
    m.name = j.value("name", std::string());
    m.start_page = str(j, "start_page", "manifest");

    if (!j.contains("pages") || !j["pages"].is_object() || j["pages"].empty())
        throw ConfigError("manifest needs a non-empty 'pages' object");
    for (const auto& [page, file] : j["pages"].items()) {
        if (!file.is_string()) throw ConfigError("page " + page + ": file must be a string");
        m.pages.emplace(page, file.get<std::string>());
    }
    if (!m.pages.count(m.start_page)) throw ConfigError("start_page '" + m.start_page + "' is not a manifest page");

    for (const auto& d : arr(j, "documents")) {
        if (!d.is_string()) throw ConfigError("documents must be file names");
        m.documents.push_back(d.get<std::string>());
    }
    if (j.contains("initial_state")) {
        if (!j["initial_state"].is_object()) throw ConfigError("initial_state must be an object");
        for (const auto& [k, v] : j["initial_state"].items()) m.initial_state[k] = state_value(v, "initial_state");
    }

    const auto check_page = [&](const std::string& page, const std::string& where) {
        if (!m.pages.count(page)) throw ConfigError(where + ": unknown page '" + page + "'");
    };

    std::size_t n = 0;
    for (const auto& t : arr(j, "transitions")) {
        const std::string where = "transitions[" + std::to_string(n++) + "]";
        TransitionSpec spec{str(t, "page", where), locator(t.value("element", json()), where), str(t, "to", where)};
        check_page(spec.page, where);
        check_page(spec.to, where);
        m.transitions.push_back(std::move(spec));
    }

    n = 0;
    for (const auto& e : arr(j, "effects")) {
        const std::string where = "effects[" + std::to_string(n++) + "]";
        EffectSpec spec;
        spec.page = str(e, "page", where);
        check_page(spec.page, where);
        spec.element = locator(e.value("element", json()), where);
        const std::string on = e.value("on", std::string("click"));
        if (on == "click") {
            spec.on = EffectSpec::Trigger::click;
        } else if (on == "type") {
            spec.on = EffectSpec::Trigger::type;
        } else {
            throw ConfigError(where + ": 'on' must be click or type");
        }
        for (const auto& mu : arr(e, "mutations")) spec.mutations.push_back(parse_mutation(mu, where));
        for (const auto& mu : spec.mutations) {
            if (mu.from_input && spec.on != EffectSpec::Trigger::type)
                throw ConfigError(where + ": $value is only available to type effects");
        }
        m.effects.push_back(std::move(spec));
    }

    n = 0;
    for (const auto& d : arr(j, "dynamic_elements")) {
        const std::string where = "dynamic_elements[" + std::to_string(n++) + "]";
        DynamicElement de{str(d, "page", where), str(d, "id", where)};
        check_page(de.page, where);
        m.dynamic_elements.push_back(std::move(de));
    }

    n = 0;
    for (const auto& s : arr(j, "scenarios")) {
        const std::string where = "scenarios[" + std::to_string(n++) + "]";
        ScenarioSpec spec;
        if (s.contains("id") && s["id"].is_number_integer()) {
            spec.id = std::to_string(s["id"].get<std::int64_t>());
        } else {
            spec.id = str(s, "id", where);
        }
        spec.query = str(s, "query", where);
        for (const auto& g : arr(s, "goals")) {
            Goal goal;
            if (g.contains("state")) {
                goal.kind = Goal::Kind::state;
                goal.key = str(g, "state", where);
                if (!g.contains("equals")) throw ConfigError(where + ": state goal needs 'equals'");
                goal.equals = state_value(g["equals"], where);
            } else if (g.contains("present")) {
                goal.kind = Goal::Kind::present;
                goal.page = str(g, "page", where);
                check_page(goal.page, where);
                goal.locator = locator(g["present"], where);
            } else {
                throw ConfigError(where + ": goal needs 'state' or 'present'");
            }
            spec.goals.push_back(std::move(goal));
        }
        if (m.scenario(spec.id)) throw ConfigError(where + ": duplicate scenario id " + spec.id);
        m.scenarios.push_back(std::move(spec));
    }
    return m;
}

FixtureManifest FixtureManifest::load(const std::filesystem::path& manifest_file) {
    std::ifstream in(manifest_file, std::ios::binary);
    if (!in) throw ConfigError("cannot read manifest " + manifest_file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), manifest_file.parent_path());
}

const ScenarioSpec* FixtureManifest::scenario(std::string_view id) const {
    for (const auto& s : scenarios) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

std::vector<std::filesystem::path> FixtureManifest::corpus_files() const {
    std::vector<std::filesystem::path> out;
    for (const auto& [page, file] : pages) out.emplace_back(file);
    for (const auto& d : documents) out.emplace_back(d);
    return out;
}

Fixture::Fixture(FixtureManifest manifest, dom::DomIndex index)
    : manifest_(std::move(manifest)), index_(std::move(index)) {
    for (const auto& [page, file] : manifest_.pages) {
        if (!index_.has_page(page)) throw ConfigError("manifest page '" + page + "' has no DOM");
    }

    const auto bind = [&](const std::string& page, const dom::Locator& loc,
                          const std::string& what) -> std::optional<std::string> {
        const auto r = dom::resolve(index_, page, loc);
        if (r.kind() == dom::ResolveResult::Kind::unique) return r.matches.front()->element_uid;
        unbound_.push_back(what + " " + gen::render_locator(loc) + " on " + page + " (" + dom::to_string(r.kind()) +
                           ")");
        return std::nullopt;
    };

    for (std::size_t i = 0; i < manifest_.effects.size(); ++i) {
        const auto& e = manifest_.effects[i];
        if (const auto uid = bind(e.page, e.element, "effect")) effects_by_uid_[{e.page, *uid}].push_back(i);
    }
    for (const auto& t : manifest_.transitions) {
        if (const auto uid = bind(t.page, t.element, "transition")) transitions_by_uid_[{t.page, *uid}] = t.to;
    }
    for (const auto& d : manifest_.dynamic_elements) dynamic_.emplace(d.page, d.id);
}

Fixture Fixture::load(const std::filesystem::path& manifest_file) {
    auto manifest = FixtureManifest::load(manifest_file);
    std::map<std::string, std::vector<dom::DomElement>> pages;
    for (const auto& [page, file] : manifest.pages) {
        const auto doc = ingest::load_source(manifest.root / file);
        if (doc.source_type != ingest::SourceType::html) throw ConfigError("page " + page + " is not an html file");
        pages.emplace(page, dom::clean_html(doc.raw_bytes).elements);
    }
    auto index = dom::DomIndex::build(std::move(pages));
    return Fixture(std::move(manifest), std::move(index));
}

bool Fixture::is_dynamic(std::string_view page, const dom::Locator& loc) const {
    std::optional<std::string> id;
    if (loc.strategy == dom::LocatorStrategy::by_id) {
        id = loc.value;
    } else if (loc.strategy == dom::LocatorStrategy::by_css) {
        try {
            id = dom::parse_selector(loc.value).subject.id;
        } catch (const dom::InvalidSelector&) {
            return false;
        }
    }
    return id && dynamic_.count({std::string(page), *id});
}

std::vector<const EffectSpec*> Fixture::effects_for(std::string_view page, std::string_view element_uid,
                                                    EffectSpec::Trigger on) const {
    std::vector<const EffectSpec*> out;
    const auto it = effects_by_uid_.find({std::string(page), std::string(element_uid)});
    if (it == effects_by_uid_.end()) return out;
    for (std::size_t i : it->second) {
        if (manifest_.effects[i].on == on) out.push_back(&manifest_.effects[i]);
    }
    return out;
}

std::optional<std::string> Fixture::transition_for(std::string_view page, std::string_view element_uid) const {
    const auto it = transitions_by_uid_.find({std::string(page), std::string(element_uid)});
    if (it == transitions_by_uid_.end()) return std::nullopt;
    return it->second;
}

std::string Fixture::start_page_for(std::string_view query) const {
    const auto hint = rag::extract_intent(query).page_hint;
    if (hint && manifest_.pages.count(*hint)) return *hint;
    return manifest_.start_page;
}

}  // namespace groundctl::exec
