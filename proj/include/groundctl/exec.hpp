#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "groundctl/dom.hpp"
#include "groundctl/script.hpp"

namespace groundctl::exec {

using gen::StateValue;
using State = std::map<std::string, StateValue>;

inline constexpr int kManifestSchemaVersion = 1;

struct Mutation {
    enum class Op { add, set };
    std::string key;
    Op op = Op::set;
    StateValue value;
    bool from_input = false;  // "$value": the text typed by the triggering step
};

struct EffectSpec {
    enum class Trigger { click, type };
    std::string page;
    dom::Locator element;
    Trigger on = Trigger::click;
    std::vector<Mutation> mutations;
};

struct TransitionSpec {
    std::string page;
    dom::Locator element;
    std::string to;
};

// Present in the running app but absent from the static snapshot.
struct DynamicElement {
    std::string page;
    std::string id;
};

struct Goal {
    enum class Kind { state, present };
    Kind kind = Kind::state;
    std::string key;  // state
    StateValue equals;
    std::string page;  // present
    dom::Locator locator;

    std::string describe() const;
};

struct ScenarioSpec {
    std::string id;
    std::string query;
    std::vector<Goal> goals;
};

struct FixtureManifest {
    int schema_version = kManifestSchemaVersion;
    std::string name;
    std::filesystem::path root;  // directory the relative paths hang off
    std::string start_page;
    std::map<std::string, std::string> pages;  // page_id -> html file
    std::vector<std::string> documents;        // extra corpus files
    State initial_state;
    std::vector<TransitionSpec> transitions;
    std::vector<EffectSpec> effects;
    std::vector<DynamicElement> dynamic_elements;
    std::vector<ScenarioSpec> scenarios;

    // Throws ParseError for malformed JSON and ConfigError for schema violations.
    static FixtureManifest parse(std::string_view json_text, const std::filesystem::path& root);
    static FixtureManifest load(const std::filesystem::path& manifest_file);

    const ScenarioSpec* scenario(std::string_view id) const;
    // Every page and document file, relative to root.
    std::vector<std::filesystem::path> corpus_files() const;
};

// A manifest bound to the static DOM of its pages.
class Fixture {
public:
    Fixture(FixtureManifest manifest, dom::DomIndex index);
    // Reads the manifest and its pages from disk.
    static Fixture load(const std::filesystem::path& manifest_file);

    const FixtureManifest& manifest() const { return manifest_; }
    const dom::DomIndex& index() const { return index_; }

    bool is_dynamic(std::string_view page, const dom::Locator& loc) const;
    std::vector<const EffectSpec*> effects_for(std::string_view page, std::string_view element_uid,
                                               EffectSpec::Trigger on) const;
    std::optional<std::string> transition_for(std::string_view page, std::string_view element_uid) const;

    // Manifest selectors that did not resolve to exactly one element. They are
    // kept inert so a page edit never turns into a load failure.
    const std::vector<std::string>& unbound() const { return unbound_; }

    // Start page for a query: its intent page hint when that page exists.
    std::string start_page_for(std::string_view query) const;

private:
    FixtureManifest manifest_;
    dom::DomIndex index_;
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> effects_by_uid_;
    std::map<std::pair<std::string, std::string>, std::string> transitions_by_uid_;
    std::set<std::pair<std::string, std::string>> dynamic_;
    std::vector<std::string> unbound_;
};

enum class Outcome { resolved, not_found, ambiguous, timeout, state_mismatch };
std::string to_string(Outcome o);

struct StepTrace {
    std::size_t step_index = 0;
    std::size_t line_no = 0;
    gen::Action action = gen::Action::navigate;
    std::string page;  // page the step ran on
    Outcome outcome = Outcome::resolved;
    std::optional<std::string> element_uid;
    std::string detail;
};

struct ExecutionTrace {
    std::vector<StepTrace> steps;  // executed steps; stops after the first failure
    State final_state;
    std::string final_page;
    bool completed = false;  // every step resolved
    bool goal_met = false;
    std::vector<std::string> unmet_goals;

    bool success() const { return completed && goal_met; }
    std::optional<Outcome> failure() const;
};

// Throws ConfigError when the start page is unknown.
ExecutionTrace execute(const gen::ActionScript& script, const Fixture& fixture,
                       const ScenarioSpec* scenario = nullptr, std::optional<std::string> start_page = {});

struct LocatorCheck {
    std::size_t step_index = 0;
    std::size_t line_no = 0;
    std::string page;
    dom::Locator locator;
    dom::ResolveResult::Kind kind = dom::ResolveResult::Kind::none;
    std::size_t matches = 0;
};

struct ResolutionStats {
    std::size_t matched = 0;  // M
    std::size_t total = 0;    // N
    std::vector<LocatorCheck> checks;

    std::optional<double> rate() const;  // absent when N = 0
};

// Resolves every locator-bearing step along the page sequence the script
// would follow, without stopping at failures.
ResolutionStats resolution_stats(const gen::ActionScript& script, const Fixture& fixture,
                                 std::optional<std::string> start_page = {});

}  // namespace groundctl::exec
