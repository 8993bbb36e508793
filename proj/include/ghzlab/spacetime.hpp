#pragma once

#include "json.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ghzlab::spacetime {

struct Site {
    std::string id;
    std::array<double, 3> position; // meters, single lab frame
};

enum class EventKind : std::uint8_t {
    ChoiceDetermined, // where/when the choice's hidden-variable cause is fixed
    ChoiceMade,
    MeasurementStart,
    ResultAvailable,
};

std::string event_kind_name(EventKind k);
EventKind event_kind_from_name(const std::string& name);

/// One timeline event. `site` is where it happens; `owner` is the measurement
/// site whose quadruple it belongs to (defaults to `site`). A detached owner
/// lets a choice's determination live far away, e.g. at the galaxy that
/// emitted the photon steering the setting.
struct Event {
    std::string site;
    EventKind kind = EventKind::ChoiceMade;
    double time = 0.0; // seconds
    std::string owner; // empty means same as site
    std::string note;

    const std::string& owner_site() const { return owner.empty() ? site : owner; }
};

class ExperimentTimeline {
  public:
    std::vector<Site> sites;
    std::vector<Event> events;
    double signal_speed = 299792458.0; // m/s
    bool heralded = false;             // source announces triplet emission
    bool assume_free_choice = false;   // choices treated as undetermined until made
    std::string note;

    const Site& site(const std::string& id) const;
    bool has_site(const std::string& id) const;

    /// Measurement sites: owners of event quadruples, in sites order.
    std::vector<std::string> measurement_sites() const;
    const Event& event(const std::string& owner, EventKind kind) const;

    /// Checks the per-site quadruple, its time ordering, site references, and
    /// that each determination can causally reach its own choice. When
    /// assume_free_choice is set, missing ChoiceDetermined events are filled
    /// in as copies of ChoiceMade first. Throws ValidationError listing the
    /// offending events.
    void validate_and_normalize();

    nlohmann::ordered_json to_json() const;
    static ExperimentTimeline from_json(const nlohmann::json& j);
};

/// True iff a signal at e1 moving at signal_speed can reach e2; lightlike
/// separation counts as reachable.
bool can_signal(const Event& e1, const Event& e2, const ExperimentTimeline& timeline);

struct PairChannels {
    std::string from;
    std::string to;
    bool choice_channel_open = false;
    bool result_channel_open = false;
    bool determination_channel_open = false;
};

struct LoopholeReport {
    std::vector<PairChannels> pairs; // ordered site pairs
    bool heralding_gap = false;
    std::vector<std::string> caveats;

    bool any_channel_open() const;
    const PairChannels& pair(const std::string& from, const std::string& to) const;

    nlohmann::ordered_json to_json() const;
};

/// Classifies every ordered pair of measurement sites:
///   choice channel:        ChoiceMade@A        -> ResultAvailable@B
///   result channel:        ResultAvailable@A   -> ResultAvailable@B (A strictly earlier)
///   determination channel: ChoiceDetermined@A  -> ResultAvailable@B
LoopholeReport audit(const ExperimentTimeline& timeline);

/// Presets: "rowe", "weihs", "galaxy", "ideal". Parameters are representative
/// orders of magnitude, documented in the event notes.
ExperimentTimeline make_preset(const std::string& name);

} // namespace ghzlab::spacetime
