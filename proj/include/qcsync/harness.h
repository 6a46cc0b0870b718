#pragma once

// Discrete-event run of the full protocol: Charlie distributes noisy singlets,
// Alice and Bob purify them in their own conventions and then run clock
// synchronization over a classical channel that carries no timing data.
//
// All event times are reference times. A party only sees its own frame and
// clock; local timers are converted to reference time through the owning
// party's ClockModel.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "qcsync/frames.h"
#include "qcsync/purify.h"
#include "qcsync/qcs.h"

namespace qcsync::harness {

enum class PartyId { Alice, Bob, Charlie };
enum class Phase { Distributing, Purifying, QcsAliceMeasured, Done };

const char* to_string(PartyId id);
const char* to_string(Phase phase);

struct Party {
    PartyId id;
    frames::BasisFrame frame;
    frames::ClockModel clock;
    Phase phase = Phase::Distributing;
};

// Classical payloads. None of them has a floating-point field.
struct RotationSeed {
    std::uint64_t seed = 0;
};
struct OutcomeBits {
    int round = 0;
    std::vector<std::uint8_t> bits;
};
struct QcsOutcomes {
    std::vector<std::uint8_t> sigma;
};
struct Control {
    std::string note;
};
using Payload = std::variant<RotationSeed, OutcomeBits, QcsOutcomes, Control>;

const char* payload_kind(const Payload& p);
std::string payload_text(const Payload& p);

struct ClassicalMessage {
    PartyId sender;
    PartyId receiver;
    double send_time = 0;
    double deliver_time = 0;
    Payload payload;
};

struct ChannelModel {
    double latency = 0;  // s, classical and quantum
    double jitter = 0;   // s, classical latency += jitter * U[0, 1)
    double p = 0;        // depolarizing probability of distributed pairs

    void validate() const;
};

enum class DelayParty { Bob, Alice };

struct Scenario {
    std::int64_t pairs = 4096;  // N
    ChannelModel channel;
    frames::BasisFrame alice;
    frames::BasisFrame bob;
    frames::BasisFrame charlie;
    double true_offset = 0;  // Alice's clock minus Bob's clock, s
    double clock_base = 0;   // Alice's clock minus the reference clock, s
    double omega = 1;        // rad/s
    std::optional<int> rounds;  // empty: choose by optimize_rounds
    purify::Mode mode = purify::Mode::MonteCarlo;
    DelayParty delay_party = DelayParty::Bob;
    std::uint64_t seed = 0;
    double start_reading = 1.0;  // local clock reading at which purification starts
    double round_period = 1.0;   // local clock spacing of rounds

    // Structural checks; throws ConfigError.
    void validate() const;
    // Effective phase of the arriving pairs.
    double effective_phase() const;
    // Singlet fidelity of the arriving pairs, p/4 + (1-p) cos^2(phi/2).
    double initial_fidelity() const;
};

struct RunReport {
    purify::PurificationTrajectory trajectory;  // survivors not retained
    qcs::EstimateReport estimate;
    qcs::ErrorBudget budget;
    int rounds = 0;
    double estimated_offset = 0;
    double true_offset = 0;
    double effective_phase = 0;   // wrapped
    double initial_fidelity = 0;
    double qcs_pair_fidelity = 0;  // mean local-singlet fidelity of the pairs used for QCS
    bool branch_ok = true;          // omega * true_offset in (0, pi)
    bool charlie_invariance_ok = false;
    double alice_measure_time = 0;
    double bob_readout_time = 0;
    std::vector<ClassicalMessage> messages;
    std::uint64_t events_processed = 0;
};

// ------------------------------------------------------------------- Events

enum class EventKind { Start, PairsArrive, Deliver, RoundTimer, QcsTimer };

struct Event {
    double time = 0;
    std::uint64_t seq = 0;  // assigned by EventQueue::push
    PartyId party = PartyId::Alice;
    EventKind kind = EventKind::Start;
    int round = 0;
    std::optional<ClassicalMessage> message;
};

// Min-queue on (time, insertion order).
class EventQueue {
public:
    void push(Event e);
    Event pop();
    const Event& top() const { return heap_.top(); }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

using EventHandler = std::function<void(const Event&)>;

// Pops the earliest event and hands it to `handler`. Throws ConfigError on an
// empty queue.
Event step_events(EventQueue& queue, const EventHandler& handler);

// One protocol execution. Exposed so tests can drive it event by event and
// inject out-of-order traffic.
class ProtocolRun {
public:
    explicit ProtocolRun(Scenario s);
    ~ProtocolRun();
    ProtocolRun(const ProtocolRun&) = delete;
    ProtocolRun& operator=(const ProtocolRun&) = delete;

    // Processes one event. Returns false once the queue is empty.
    bool step();
    void run();
    void inject(Event e);

    const Party& party(PartyId id) const;
    bool finished() const;
    RunReport report() const;

private:
    struct State;
    std::unique_ptr<State> st_;
};

// Throws PreconditionError naming the violated bound when the arriving pairs
// cannot be purified (F <= 1/2 or |phi| >= pi/2).
RunReport run_scenario(const Scenario& s);

// No-hidden-synchronization check on a message log.
struct FirewallReport {
    bool clean = true;
    std::vector<std::string> violations;
};
FirewallReport scan_message_log(const std::vector<ClassicalMessage>& log, const Scenario& s);

}  // namespace qcsync::harness
