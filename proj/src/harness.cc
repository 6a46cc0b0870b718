#include "qcsync/harness.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <regex>

#include "qcsync/channels.h"
#include "qcsync/errors.h"

namespace qcsync::harness {

using qmath::DensityMatrix;
using qmath::SquareMatrix;

const char* to_string(PartyId id) {
    switch (id) {
        case PartyId::Alice: return "alice";
        case PartyId::Bob: return "bob";
        case PartyId::Charlie: return "charlie";
    }
    return "?";
}

const char* to_string(Phase phase) {
    switch (phase) {
        case Phase::Distributing: return "distributing";
        case Phase::Purifying: return "purifying";
        case Phase::QcsAliceMeasured: return "qcs-alice-measured";
        case Phase::Done: return "done";
    }
    return "?";
}

namespace {

struct KindName {
    const char* operator()(const RotationSeed&) const { return "rotation-seed"; }
    const char* operator()(const OutcomeBits&) const { return "outcome-bits"; }
    const char* operator()(const QcsOutcomes&) const { return "qcs-outcomes"; }
    const char* operator()(const Control&) const { return "control"; }
};

std::string bit_string(const std::vector<std::uint8_t>& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(static_cast<char>('0' + b));
    return s;
}

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

const char* payload_kind(const Payload& p) { return std::visit(KindName{}, p); }

std::string payload_text(const Payload& p) {
    struct Text {
        std::string operator()(const RotationSeed& m) const { return "seed=" + std::to_string(m.seed); }
        std::string operator()(const OutcomeBits& m) const {
            return "round=" + std::to_string(m.round) + " bits=" + bit_string(m.bits);
        }
        std::string operator()(const QcsOutcomes& m) const { return "sigma=" + bit_string(m.sigma); }
        std::string operator()(const Control& m) const { return "note=" + m.note; }
    };
    return std::visit(Text{}, p);
}

void ChannelModel::validate() const {
    if (!(latency >= 0) || !std::isfinite(latency)) throw ConfigError("channel latency must be >= 0");
    if (!(jitter >= 0) || !std::isfinite(jitter)) throw ConfigError("channel jitter must be >= 0");
    if (!(p >= 0 && p <= 1)) throw ConfigError("channel noise p must lie in [0, 1]");
}

void Scenario::validate() const {
    if (pairs < 1) throw ConfigError("scenario needs at least one pair");
    channel.validate();
    if (!finite_all({alice.theta0, alice.theta1, bob.theta0, bob.theta1, charlie.theta0, charlie.theta1}))
        throw ConfigError("frame angles must be finite");
    if (!(omega > 0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
    if (!finite_all({true_offset, clock_base, start_reading, round_period}))
        throw ConfigError("scenario times must be finite");
    if (rounds && (*rounds < 0 || *rounds > 62)) throw ConfigError("rounds must lie in [0, 62]");
    if (!(round_period > 0)) throw ConfigError("round_period must be positive");

    // Local schedules are fixed in advance; they must leave room for the
    // classical traffic they depend on.
    const double off_a = clock_base;
    const double off_b = clock_base - true_offset;
    const double worst = channel.latency + channel.jitter;
    if (!(start_reading - off_a > worst) || !(start_reading - off_b > worst))
        throw ConfigError("start_reading too early: pairs or seed would arrive after the first local operation");
    if (!(round_period > worst + std::abs(true_offset)))
        throw ConfigError("round_period too short for the channel latency and clock offset");
}

double Scenario::effective_phase() const {
    return frames::effective_phase(alice, bob, omega, true_offset);
}

double Scenario::initial_fidelity() const {
    return channels::phase_state_fidelity(channel.p, effective_phase());
}

// ------------------------------------------------------------------- Events

void EventQueue::push(Event e) {
    e.seq = next_seq_++;
    heap_.push(std::move(e));
}

Event EventQueue::pop() {
    if (heap_.empty()) throw ConfigError("event queue is empty");
    Event e = heap_.top();
    heap_.pop();
    return e;
}

Event step_events(EventQueue& queue, const EventHandler& handler) {
    Event e = queue.pop();
    handler(e);
    return e;
}

// ----------------------------------------------------------------- Protocol

namespace {

// Stream tags under the master seed.
enum : std::uint64_t { kTagAlice = 1, kTagWorld = 2, kTagChannel = 3, kTagQcs = 4 };

struct Slot {
    purify::RoundRegister reg;
    Rng outcomes;
    int alice_bit = -1;
    int bob_bit = -1;
};

struct Progress {
    std::optional<std::uint64_t> seed;
    int done_round = 0;
    int resolved_round = 0;
    std::map<int, std::vector<std::uint8_t>> peer_bits;
    std::vector<std::uint8_t> own_bits;
};

}  // namespace

struct ProtocolRun::State {
    Scenario s;
    Party alice;
    Party bob;
    Party charlie;
    int rounds = 0;
    EventQueue queue;
    std::uint64_t events = 0;
    Rng channel_rng;
    Rng qcs_rng;
    std::uint64_t world_seed;
    double initial_fidelity = 0;
    bool charlie_ok = false;

    Progress pa;
    Progress pb;

    // World (nature): the joint quantum state.
    std::vector<DensityMatrix> pairs;
    std::vector<Slot> slots;
    int slots_round = 0;
    std::optional<DensityMatrix> leftover;
    purify::PurificationTrajectory traj;
    double first_op_alice = 0;
    double first_op_bob = 0;

    // QCS.
    std::optional<std::vector<std::uint8_t>> sigma;  // as received by Bob
    bool bob_timer_fired = false;
    double qcs_reading = 0;
    double alice_measure_time = 0;
    double bob_readout_time = 0;
    double qcs_pair_fidelity = 0;
    std::optional<qcs::EstimateReport> estimate;

    std::vector<ClassicalMessage> log;

    explicit State(Scenario sc)
        : s(std::move(sc)),
          alice{PartyId::Alice, s.alice, frames::ClockModel(s.omega, s.clock_base)},
          bob{PartyId::Bob, s.bob, frames::ClockModel(s.omega, s.clock_base - s.true_offset)},
          charlie{PartyId::Charlie, s.charlie, frames::ClockModel(s.omega, 0.0)},
          channel_rng(derive_seed(s.seed, kTagChannel)),
          qcs_rng(derive_seed(s.seed, kTagQcs)),
          world_seed(derive_seed(s.seed, kTagWorld)) {}

    purify::PartyFrames frames_truth() const { return {alice.frame, bob.frame}; }

    Party& party(PartyId id) {
        switch (id) {
            case PartyId::Alice: return alice;
            case PartyId::Bob: return bob;
            default: return charlie;
        }
    }

    void send(PartyId from, PartyId to, double now, Payload payload) {
        double delay = s.channel.latency;
        if (s.channel.jitter > 0) delay += s.channel.jitter * channel_rng.uniform();
        ClassicalMessage m{from, to, now, now + delay, std::move(payload)};
        log.push_back(m);
        Event e;
        e.time = m.deliver_time;
        e.party = to;
        e.kind = EventKind::Deliver;
        e.message = std::move(m);
        queue.push(std::move(e));
    }

    void schedule_local(const Party& p, double reading, EventKind kind, int round) {
        Event e;
        e.time = p.clock.reference_time_of(reading);
        e.party = p.id;
        e.kind = kind;
        e.round = round;
        queue.push(std::move(e));
    }

    [[noreturn]] static void order_error(const Party& p, const std::string& what) {
        throw ProtocolOrderError(std::string(to_string(p.id)) + " (" + to_string(p.phase) + "): " + what);
    }

    // ---------------------------------------------------------- handlers

    void on_start(const Event& e) {
        if (e.party == PartyId::Alice) {
            Rng priv(derive_seed(s.seed, kTagAlice));
            pa.seed = priv.next_u64();
            send(PartyId::Alice, PartyId::Bob, e.time, RotationSeed{*pa.seed});
            return;
        }
        // Charlie writes the singlet in his own convention. It coincides with
        // the reference singlet up to a global phase, which he checks before
        // distributing the reference form.
        if (charlie.phase != Phase::Distributing) order_error(charlie, "second distribution");
        const auto mine = DensityMatrix::from_pure(frames::local_singlet(charlie.frame, charlie.frame));
        charlie_ok = qmath::fidelity(mine, channels::bell_state(channels::Bell::PsiMinus)) >= 1 - 1e-12;
        charlie.phase = Phase::Done;
        Event arrive;
        arrive.time = e.time + s.channel.latency;
        arrive.party = PartyId::Charlie;
        arrive.kind = EventKind::PairsArrive;
        queue.push(std::move(arrive));
    }

    void on_pairs_arrive(const Event&) {
        if (alice.phase != Phase::Distributing || bob.phase != Phase::Distributing)
            throw ProtocolOrderError("pairs arrived twice");
        DensityMatrix rho = DensityMatrix::from_pure(channels::bell_state(channels::Bell::PsiMinus));
        rho = channels::depolarize(rho, channels::NoiseModel(s.channel.p));
        // Precession accumulated between the parties' first operations.
        const double delta = first_op_bob - first_op_alice;
        if (s.delay_party == DelayParty::Bob) {
            rho = qmath::apply_unitary(rho, frames::time_delay_operator(s.omega, delta), {1});
        } else {
            rho = qmath::apply_unitary(rho, frames::time_delay_operator(s.omega, -delta), {0});
        }
        alice.phase = Phase::Purifying;
        bob.phase = Phase::Purifying;

        if (s.mode == purify::Mode::Analytic) {
            traj = purify::purify_schedule(purify::PairEnsemble::analytic(initial_fidelity,
                                                                          static_cast<double>(s.pairs)),
                                           rounds);
            pa.done_round = pa.resolved_round = rounds;
            pb.done_round = pb.resolved_round = rounds;
            return;
        }
        pairs.assign(static_cast<std::size_t>(s.pairs), rho);
        traj.mode = purify::Mode::MonteCarlo;
        traj.yield = purify::Yield::Ideal;
        traj.rounds.push_back({0, qmath::fidelity(rho, frames::local_singlet(alice.frame, bob.frame)),
                               static_cast<double>(pairs.size()), 1.0});
    }

    void on_round_timer(const Event& e) {
        Party& me = party(e.party);
        Progress& pr = e.party == PartyId::Alice ? pa : pb;
        const int r = e.round;
        if (me.phase != Phase::Purifying) order_error(me, "round timer before pairs arrived");
        if (!pr.seed) order_error(me, "round timer before the rotation seed");
        if (pr.resolved_round != r - 1) order_error(me, "round " + std::to_string(r) + " before the previous round resolved");

        if (slots_round != r) {
            if (pairs.size() < 2)
                throw ExhaustionError("purification exhausted: fewer than two pairs before round " + std::to_string(r));
            slots.clear();
            const std::size_t attempts = pairs.size() / 2;
            slots.reserve(attempts);
            for (std::size_t j = 0; j < attempts; ++j) {
                slots.push_back({purify::RoundRegister(pairs[2 * j], pairs[2 * j + 1]),
                                 Rng(derive_seed(world_seed, static_cast<std::uint64_t>(r), j))});
            }
            leftover.reset();
            if (pairs.size() % 2 == 1) leftover = pairs.back();
            pairs.clear();
            slots_round = r;
        }

        const auto side = e.party == PartyId::Alice ? purify::Side::Alice : purify::Side::Bob;
        pr.own_bits.assign(slots.size(), 0);
        for (std::size_t j = 0; j < slots.size(); ++j) {
            Rng rot(derive_seed(*pr.seed, static_cast<std::uint64_t>(r), j));
            const int t1 = static_cast<int>(rot.below(channels::TwirlGroup::kSize));
            const int t2 = static_cast<int>(rot.below(channels::TwirlGroup::kSize));
            slots[j].reg.apply_party_gates(side, me.frame, t1, t2);
            const int bit = slots[j].reg.measure_target(side, slots[j].outcomes);
            (side == purify::Side::Alice ? slots[j].alice_bit : slots[j].bob_bit) = bit;
            pr.own_bits[j] = static_cast<std::uint8_t>(bit);
        }
        pr.done_round = r;
        send(me.id, e.party == PartyId::Alice ? PartyId::Bob : PartyId::Alice, e.time,
             OutcomeBits{r, pr.own_bits});
        try_resolve(me, pr);
    }

    void try_resolve(Party& me, Progress& pr) {
        while (pr.done_round == pr.resolved_round + 1 && pr.peer_bits.count(pr.done_round)) {
            const int r = pr.done_round;
            const auto peer = std::move(pr.peer_bits[r]);
            pr.peer_bits.erase(r);
            if (peer.size() != pr.own_bits.size())
                throw InvariantError("outcome lists of round " + std::to_string(r) + " differ in length");
            if (me.id == PartyId::Alice) {
                // Alice keeps coincident pairs and applies her Z.
                std::size_t success = 0;
                for (std::size_t j = 0; j < slots.size(); ++j) {
                    auto kept = slots[j].reg.finish(pr.own_bits[j], peer[j], me.frame);
                    if (kept) {
                        pairs.push_back(std::move(*kept));
                        ++success;
                    }
                }
                if (leftover) pairs.push_back(*leftover);
                leftover.reset();
                traj.rounds.push_back({r, purify::mean_local_fidelity(pairs, frames_truth()),
                                       static_cast<double>(pairs.size()),
                                       static_cast<double>(success) / static_cast<double>(slots.size())});
            }
            pr.resolved_round = r;
        }
        if (pa.resolved_round == slots_round && pb.resolved_round == slots_round) slots.clear();
    }

    void on_outcome_bits(Party& me, const OutcomeBits& m) {
        Progress& pr = me.id == PartyId::Alice ? pa : pb;
        if (!pr.seed) order_error(me, "purification outcomes before the rotation seed");
        if (me.phase != Phase::Purifying) order_error(me, "purification outcomes outside the purification phase");
        if (m.round <= pr.resolved_round || m.round > rounds || pr.peer_bits.count(m.round))
            order_error(me, "unexpected outcome message for round " + std::to_string(m.round));
        pr.peer_bits[m.round] = m.bits;
        try_resolve(me, pr);
    }

    void on_qcs_timer(const Event& e) {
        Party& me = party(e.party);
        Progress& pr = e.party == PartyId::Alice ? pa : pb;
        if (me.phase != Phase::Purifying || pr.resolved_round != rounds)
            order_error(me, "synchronization step before purification finished");
        if (me.id == PartyId::Alice) {
            std::vector<std::uint8_t> sigma;
            if (s.mode == purify::Mode::Analytic) {
                // Alice's half of a Werner pair is maximally mixed.
                const auto m = static_cast<std::size_t>(std::floor(traj.final_round().pairs_remaining));
                if (m == 0) throw ExhaustionError("no pairs left for synchronization");
                sigma.resize(m);
                for (auto& b : sigma) b = qcs_rng.coin() ? 1 : 0;
                qcs_pair_fidelity = traj.final_round().fidelity;
            } else {
                if (pairs.empty()) throw ExhaustionError("no pairs left for synchronization");
                // Closing twirl from the shared seed. Leaves Bell-diagonal survivors
                // Werner and strips the coherent phase of never-purified pairs.
                for (std::size_t j = 0; j < pairs.size(); ++j) {
                    Rng rot(derive_seed(*pa.seed, static_cast<std::uint64_t>(rounds + 1), j));
                    pairs[j] = channels::apply_twirl_element(pairs[j], static_cast<int>(rot.below(channels::TwirlGroup::kSize)),
                                                             alice.frame, bob.frame);
                }
                qcs_pair_fidelity = purify::mean_local_fidelity(pairs, frames_truth());
                sigma.reserve(pairs.size());
                for (auto& p : pairs)
                    sigma.push_back(static_cast<std::uint8_t>(qcs::alice_measure(p, me.frame, qcs_rng)));
            }
            alice_measure_time = e.time;
            me.phase = Phase::QcsAliceMeasured;
            send(PartyId::Alice, PartyId::Bob, e.time, QcsOutcomes{std::move(sigma)});
            return;
        }
        bob_timer_fired = true;
        if (sigma) bob_act(e.time);
    }

    void on_qcs_outcomes(Party& me, const QcsOutcomes& m, double now) {
        if (me.id != PartyId::Bob) order_error(me, "synchronization outcomes sent to the wrong party");
        if (me.phase != Phase::Purifying || pb.resolved_round != rounds)
            order_error(me, "synchronization outcomes before purification finished");
        if (sigma) order_error(me, "duplicate synchronization outcomes");
        sigma = m.sigma;
        if (bob_timer_fired) bob_act(now);
    }

    void bob_act(double now) {
        // Physical evolution of Bob's qubit since Alice's measurement. Bob
        // undoes the part he knows about: the wait past his scheduled reading.
        const double waited = bob.clock.reading_at(now) - qcs_reading;
        const SquareMatrix evolution =
            qcs::precession(s.omega, -waited) * qcs::precession(s.omega, now - alice_measure_time);
        const auto m = static_cast<std::int64_t>(sigma->size());
        std::int64_t k = 0;
        if (s.mode == purify::Mode::Analytic) {
            const double f = traj.final_round().fidelity;
            DensityMatrix w = channels::werner_from_fidelity(f);
            w = qmath::apply_unitary(w, frames::frame_unitary(frames::kReferenceFrame, alice.frame), {0});
            w = qmath::apply_unitary(w, frames::frame_unitary(frames::kReferenceFrame, bob.frame), {1});
            const double p0 = std::clamp(qcs::zero_outcome_probability(w, alice.frame, bob.frame, evolution), 0.0, 1.0);
            k = qcs::BinomialSampler(m, p0).sample(qcs_rng);
        } else {
            if (pairs.size() != sigma->size()) throw InvariantError("outcome list does not match the pair count");
            for (std::size_t j = 0; j < pairs.size(); ++j)
                if (qcs::bob_readout(pairs[j], (*sigma)[j], evolution, bob.frame, qcs_rng) == 0) ++k;
        }
        estimate = qcs::make_estimate(k, m, s.omega, 0.0);
        bob_readout_time = now;
        bob.phase = Phase::Done;
        send(PartyId::Bob, PartyId::Alice, now, Control{"qcs-complete"});
    }

    void on_deliver(const Event& e) {
        Party& me = party(e.party);
        const auto& msg = *e.message;
        if (msg.receiver != me.id) throw InvariantError("message delivered to the wrong party");
        if (const auto* seed = std::get_if<RotationSeed>(&msg.payload)) {
            Progress& pr = me.id == PartyId::Alice ? pa : pb;
            if (pr.seed && me.id == PartyId::Bob) order_error(me, "second rotation seed");
            pr.seed = seed->seed;
        } else if (const auto* bits = std::get_if<OutcomeBits>(&msg.payload)) {
            on_outcome_bits(me, *bits);
        } else if (const auto* q = std::get_if<QcsOutcomes>(&msg.payload)) {
            on_qcs_outcomes(me, *q, e.time);
        } else {
            if (me.id != PartyId::Alice || me.phase != Phase::QcsAliceMeasured)
                order_error(me, "unexpected control message");
            me.phase = Phase::Done;
        }
    }

    void dispatch(const Event& e) {
        ++events;
        switch (e.kind) {
            case EventKind::Start: on_start(e); break;
            case EventKind::PairsArrive: on_pairs_arrive(e); break;
            case EventKind::Deliver: on_deliver(e); break;
            case EventKind::RoundTimer: on_round_timer(e); break;
            case EventKind::QcsTimer: on_qcs_timer(e); break;
        }
    }
};

ProtocolRun::ProtocolRun(Scenario s) {
    s.validate();
    const double phi = frames::wrap_angle(s.effective_phase());
    const double f0 = s.initial_fidelity();
    std::string bounds;
    if (!(f0 > 0.5)) bounds += "initial fidelity F = " + shortest(f0) + " must exceed 0.5";
    if (!(std::abs(phi) < std::numbers::pi / 2)) {
        if (!bounds.empty()) bounds += "; ";
        bounds += "|phi| = " + shortest(std::abs(phi)) + " must stay below pi/2";
    }
    if (!bounds.empty()) throw PreconditionError(bounds);

    st_ = std::make_unique<State>(std::move(s));
    State& st = *st_;
    st.initial_fidelity = f0;
    st.rounds = st.s.rounds ? *st.s.rounds
                            : qcs::optimize_rounds(static_cast<double>(st.s.pairs), f0, st.s.omega).n_star;
    // Refuses N < 2^n with a PreconditionError.
    qcs::error_budget(static_cast<double>(st.s.pairs), st.rounds, f0, st.s.omega);

    Event start;
    start.party = PartyId::Alice;
    start.kind = EventKind::Start;
    st.queue.push(start);
    start.party = PartyId::Charlie;
    st.queue.push(start);

    const double S = st.s.start_reading;
    for (int r = 1; r <= st.rounds && st.s.mode == purify::Mode::MonteCarlo; ++r) {
        st.schedule_local(st.alice, S + (r - 1) * st.s.round_period, EventKind::RoundTimer, r);
        st.schedule_local(st.bob, S + (r - 1) * st.s.round_period, EventKind::RoundTimer, r);
    }
    st.qcs_reading = st.s.mode == purify::Mode::MonteCarlo ? S + st.rounds * st.s.round_period : S;
    st.schedule_local(st.alice, st.qcs_reading, EventKind::QcsTimer, 0);
    st.schedule_local(st.bob, st.qcs_reading, EventKind::QcsTimer, 0);
    st.first_op_alice = st.alice.clock.reference_time_of(S);
    st.first_op_bob = st.bob.clock.reference_time_of(S);
}

ProtocolRun::~ProtocolRun() = default;

bool ProtocolRun::step() {
    if (st_->queue.empty()) return false;
    step_events(st_->queue, [this](const Event& e) { st_->dispatch(e); });
    return true;
}

void ProtocolRun::run() {
    while (step()) {
    }
}

void ProtocolRun::inject(Event e) { st_->queue.push(std::move(e)); }

const Party& ProtocolRun::party(PartyId id) const { return st_->party(id); }

bool ProtocolRun::finished() const {
    return st_->alice.phase == Phase::Done && st_->bob.phase == Phase::Done && st_->estimate.has_value();
}

RunReport ProtocolRun::report() const {
    if (!finished()) throw InvariantError("protocol run did not complete");
    const State& st = *st_;
    RunReport r;
    r.trajectory = st.traj;
    r.trajectory.survivors.clear();
    r.estimate = *st.estimate;
    r.rounds = st.rounds;
    r.budget = qcs::error_budget(static_cast<double>(st.s.pairs), st.rounds, st.initial_fidelity, st.s.omega);
    r.estimated_offset = r.estimate.t_hat;
    r.true_offset = st.s.true_offset;
    r.effective_phase = frames::wrap_angle(st.s.effective_phase());
    r.initial_fidelity = st.initial_fidelity;
    r.qcs_pair_fidelity = st.qcs_pair_fidelity;
    const double theta = st.s.omega * st.s.true_offset;
    r.branch_ok = theta > 0 && theta < std::numbers::pi;
    r.estimate.branch_ok = r.branch_ok;
    r.charlie_invariance_ok = st.charlie_ok;
    r.alice_measure_time = st.alice_measure_time;
    r.bob_readout_time = st.bob_readout_time;
    r.messages = st.log;
    r.events_processed = st.events;
    if (!std::isfinite(r.estimated_offset)) throw InvariantError("estimated offset is not finite");
    return r;
}

RunReport run_scenario(const Scenario& s) {
    ProtocolRun run(s);
    run.run();
    return run.report();
}

// ----------------------------------------------------------------- Firewall

FirewallReport scan_message_log(const std::vector<ClassicalMessage>& log, const Scenario& s) {
    FirewallReport rep;
    auto flag = [&](std::size_t i, const std::string& why) {
        rep.clean = false;
        rep.violations.push_back("message " + std::to_string(i) + ": " + why);
    };

    std::vector<double> secrets = {s.alice.theta0, s.alice.theta1, s.bob.theta0,  s.bob.theta1,
                                   s.charlie.theta0, s.charlie.theta1, s.true_offset, s.clock_base,
                                   s.clock_base - s.true_offset, s.omega * s.true_offset,
                                   s.effective_phase()};
    for (std::size_t i = 0, n = secrets.size(); i < n; ++i) secrets.push_back(frames::wrap_angle(secrets[i]));
    std::vector<std::string> needles;
    for (double v : secrets) {
        if (!std::isfinite(v) || v == std::trunc(v)) continue;  // integers collide with bit strings
        needles.push_back(shortest(std::abs(v)));
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", std::abs(v));
        needles.emplace_back(buf);
    }
    static const std::regex kDecimal(R"(\d\.\d|\d[eE][-+]?\d|inf|nan)");

    bool seed_seen = false;
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& m = log[i];
        const std::string text = payload_text(m.payload);
        if (std::holds_alternative<RotationSeed>(m.payload)) seed_seen = true;
        if (const auto* b = std::get_if<OutcomeBits>(&m.payload)) {
            if (!seed_seen) flag(i, "outcome bits sent before the rotation seed");
            for (auto x : b->bits)
                if (x > 1) flag(i, "non-binary outcome entry");
        }
        if (const auto* q = std::get_if<QcsOutcomes>(&m.payload)) {
            for (auto x : q->sigma)
                if (x > 1) flag(i, "non-binary sigma entry");
        }
        if (const auto* c = std::get_if<Control>(&m.payload)) {
            if (c->note != "qcs-complete") flag(i, "unknown control note '" + c->note + "'");
        }
        if (std::regex_search(text, kDecimal)) flag(i, "payload contains a real-valued literal");
        for (const auto& needle : needles)
            if (text.find(needle) != std::string::npos) flag(i, "payload contains secret value " + needle);
    }
    return rep;
}

}  // namespace qcsync::harness
