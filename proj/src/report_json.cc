#include "qcsync/report_json.h"

namespace qcsync::harness {

using nlohmann::ordered_json;

ordered_json to_json(const ClassicalMessage& m) {
    ordered_json j;
    j["sender"] = to_string(m.sender);
    j["receiver"] = to_string(m.receiver);
    j["send_time"] = m.send_time;
    j["deliver_time"] = m.deliver_time;
    j["kind"] = payload_kind(m.payload);
    j["payload"] = payload_text(m.payload);
    return j;
}

ordered_json to_json(const RunReport& r) {
    ordered_json j;
    ordered_json traj;
    traj["mode"] = r.trajectory.mode == purify::Mode::Analytic ? "analytic" : "montecarlo";
    traj["undersized"] = r.trajectory.undersized;
    for (const auto& rec : r.trajectory.rounds) {
        traj["rounds"].push_back({{"round", rec.round},
                                  {"fidelity", rec.fidelity},
                                  {"pairs_remaining", rec.pairs_remaining},
                                  {"success_rate", rec.success_rate}});
    }
    j["trajectory"] = traj;

    const auto& e = r.estimate;
    j["estimate"] = {{"k", e.k},
                     {"pairs", e.pairs},
                     {"x", e.x},
                     {"t_hat", e.t_hat},
                     {"stderr_t", e.stderr_t},
                     {"stderr_x", e.stderr_x},
                     {"stderr_x_bound", e.stderr_x_bound},
                     {"branch_ok", e.branch_ok}};
    const auto& b = r.budget;
    j["budget"] = {{"n_rounds", b.n_rounds},
                   {"fidelity", b.fidelity},
                   {"pairs_used", b.pairs_used},
                   {"dt_sql", b.dt_sql},
                   {"dt_fidelity", b.dt_fidelity},
                   {"dt_total", b.dt_total}};
    j["rounds"] = r.rounds;
    j["estimated_offset"] = r.estimated_offset;
    j["true_offset"] = r.true_offset;
    j["offset_error"] = r.estimated_offset - r.true_offset;
    j["effective_phase"] = r.effective_phase;
    j["initial_fidelity"] = r.initial_fidelity;
    j["qcs_pair_fidelity"] = r.qcs_pair_fidelity;
    j["branch_ok"] = r.branch_ok;
    j["charlie_invariance_ok"] = r.charlie_invariance_ok;
    j["alice_measure_time"] = r.alice_measure_time;
    j["bob_readout_time"] = r.bob_readout_time;
    j["events_processed"] = r.events_processed;
    ordered_json log = ordered_json::array();
    for (const auto& m : r.messages) log.push_back(to_json(m));
    j["messages"] = std::move(log);
    return j;
}

}  // namespace qcsync::harness
