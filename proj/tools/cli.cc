#include "cli.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcsync/channels.h"
#include "qcsync/errors.h"
#include "qcsync/harness.h"
#include "qcsync/purify.h"
#include "qcsync/qcs.h"
#include "qcsync/report_json.h"

namespace qcsync::cli {

using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::string label;  // empty for single-table outputs
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Output {
    std::vector<Table> tables;
    std::vector<std::pair<std::string, Cell>> summary;
    ordered_json report;  // e2e only
};

std::string cell_text(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    return std::get<std::string>(c);
}

ordered_json cell_json(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return std::get<std::string>(c);
}

void write_csv(std::ostream& os, const std::string& header, const Output& out) {
    os << "# " << header << '\n';
    for (const auto& t : out.tables) {
        if (!t.label.empty()) os << "# " << t.label << '\n';
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
            os << '\n';
        }
    }
    for (const auto& [k, v] : out.summary) os << "# " << k << '=' << cell_text(v) << '\n';
}

void write_json(std::ostream& os, const std::string& command, const ordered_json& config, const Output& out) {
    ordered_json j;
    j["command"] = command;
    j["config"] = config;
    ordered_json tables = ordered_json::array();
    for (const auto& t : out.tables) {
        ordered_json jt;
        jt["label"] = t.label;
        jt["rows"] = ordered_json::array();
        for (const auto& row : t.rows) {
            ordered_json r;
            for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
            jt["rows"].push_back(std::move(r));
        }
        tables.push_back(std::move(jt));
    }
    j["tables"] = std::move(tables);
    ordered_json summary = ordered_json::object();
    for (const auto& [k, v] : out.summary) summary[k] = cell_json(v);
    j["summary"] = std::move(summary);
    if (!out.report.is_null()) j["report"] = out.report;
    os << j.dump(2) << '\n';
}

// Row order is fixed by index whatever the completion order.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
    threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(mu);
                        if (!failure) failure = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::int64_t as_count(double v, const char* what) {
    if (!(v >= 1) || v != std::floor(v) || v > 9.0e15)
        throw ConfigError(std::string(what) + " must be a positive integer");
    return static_cast<std::int64_t>(v);
}

// ------------------------------------------------------------- Subcommands

struct Globals {
    std::uint64_t seed = 1;
    std::string out;
    std::string config;
    std::string format = "csv";
    unsigned threads = 1;
};

struct TwirlCheckOpts {
    int grid = 20;
};

Output twirl_check(const TwirlCheckOpts& o, const Globals& g) {
    if (o.grid < 2) throw ConfigError("--grid must be at least 2");
    const int n = o.grid;
    Table t{"", {"p", "phi", "twirl_residual", "fidelity_residual"}, {}};
    t.rows.resize(static_cast<std::size_t>(n * n));
    const auto psi = channels::bell_state(channels::Bell::PsiMinus);
    parallel_for(t.rows.size(), g.threads, [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / n, k = static_cast<int>(idx) % n;
        const double p = static_cast<double>(i) / (n - 1);
        const double phi = -std::numbers::pi + 2 * std::numbers::pi * k / (n - 1);
        const auto rho = channels::depolarize(qmath::DensityMatrix::from_pure(frames::phase_singlet(phi)),
                                              channels::NoiseModel(p));
        const auto numeric = channels::twirl_average(rho);
        const double twirl_res =
            numeric.matrix().max_abs_diff(channels::twirled_phase_state(p, phi).to_density().matrix());
        const double fid_res = std::abs(qmath::fidelity(rho, psi) - channels::phase_state_fidelity(p, phi));
        t.rows[idx] = {p, phi, twirl_res, fid_res};
    });
    double max_twirl = 0, max_fid = 0;
    for (const auto& r : t.rows) {
        max_twirl = std::max(max_twirl, std::get<double>(r[2]));
        max_fid = std::max(max_fid, std::get<double>(r[3]));
    }
    Output out;
    out.tables.push_back(std::move(t));
    out.summary = {{"max_twirl_residual", max_twirl}, {"max_fidelity_residual", max_fid}};
    return out;
}

struct PurifyOpts {
    double f0 = 0.9;
    double n_pairs = 1024;
    int rounds = 4;
    std::string mode = "analytic";
    std::string yield = "ideal";
};

Output purify_cmd(const PurifyOpts& o, const Globals& g) {
    if (!(o.f0 >= 0 && o.f0 <= 1)) throw ConfigError("--f0 must lie in [0, 1]");
    if (o.rounds < 0 || o.rounds > 62) throw ConfigError("--rounds must lie in [0, 62]");
    if (!(o.n_pairs > 0) || !std::isfinite(o.n_pairs)) throw ConfigError("--n-pairs must be positive");
    const bool analytic = o.mode == "analytic" || o.mode == "both";
    const bool mc = o.mode == "montecarlo" || o.mode == "both";
    if (mc && o.n_pairs > 1e6) throw ConfigError("--n-pairs above 1e6 is not supported in Monte Carlo mode");
    if (mc && std::ldexp(1.0, o.rounds) > o.n_pairs)
        throw PreconditionError("N = " + format_double(o.n_pairs) + " pairs cannot feed " +
                                std::to_string(o.rounds) + " Monte Carlo rounds");

    purify::ScheduleOptions so;
    so.yield = o.yield == "realistic" ? purify::Yield::Realistic : purify::Yield::Ideal;
    so.rotation_seed = derive_seed(g.seed, 1);
    so.outcome_seed = derive_seed(g.seed, 2);
    so.threads = g.threads;

    Table t{"", {"mode", "n", "fidelity", "pairs_remaining", "success_rate"}, {}};
    auto add = [&](const char* name, const purify::PurificationTrajectory& tr) {
        for (const auto& r : tr.rounds)
            t.rows.push_back({std::string(name), std::int64_t{r.round}, r.fidelity, r.pairs_remaining, r.success_rate});
    };
    Output out;
    if (analytic) {
        const auto tr = purify::purify_schedule(purify::PairEnsemble::analytic(o.f0, o.n_pairs), o.rounds, so);
        add("analytic", tr);
        out.summary.push_back({"analytic_undersized", std::string(tr.undersized ? "true" : "false")});
    }
    if (mc) {
        const auto n = static_cast<std::size_t>(as_count(o.n_pairs, "--n-pairs"));
        std::vector<qmath::DensityMatrix> pairs(n, channels::werner_from_fidelity(o.f0));
        add("montecarlo", purify::purify_schedule(purify::PairEnsemble::montecarlo(std::move(pairs)), o.rounds, so));
    }
    out.tables.push_back(std::move(t));
    return out;
}

struct QcsOpts {
    double m = 1000;
    double omega = 1;
    double t_true = 0.3;
    double epsilon = 0;
    int trials = 1;
    std::string method = "auto";
};

Output qcs_cmd(const QcsOpts& o, const Globals& g) {
    qcs::QCSConfig cfg;
    cfg.pairs = as_count(o.m, "--m");
    cfg.omega = o.omega;
    cfg.t_true = o.t_true;
    cfg.epsilon = o.epsilon;
    cfg.validate();
    if (o.trials < 1) throw ConfigError("--trials must be at least 1");
    const auto method = o.method == "per-qubit"  ? qcs::SamplingMethod::PerQubit
                        : o.method == "binomial" ? qcs::SamplingMethod::Binomial
                                                 : qcs::SamplingMethod::Auto;
    if (method == qcs::SamplingMethod::PerQubit && cfg.pairs > 1000000)
        throw ConfigError("--method per-qubit is limited to M <= 1e6");

    Table t{"", {"trial", "k", "x", "t_hat", "stderr_t"}, {}};
    t.rows.resize(static_cast<std::size_t>(o.trials));
    std::vector<double> hats(t.rows.size());
    parallel_for(t.rows.size(), g.threads, [&](std::size_t i) {
        Rng rng(derive_seed(g.seed, i));
        const auto r = qcs::simulate_qcs_sampling(cfg, rng, method);
        hats[i] = r.t_hat;
        t.rows[i] = {static_cast<std::int64_t>(i), r.k, r.x, r.t_hat, r.stderr_t};
    });
    double mean = 0;
    for (double h : hats) mean += h;
    mean /= static_cast<double>(hats.size());
    double var = 0;
    for (double h : hats) var += (h - mean) * (h - mean);
    const double sd = hats.size() > 1 ? std::sqrt(var / static_cast<double>(hats.size() - 1)) : 0.0;

    Output out;
    out.tables.push_back(std::move(t));
    out.summary = {{"mean_t_hat", mean},
                   {"std_t_hat", sd},
                   {"bias", mean - o.t_true},
                   {"branch_ok", std::string(cfg.branch_ok() ? "true" : "false")}};
    return out;
}

struct BudgetOpts {
    std::vector<double> f0{0.9};
    std::vector<double> n_pairs{1e5};
    double inv_omega_ps = 17;
    int n_max = 20;
    bool optimized = false;
    double sweep_min = 1e2;
    double sweep_max = 1e8;
    int sweep_points = 0;
};

Output budget_cmd(const BudgetOpts& o, const Globals&) {
    if (!(o.inv_omega_ps > 0) || !std::isfinite(o.inv_omega_ps)) throw ConfigError("--inv-omega-ps must be positive");
    if (o.n_max < 0 || o.n_max > 62) throw ConfigError("--n-max must lie in [0, 62]");
    for (double f : o.f0)
        if (!(f > 0.5 && f <= 1)) throw ConfigError("--f0 values must lie in (0.5, 1]");
    std::vector<double> ns = o.n_pairs;
    if (o.sweep_points > 0) {
        if (!(o.sweep_min >= 1 && o.sweep_max > o.sweep_min)) throw ConfigError("bad --sweep-min/--sweep-max");
        ns.clear();
        const double lo = std::log10(o.sweep_min), hi = std::log10(o.sweep_max);
        for (int i = 0; i < o.sweep_points; ++i)
            ns.push_back(std::pow(10.0, o.sweep_points == 1 ? lo : lo + (hi - lo) * i / (o.sweep_points - 1)));
    }
    for (double n : ns)
        if (!(n >= 1) || !std::isfinite(n)) throw ConfigError("--n-pairs values must be >= 1");

    // Times in units of 1/omega, scaled to picoseconds.
    const double omega = 1.0 / o.inv_omega_ps;
    Output out;
    if (o.optimized) {
        Table t{"", {"n_pairs", "f0", "n_star", "dt_star_ps"}, {}};
        for (double f : o.f0)
            for (double n : ns) {
                const auto opt = qcs::optimize_rounds(n, f, omega, o.n_max);
                t.rows.push_back({n, f, std::int64_t{opt.n_star}, opt.dt_star});
            }
        out.tables.push_back(std::move(t));
        return out;
    }
    for (double f : o.f0)
        for (double n : ns) {
            const auto opt = qcs::optimize_rounds(n, f, omega, o.n_max);
            Table t{"curve n_pairs=" + format_double(n) + " f0=" + format_double(f),
                    {"n", "F_n", "pairs_remaining", "dt_sql_ps", "dt_fidelity_ps", "dt_total_ps"},
                    {}};
            for (const auto& b : opt.curve)
                t.rows.push_back({std::int64_t{b.n_rounds}, b.fidelity, b.pairs_used, b.dt_sql, b.dt_fidelity, b.dt_total});
            out.tables.push_back(std::move(t));
            const std::string key = "n_pairs=" + format_double(n) + " f0=" + format_double(f);
            out.summary.push_back({"n_star " + key, std::int64_t{opt.n_star}});
            out.summary.push_back({"dt_star_ps " + key, opt.dt_star});
        }
    return out;
}

struct E2eOpts {
    double n_pairs = 4096;
    double p = 0.2;
    double latency = 0.04;
    double jitter = 0;
    std::vector<double> alice{0, 0};
    std::vector<double> bob{0, 0};
    std::vector<double> charlie{0, 0};
    bool random_frames = false;
    double max_phase = 1.4;
    double true_offset = 0.3;
    double clock_base = 0;
    double omega = 1;
    std::string rounds = "2";
    std::string mode = "montecarlo";
    std::string delay_party = "bob";
    double start_reading = 10;
    double round_period = 10;
};

harness::Scenario make_scenario(const E2eOpts& o, const Globals& g) {
    harness::Scenario s;
    s.pairs = as_count(o.n_pairs, "--n-pairs");
    s.channel = {o.latency, o.jitter, o.p};
    auto frame = [](const std::vector<double>& v, const char* what) {
        if (v.size() != 2) throw ConfigError(std::string(what) + " takes two angles");
        return frames::BasisFrame{v[0], v[1]};
    };
    s.alice = frame(o.alice, "--alice-frame");
    s.bob = frame(o.bob, "--bob-frame");
    s.charlie = frame(o.charlie, "--charlie-frame");
    s.true_offset = o.true_offset;
    s.clock_base = o.clock_base;
    s.omega = o.omega;
    if (o.rounds != "auto") {
        int r = 0;
        auto [ptr, ec] = std::from_chars(o.rounds.data(), o.rounds.data() + o.rounds.size(), r);
        if (ec != std::errc() || ptr != o.rounds.data() + o.rounds.size())
            throw ConfigError("--rounds must be an integer or 'auto'");
        s.rounds = r;
    }
    s.mode = o.mode == "analytic" ? purify::Mode::Analytic : purify::Mode::MonteCarlo;
    s.delay_party = o.delay_party == "alice" ? harness::DelayParty::Alice : harness::DelayParty::Bob;
    s.seed = g.seed;
    s.start_reading = o.start_reading;
    s.round_period = o.round_period;
    if (o.random_frames) {
        // Rejection-sample frames until the arriving phase stays within --max-phase.
        if (!(o.max_phase > 0)) throw ConfigError("--max-phase must be positive");
        Rng rng(derive_seed(g.seed, 0x6672616d6573ULL));
        auto angle = [&] { return (2 * rng.uniform() - 1) * std::numbers::pi; };
        for (int tries = 0;; ++tries) {
            if (tries == 100000) throw PreconditionError("no frame draw satisfies --max-phase");
            s.alice = {angle(), angle()};
            s.bob = {angle(), angle()};
            s.charlie = {angle(), angle()};
            if (std::abs(frames::wrap_angle(s.effective_phase())) < o.max_phase) break;
        }
    }
    s.validate();
    return s;
}

Output e2e_cmd(const E2eOpts& o, const Globals& g) {
    const auto s = make_scenario(o, g);
    const auto r = harness::run_scenario(s);
    Output out;
    Table t{"", {"index", "sender", "receiver", "send_time", "deliver_time", "kind", "size"}, {}};
    for (std::size_t i = 0; i < r.messages.size(); ++i) {
        const auto& m = r.messages[i];
        t.rows.push_back({static_cast<std::int64_t>(i), std::string(harness::to_string(m.sender)),
                          std::string(harness::to_string(m.receiver)), m.send_time, m.deliver_time,
                          std::string(harness::payload_kind(m.payload)),
                          static_cast<std::int64_t>(harness::payload_text(m.payload).size())});
    }
    out.tables.push_back(std::move(t));
    const auto fw = harness::scan_message_log(r.messages, s);
    out.summary = {{"rounds", std::int64_t{r.rounds}},
                   {"initial_fidelity", r.initial_fidelity},
                   {"final_fidelity", r.trajectory.final_round().fidelity},
                   {"pairs_used", r.estimate.pairs},
                   {"estimated_offset", r.estimated_offset},
                   {"true_offset", r.true_offset},
                   {"offset_error", r.estimated_offset - r.true_offset},
                   {"dt_total", r.budget.dt_total},
                   {"branch_ok", std::string(r.branch_ok ? "true" : "false")},
                   {"firewall_clean", std::string(fw.clean ? "true" : "false")}};
    out.report = harness::to_json(r);
    out.report["firewall_clean"] = fw.clean;
    return out;
}

// ------------------------------------------------------------ Config file

std::vector<std::string> tokens_for(const ordered_json& v, const std::string& key) {
    auto scalar = [&](const ordered_json& x) -> std::string {
        if (x.is_string()) return x.get<std::string>();
        if (x.is_number_integer()) return std::to_string(x.get<std::int64_t>());
        if (x.is_number_unsigned()) return std::to_string(x.get<std::uint64_t>());
        if (x.is_number_float()) return format_double(x.get<double>());
        throw ConfigError("config key '" + key + "' has an unsupported value");
    };
    if (v.is_array()) {
        std::vector<std::string> out;
        for (const auto& x : v) out.push_back(scalar(x));
        return out;
    }
    return {scalar(v)};
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

// Appends file values for keys not given as flags. Throws ConfigError on
// unknown keys.
std::vector<std::string> merge_config(std::vector<std::string> args, const CLI::App& app) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    const CLI::App* sub = nullptr;
    for (const auto& a : args) {
        if (a.empty() || a[0] == '-') continue;
        for (const auto* s : app.get_subcommands([](const CLI::App*) { return true; }))
            if (s->get_name() == a) sub = s;
        if (sub) break;
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    ordered_json cfg;
    try {
        cfg = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        const bool known = key != "config" && (app.get_option_no_throw(flag) != nullptr ||
                                                (sub && sub->get_option_no_throw(flag) != nullptr));
        if (!known) throw ConfigError("unknown config key '" + key + "'");
        if (given_on_command_line(args, flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
            continue;
        }
        args.push_back(flag);
        for (auto& t : tokens_for(value, key)) args.push_back(std::move(t));
    }
    return args;
}

ordered_json resolved_config(const CLI::App& app, const CLI::App& sub) {
    ordered_json j;
    auto collect = [&](const CLI::App& a) {
        for (const auto* opt : a.get_options()) {
            const std::string name = opt->get_single_name();
            if (name == "help" || name == "config") continue;
            const auto& res = opt->results();
            if (res.empty()) {
                j[name] = opt->get_default_str();
            } else if (res.size() == 1) {
                j[name] = res[0];
            } else {
                j[name] = res;
            }
        }
    };
    collect(app);
    collect(sub);
    return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Frame-independent entanglement clock synchronization: simulations and budgets"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--out", g.out, "Output path (default stdout)");
    app.add_option("--config", g.config, "JSON file with flat keys named like the flags");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for sweeps")->check(CLI::Range(1u, 256u))->capture_default_str();

    TwirlCheckOpts tw;
    auto* c_tw = app.add_subcommand("twirl-check", "Closed-form vs numerical twirl on a (p, phi) grid");
    c_tw->add_option("--grid", tw.grid, "Grid points per axis")->capture_default_str();

    PurifyOpts pu;
    auto* c_pu = app.add_subcommand("purify", "Purification trajectory from Werner(F0) inputs");
    c_pu->add_option("--f0", pu.f0)->capture_default_str();
    c_pu->add_option("--n-pairs", pu.n_pairs)->capture_default_str();
    c_pu->add_option("--rounds", pu.rounds)->capture_default_str();
    c_pu->add_option("--mode", pu.mode)->check(CLI::IsMember({"analytic", "montecarlo", "both"}))->capture_default_str();
    c_pu->add_option("--yield", pu.yield)->check(CLI::IsMember({"ideal", "realistic"}))->capture_default_str();

    QcsOpts qo;
    auto* c_qcs = app.add_subcommand("qcs", "Repeated clock-synchronization trials");
    c_qcs->add_option("--m", qo.m, "Pairs per trial")->capture_default_str();
    c_qcs->add_option("--omega", qo.omega)->capture_default_str();
    c_qcs->add_option("--t-true", qo.t_true)->capture_default_str();
    c_qcs->add_option("--epsilon", qo.epsilon)->capture_default_str();
    c_qcs->add_option("--trials", qo.trials)->capture_default_str();
    c_qcs->add_option("--method", qo.method)->check(CLI::IsMember({"auto", "per-qubit", "binomial"}))->capture_default_str();

    BudgetOpts bo;
    auto* c_bu = app.add_subcommand("budget", "Error budget dt(n) curves and optimized dt vs N");
    c_bu->add_option("--f0", bo.f0)->capture_default_str();
    c_bu->add_option("--n-pairs", bo.n_pairs)->capture_default_str();
    c_bu->add_option("--inv-omega-ps", bo.inv_omega_ps, "1/omega in picoseconds")->capture_default_str();
    c_bu->add_option("--n-max", bo.n_max)->capture_default_str();
    c_bu->add_flag("--optimized", bo.optimized, "Emit n* and dt* per (N, F0)");
    c_bu->add_option("--sweep-min", bo.sweep_min)->capture_default_str();
    c_bu->add_option("--sweep-max", bo.sweep_max)->capture_default_str();
    c_bu->add_option("--sweep-points", bo.sweep_points, "Log-spaced N values replacing --n-pairs")->capture_default_str();

    E2eOpts eo;
    auto* c_e2e = app.add_subcommand("e2e", "End-to-end protocol run");
    c_e2e->add_option("--n-pairs", eo.n_pairs)->capture_default_str();
    c_e2e->add_option("--p", eo.p, "Depolarizing probability")->capture_default_str();
    c_e2e->add_option("--latency", eo.latency, "Channel latency, s")->capture_default_str();
    c_e2e->add_option("--jitter", eo.jitter, "Classical latency jitter, s")->capture_default_str();
    c_e2e->add_option("--alice-frame", eo.alice, "theta0 theta1")->expected(2)->capture_default_str();
    c_e2e->add_option("--bob-frame", eo.bob, "theta0 theta1")->expected(2)->capture_default_str();
    c_e2e->add_option("--charlie-frame", eo.charlie, "theta0 theta1")->expected(2)->capture_default_str();
    c_e2e->add_flag("--random-frames", eo.random_frames, "Draw all frames from the seed");
    c_e2e->add_option("--max-phase", eo.max_phase, "Bound on |phi| for --random-frames")->capture_default_str();
    c_e2e->add_option("--true-offset", eo.true_offset, "Alice's clock minus Bob's, s")->capture_default_str();
    c_e2e->add_option("--clock-base", eo.clock_base, "Alice's clock minus reference, s")->capture_default_str();
    c_e2e->add_option("--omega", eo.omega)->capture_default_str();
    c_e2e->add_option("--rounds", eo.rounds, "Integer or 'auto'")->capture_default_str();
    c_e2e->add_option("--mode", eo.mode)->check(CLI::IsMember({"analytic", "montecarlo"}))->capture_default_str();
    c_e2e->add_option("--delay-party", eo.delay_party)->check(CLI::IsMember({"alice", "bob"}))->capture_default_str();
    c_e2e->add_option("--start-reading", eo.start_reading)->capture_default_str();
    c_e2e->add_option("--round-period", eo.round_period)->capture_default_str();

    try {
        auto args = merge_config(raw_args, app);
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? kOk : kConfigError;
        }

        const CLI::App* sub = app.get_subcommands().front();
        Output result;
        if (sub == c_tw) result = twirl_check(tw, g);
        else if (sub == c_pu) result = purify_cmd(pu, g);
        else if (sub == c_qcs) result = qcs_cmd(qo, g);
        else if (sub == c_bu) result = budget_cmd(bo, g);
        else result = e2e_cmd(eo, g);

        const auto config = resolved_config(app, *sub);
        std::ofstream file;
        if (!g.out.empty()) {
            file.open(g.out);
            if (!file) throw ConfigError("cannot open output file " + g.out);
        }
        std::ostream& os = g.out.empty() ? out : file;
        if (g.format == "json") {
            write_json(os, sub->get_name(), config, result);
        } else {
            write_csv(os, "qcsync " + sub->get_name() + " " + config.dump(), result);
        }
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const PreconditionError& e) {
        err << "precondition refused: " << e.what() << '\n';
        return kPreconditionRefused;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

}  // namespace qcsync::cli
