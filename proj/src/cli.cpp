#include "pfdyn/cli.hpp"

#include "pfdyn/attraction.hpp"
#include "pfdyn/bundle.hpp"
#include "pfdyn/config.hpp"
#include "pfdyn/errors.hpp"
#include "pfdyn/record_io.hpp"
#include "pfdyn/snapshot.hpp"
#include "pfdyn/stationary.hpp"
#include "pfdyn/verifiers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace pfdyn {

namespace {

// ------------------------------------------------------------------ lockfile

class DirLock {
public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
        fs::create_directories(dir);
        for (int attempt = 0; attempt < 2; ++attempt) {
            const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
            if (fd >= 0) {
                const std::string pid = std::to_string(::getpid()) + "\n";
                const ssize_t written = ::write(fd, pid.data(), pid.size());
                ::close(fd);
                if (written != static_cast<ssize_t>(pid.size())) {
                    throw IoError("cannot write lockfile " + path_.string());
                }
                held_ = true;
                return;
            }
            if (errno != EEXIST) throw IoError("cannot create lockfile " + path_.string());
            long owner = 0;
            std::ifstream in(path_);
            in >> owner;
            if (owner > 0 && (::kill(static_cast<pid_t>(owner), 0) == 0 || errno == EPERM)) {
                throw IoError("output directory " + dir.string() + " is locked by process " +
                              std::to_string(owner));
            }
            std::error_code ec;
            fs::remove(path_, ec);  // stale lock of a dead process
        }
        throw IoError("cannot acquire lockfile " + path_.string());
    }
    ~DirLock() {
        if (held_) {
            std::error_code ec;
            fs::remove(path_, ec);
        }
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    fs::path path_;
    bool held_ = false;
};

// ------------------------------------------------------------------- reports

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const LyapunovReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["energy_initial"] = number(r.energy_initial);
    j["energy_final"] = number(r.energy_final);
    j["total_decay"] = number(r.total_decay);
    j["max_uptick"] = number(r.max_uptick);
    j["first_violation"] = r.first_violation;
    j["violation_count"] = r.violations.size();
    j["dissipation_integral"] = number(r.dissipation_integral);
    j["balance_defect"] = number(r.balance_defect);
    j["guaranteed_dissipation"] = number(r.guaranteed_dissipation);
    j["dissipation_bounded"] = r.dissipation_bounded;
    return j;
}

json to_json(const RegularizationReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["t_star"] = number(r.t_star);
    j["tail_start"] = number(r.tail_start);
    j["note"] = r.note;
    json q = json::array();
    for (const auto& e : r.quantities) {
        q.push_back({{"name", e.name},
                     {"initial", number(e.initial)},
                     {"global_sup", number(e.global_sup)},
                     {"tail_sup", number(e.tail_sup)},
                     {"onset", number(e.onset)}});
    }
    j["quantities"] = q;
    return j;
}

json to_json(const HolderReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["c"] = number(r.c);
    j["exponent"] = number(r.exponent);
    j["note"] = r.note;
    json g = json::array();
    for (const auto& x : r.gaps) {
        g.push_back({{"gap", number(x.gap)},
                     {"mean_distance", number(x.mean_distance)},
                     {"max_ratio", number(x.max_ratio)},
                     {"samples", x.samples}});
    }
    j["gaps"] = g;
    return j;
}

json to_json(const ContractionReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["min_c5"] = number(r.min_c5);
    j["max_gronwall_ratio"] = number(r.max_gronwall_ratio);
    j["balance_ok"] = r.balance_ok;
    j["max_balance_excess"] = number(r.max_balance_excess);
    j["rows"] = r.rows.size();
    if (!r.rows.empty()) {
        j["n_initial"] = number(r.n_total(0));
        j["n_final"] = number(r.n_total(r.rows.size() - 1));
    }
    return j;
}

json to_json(const SqueezingReport& r) {
    json j;
    j["ell"] = r.ell;
    j["modes"] = r.modes;
    j["gamma"] = r.gamma;
    j["c"] = number(r.c);
    j["certified"] = r.certified;
    json p = json::array();
    for (const auto& x : r.pairs) {
        p.push_back({{"shifted", number(x.shifted)},
                     {"original", number(x.original)},
                     {"projected", number(x.projected)},
                     {"c", number(x.c)}});
    }
    j["pairs"] = p;
    return j;
}

json to_json(const AttractionReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["kappa"] = number(r.kappa);
    j["log_prefactor"] = number(r.log_prefactor);
    j["r_squared"] = number(r.r_squared);
    j["floor_censored"] = r.floor_censored;
    j["monotone"] = r.monotone;
    j["fit_points"] = r.fit_points;
    json t = json::array(), d = json::array();
    for (double x : r.times) t.push_back(number(x));
    for (double x : r.distances) d.push_back(number(x));
    j["times"] = t;
    j["distances"] = d;
    return j;
}

json failure_json(const FailureRecord& f) {
    return {{"step", f.step},
            {"t", number(f.time)},
            {"last_residual", number(f.last_residual)},
            {"min_theta", number(f.min_theta)},
            {"message", f.message}};
}

/// Every "verdict" value keyed by its JSON path.
void collect_verdicts(const json& j, const std::string& path, std::map<std::string, std::string>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (k == "verdict" && v.is_string()) {
                out[path + "/verdict"] = v.get<std::string>();
            } else {
                collect_verdicts(v, path + "/" + k, out);
            }
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            collect_verdicts(j[i], path + "/" + std::to_string(i), out);
        }
    }
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + p.string());
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("corrupt " + p.string() + ": " + e.what());
    }
}

// ----------------------------------------------------------------- records

TrajectoryRecord load_record(const fs::path& dir, const std::shared_ptr<const Discretization>& disc) {
    StoredRecord stored = read_ndjson(dir / "diagnostics.ndjson");
    TrajectoryRecord rec;
    rec.initial = stored.initial;
    rec.rows = std::move(stored.rows);
    rec.failure = stored.failure;
    for (const auto& base : list_step_files(dir / "snapshots")) {
        LoadedState ls = read_state_file(base, disc);
        rec.snapshots.push_back(Snapshot{ls.step, std::move(ls.state)});
    }
    return rec;
}

void save_record(const fs::path& dir, const TrajectoryRecord& rec) {
    fs::create_directories(dir / "snapshots");
    write_ndjson(dir / "diagnostics.ndjson", rec);
    for (const auto& s : rec.snapshots) {
        write_state_file(step_file_base(dir / "snapshots", s.step), s.state, s.step);
    }
}

json run_report(const TrajectoryRecord& rec, const RunConfig& cfg) {
    json j;
    j["kind"] = "run";
    const LyapunovReport ly = check_lyapunov(rec, 1e-8, cfg.step.newton_tol, cfg.potential.lambda);
    const RegularizationReport reg = regularization_report(rec);
    j["lyapunov"] = to_json(ly);
    j["regularization"] = to_json(reg);
    bool failed = ly.verdict == Verdict::fail || reg.verdict == Verdict::fail;
    if (rec.snapshots.size() >= 3) {
        HolderReport h;
        try {
            h = holder_in_time_check(rec, reg.t_star);
        } catch (const DomainError& e) {
            h.note = e.what();
        }
        j["holder"] = to_json(h);
        failed = failed || h.verdict == Verdict::fail;
    }
    if (rec.failure) {
        j["failure"] = failure_json(*rec.failure);
        failed = true;
    }
    j["verdict"] = failed ? "fail" : "pass";
    return j;
}

json bundle_report(const std::vector<TrajectoryRecord>& records,
                   const std::vector<Equilibrium>& catalog, const RunConfig& cfg,
                   const Potential& potential, double radius) {
    json j;
    j["kind"] = "bundle";
    j["radius"] = radius;
    bool failed = false;

    json members = json::array();
    std::vector<double> t_star(records.size(), 0.0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        json m;
        const LyapunovReport ly = check_lyapunov(rec, 1e-8, cfg.step.newton_tol, cfg.potential.lambda);
        const RegularizationReport reg = regularization_report(rec);
        t_star[i] = reg.t_star;
        HolderReport h;
        try {
            h = holder_in_time_check(rec, reg.t_star);
        } catch (const DomainError& e) {
            h.note = e.what();
        }
        m["lyapunov"] = to_json(ly);
        m["regularization"] = to_json(reg);
        m["holder"] = to_json(h);
        if (rec.failure) m["failure"] = failure_json(*rec.failure);
        failed = failed || ly.verdict == Verdict::fail || reg.verdict == Verdict::fail ||
                 h.verdict == Verdict::fail || rec.failure.has_value();
        members.push_back(m);
    }
    j["members"] = members;

    json pairs = json::array();
    std::vector<std::pair<const TrajectoryRecord*, const TrajectoryRecord*>> pair_ptrs;
    for (std::size_t a = 0; a < records.size(); ++a) {
        for (std::size_t b = a + 1; b < records.size(); ++b) {
            json p;
            p["pair"] = {a, b};
            try {
                const ContractionReport c =
                    contraction_check(records[a], records[b], potential, cfg.bundle.contraction_tol);
                p["contraction"] = to_json(c);
                failed = failed || c.verdict == Verdict::fail;
                pair_ptrs.emplace_back(&records[a], &records[b]);
            } catch (const DimensionError& e) {
                p["contraction"] = {{"verdict", "inconclusive"}, {"note", e.what()}};
            }
            pairs.push_back(p);
        }
    }
    j["contraction"] = pairs;

    try {
        j["squeezing"] = to_json(squeezing_probe(pair_ptrs, cfg.bundle.ell,
                                                 cfg.bundle.squeeze_modes, cfg.bundle.gamma));
    } catch (const Error& e) {
        j["squeezing"] = {{"note", e.what()}};
    }

    if (catalog.empty()) {
        j["attraction"] = {{"verdict", "inconclusive"}, {"note", "empty equilibrium catalog"}};
    } else {
        try {
            AttractionOptions ao;
            ao.tail_fraction = cfg.bundle.tail_fraction;
            const AttractionReport a = attraction_fit(records, catalog, ao);
            j["attraction"] = to_json(a);
            failed = failed || a.verdict == Verdict::fail;
        } catch (const Error& e) {
            j["attraction"] = {{"verdict", "inconclusive"}, {"note", e.what()}};
        }
    }
    json labels = json::array();
    for (const auto& e : catalog) labels.push_back(e.label);
    j["catalog"] = labels;
    j["verdict"] = failed ? "fail" : "pass";
    return j;
}

// ------------------------------------------------------------- subcommands

struct Options {
    std::string config;
    std::string out;
    std::string resume;
    int workers = 1;
    std::optional<std::uint64_t> seed;
    long stop_after = -1;
};

RunConfig effective_config(const Options& o, std::ostream& err) {
    if (o.config.empty()) throw ConfigError("--config is required for this subcommand");
    RunConfig cfg = load_config(o.config);
    if (o.seed) cfg.run.seed = *o.seed;
    for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";
    return cfg;
}

void require_out(const Options& o) {
    if (o.out.empty()) throw ConfigError("--out is required");
}

void print_report_summary(const json& report, std::ostream& out) {
    std::map<std::string, std::string> verdicts;
    collect_verdicts(report, "", verdicts);
    for (const auto& [path, v] : verdicts) out << "  " << path << ": " << v << "\n";
}

/// Steps from `state` and streams rows, snapshots and checkpoints into `dir`.
/// Returns the exit code.
int continue_run(const fs::path& dir, const RunConfig& cfg, Stepper& stepper, const State& state,
                 long first_step, double integral, long stop_after, std::ostream& out,
                 std::ostream& err) {
    NdjsonWriter writer(dir / "diagnostics.ndjson", true);
    const fs::path snaps = dir / "snapshots";
    const fs::path ckpts = dir / "checkpoints";
    RunOptions ro;
    ro.lp_exponent = cfg.metric.p;
    ro.first_step = first_step;
    ro.dissipation_integral = integral;
    ro.max_steps = stop_after;

    State last = state;
    long last_step = first_step;
    auto sink = [&](const DiagnosticsRow& row, const State& s) {
        writer.write_row(row, "step");
        if (cfg.run.snapshot_every > 0 && row.step % cfg.run.snapshot_every == 0) {
            write_state_file(step_file_base(snaps, row.step), s, row.step, row.dissipation_integral);
        }
        if (cfg.run.checkpoint_every > 0 && row.step % cfg.run.checkpoint_every == 0) {
            write_state_file(step_file_base(ckpts, row.step), s, row.step, row.dissipation_integral);
        }
        last = s;
        last_step = row.step;
    };

    std::optional<FailureRecord> failure;
    try {
        last = run(stepper, state, cfg.run.t_end, sink, ro);
    } catch (const StepFailure& f) {
        failure = FailureRecord{last_step + 1, f.time(), f.last_residual(), f.min_theta(), f.what()};
        writer.write_failure(*failure);
        err << "error: " << f.what() << "\n";
    }

    const double eps_t = 1e-12 * std::max(1.0, std::abs(cfg.run.t_end));
    if (!failure && cfg.run.t_end - last.time > eps_t) {
        out << "stopped after step " << last_step << " at t = " << last.time << "\n";
        return exit_code::ok;
    }

    const StoredRecord stored = read_ndjson(dir / "diagnostics.ndjson");
    if (!failure) {
        const double integral_end =
            stored.rows.empty() ? stored.initial.dissipation_integral : stored.rows.back().dissipation_integral;
        write_state_file(dir / "final", last, last_step, integral_end);
    }
    if (cfg.run.csv) write_csv(dir / "diagnostics.csv", stored.initial, stored.rows);

    const TrajectoryRecord rec = load_record(dir, stepper.discretization_ptr());
    const json report = run_report(rec, cfg);
    write_json(dir / "report.json", report);
    out << "run finished: " << rec.rows.size() << " steps, t = " << rec.end_time()
        << ", energy " << rec.initial.energy.total << " -> "
        << (rec.rows.empty() ? rec.initial.energy.total : rec.rows.back().energy.total) << "\n";
    print_report_summary(report, out);
    if (failure) return exit_code::run_failure;
    return report["verdict"] == "pass" ? exit_code::ok : exit_code::verification_failure;
}

void clear_run_outputs(const fs::path& dir) {
    for (const char* f : {"diagnostics.ndjson", "diagnostics.csv", "report.json", "final.bin",
                          "final.json"}) {
        fs::remove(dir / f);
    }
    fs::remove_all(dir / "snapshots");
    fs::remove_all(dir / "checkpoints");
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
    RunConfig cfg = effective_config(o, err);
    require_out(o);
    const fs::path dir = o.out;
    DirLock lock(dir);
    clear_run_outputs(dir);
    fs::create_directories(dir / "snapshots");
    fs::create_directories(dir / "checkpoints");
    {
        std::ofstream c(dir / "config.ini", std::ios::trunc);
        c << cfg.to_ini();
    }

    auto disc = make_discretization(cfg.grid.dim, cfg.grid.extent, cfg.grid.n);
    const State s0 = make_initial_state(disc, cfg.initial, cfg.run.seed);
    Stepper stepper(disc, cfg.potential.build(), cfg.step);
    {
        NdjsonWriter w(dir / "diagnostics.ndjson", false);
        w.write_row(initial_row(s0, stepper.potential(), cfg.metric.p), "initial");
    }
    if (cfg.run.snapshot_every > 0) write_state_file(step_file_base(dir / "snapshots", 0), s0, 0, 0.0);
    if (cfg.run.checkpoint_every > 0) write_state_file(step_file_base(dir / "checkpoints", 0), s0, 0, 0.0);
    return continue_run(dir, cfg, stepper, s0, 0, 0.0, o.stop_after, out, err);
}

int cmd_resume(const Options& o, std::ostream& out, std::ostream& err) {
    require_out(o);
    const fs::path dir = o.out;
    Options with_config = o;
    if (with_config.config.empty()) with_config.config = (dir / "config.ini").string();
    with_config.seed.reset();
    const RunConfig cfg = effective_config(with_config, err);
    DirLock lock(dir);

    fs::path ckpt;
    if (!o.resume.empty()) {
        ckpt = o.resume;
    } else {
        const auto all = list_step_files(dir / "checkpoints");
        if (all.empty()) throw IoError("no checkpoint found in " + (dir / "checkpoints").string());
        ckpt = all.back();
    }
    auto disc = make_discretization(cfg.grid.dim, cfg.grid.extent, cfg.grid.n);
    LoadedState loaded;
    try {
        loaded = read_state_file(ckpt, disc);
    } catch (const DimensionError& e) {
        throw ConfigError(std::string("checkpoint does not match the configuration: ") + e.what());
    }

    truncate_ndjson(dir / "diagnostics.ndjson", loaded.step);
    for (const auto& base : list_step_files(dir / "snapshots")) {
        if (read_state_file(base, disc).step > loaded.step) {
            fs::remove(fs::path(base.string() + ".bin"));
            fs::remove(fs::path(base.string() + ".json"));
        }
    }
    for (const char* f : {"report.json", "final.bin", "final.json", "diagnostics.csv"}) fs::remove(dir / f);

    out << "resuming from step " << loaded.step << " at t = " << loaded.state.time << "\n";
    Stepper stepper(disc, cfg.potential.build(), cfg.step);
    return continue_run(dir, cfg, stepper, loaded.state, loaded.step, loaded.dissipation_integral,
                        o.stop_after, out, err);
}

int cmd_equilibria(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = effective_config(o, err);
    require_out(o);
    const fs::path dir = o.out;
    DirLock lock(dir);
    fs::remove_all(dir / "catalog");
    fs::create_directories(dir / "catalog");

    auto disc = make_discretization(cfg.grid.dim, cfg.grid.extent, cfg.grid.n);
    const Potential potential = cfg.potential.build();
    const auto catalog = build_catalog(*disc, potential, cfg.catalog);
    json manifest = json::array();
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        const auto& e = catalog[i];
        char name[32];
        std::snprintf(name, sizeof name, "eq_%02zu", i);
        const State s = equilibrium_state(disc, e);
        write_state_file(dir / "catalog" / name, s);
        manifest.push_back({{"index", i},
                            {"file", name},
                            {"label", e.label},
                            {"stability", e.stability},
                            {"smallest_eigenvalue", e.smallest_eigenvalue},
                            {"residual_norm", e.residual_norm},
                            {"energy", energy(s, potential).total}});
        out << name << "  " << e.label << "  " << e.stability << "  residual " << e.residual_norm
            << "  energy " << energy(s, potential).total << "\n";
    }
    write_json(dir / "catalog" / "manifest.json", manifest);
    if (catalog.empty()) {
        err << "error: no equilibrium converged from the configured seeds\n";
        return exit_code::run_failure;
    }
    return exit_code::ok;
}

int cmd_bundle(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = effective_config(o, err);
    require_out(o);
    const fs::path dir = o.out;
    DirLock lock(dir);
    {
        std::ofstream c(dir / "config.ini", std::ios::trunc);
        c << cfg.to_ini();
    }

    auto disc = make_discretization(cfg.grid.dim, cfg.grid.extent, cfg.grid.n);
    const Potential potential = cfg.potential.build();
    const State reference = make_initial_state(disc, cfg.initial, cfg.run.seed);
    const Bundle bundle = perturbed_bundle(reference, cfg.bundle.members, cfg.bundle.radius,
                                           cfg.run.seed + 1, potential, cfg.metric, cfg.bundle.modes);
    TrajectoryOptions to;
    to.t_end = cfg.run.t_end;
    to.snapshot_every = std::max<long>(1, cfg.run.snapshot_every);
    to.lp_exponent = cfg.metric.p;
    const auto records = run_bundle(bundle.members, potential, cfg.step, to, o.workers);

    write_state_file(dir / "reference", reference);
    for (std::size_t i = 0; i < records.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "member_%02zu", i);
        fs::remove_all(dir / name);
        save_record(dir / name, records[i]);
    }
    write_json(dir / "bundle.json", {{"members", records.size()}, {"radius", bundle.radius}});

    const auto catalog = build_catalog(*disc, potential, cfg.catalog);
    const json report = bundle_report(records, catalog, cfg, potential, bundle.radius);
    write_json(dir / "report.json", report);
    out << "bundle of " << records.size() << " members, radius " << bundle.radius << "\n";
    print_report_summary(report, out);
    for (const auto& r : records) {
        if (r.failure) return exit_code::run_failure;
    }
    return report["verdict"] == "pass" ? exit_code::ok : exit_code::verification_failure;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
    require_out(o);
    const fs::path dir = o.out;
    Options with_config = o;
    if (with_config.config.empty()) with_config.config = (dir / "config.ini").string();
    with_config.seed.reset();
    const RunConfig cfg = effective_config(with_config, err);
    auto disc = make_discretization(cfg.grid.dim, cfg.grid.extent, cfg.grid.n);
    const Potential potential = cfg.potential.build();

    json recomputed;
    if (fs::exists(dir / "bundle.json")) {
        const json meta = read_json(dir / "bundle.json");
        const std::size_t count = meta.at("members").get<std::size_t>();
        std::vector<TrajectoryRecord> records;
        for (std::size_t i = 0; i < count; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "member_%02zu", i);
            records.push_back(load_record(dir / name, disc));
        }
        const auto catalog = build_catalog(*disc, potential, cfg.catalog);
        recomputed = bundle_report(records, catalog, cfg, potential, meta.at("radius").get<double>());
    } else {
        recomputed = run_report(load_record(dir, disc), cfg);
    }

    std::map<std::string, std::string> now, before;
    collect_verdicts(recomputed, "", now);
    bool mismatch = false;
    if (fs::exists(dir / "report.json")) {
        collect_verdicts(read_json(dir / "report.json"), "", before);
        mismatch = now != before;
    } else {
        err << "warning: no stored report.json to compare against\n";
    }
    print_report_summary(recomputed, out);
    if (mismatch) {
        out << "verdicts differ from the stored report\n";
        return exit_code::verification_failure;
    }
    out << "verdicts match the stored report\n";
    return recomputed["verdict"] == "pass" ? exit_code::ok : exit_code::verification_failure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Penrose-Fife phase-transition simulator and verification lab", "pfdyn"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    std::uint64_t seed = 0;
    app.add_option("--config", o.config, "configuration file (INI)");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--resume", o.resume, "checkpoint to resume from (default: latest)");
    app.add_option("--workers", o.workers, "worker threads for bundles")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized recipes");
    app.add_option("--stop-after", o.stop_after, "stop after N steps without finishing")->group("");

    auto* run_cmd = app.add_subcommand("run", "integrate one trajectory");
    auto* resume_cmd = app.add_subcommand("resume", "continue a run from a checkpoint");
    auto* eq_cmd = app.add_subcommand("equilibria", "build the equilibrium catalog");
    auto* bundle_cmd = app.add_subcommand("bundle", "run an ensemble and all verifiers");
    auto* verify_cmd = app.add_subcommand("verify", "re-run verifiers on stored records");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_code::config_error;
    }
    if (*seed_opt) o.seed = seed;

    try {
        if (*run_cmd) return cmd_run(o, out, err);
        if (*resume_cmd) return cmd_resume(o, out, err);
        if (*eq_cmd) return cmd_equilibria(o, out, err);
        if (*bundle_cmd) return cmd_bundle(o, out, err);
        if (*verify_cmd) return cmd_verify(o, out, err);
    } catch (const ConfigError& e) {
        err << "configuration error:\n";
        for (const auto& v : e.violations()) err << "  - " << v << "\n";
        return exit_code::config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::run_failure;
    }
    return exit_code::config_error;
}

}  // namespace pfdyn
