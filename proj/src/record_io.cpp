#include "pfdyn/record_io.hpp"

#include "pfdyn/errors.hpp"

#include <json.hpp>

#include <cstdio>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace pfdyn {

namespace {

json row_json(const DiagnosticsRow& r, const char* kind) {
    json j;
    j["kind"] = kind;
    j["step"] = r.step;
    j["t"] = r.t;
    j["dt"] = r.dt;
    j["energy"] = r.energy.total;
    j["energy_entropy"] = r.energy.entropy;
    j["energy_quadratic"] = r.energy.quadratic;
    j["energy_gradient"] = r.energy.gradient;
    j["energy_potential"] = r.energy.potential;
    j["dissipation"] = r.dissipation;
    j["dissipation_integral"] = r.dissipation_integral;
    j["theta_min"] = r.theta_min;
    j["theta_max"] = r.theta_max;
    j["theta_lp"] = r.theta_lp;
    j["theta_v"] = r.theta_v;
    j["inv_theta_v"] = r.inv_theta_v;
    j["inv_theta_linf"] = r.inv_theta_linf;
    j["chi_h2"] = r.chi_h2;
    j["chi_rate"] = r.chi_rate;
    j["flux_v0"] = r.flux_v0;
    j["newton_iterations"] = r.stats.newton_iterations;
    j["final_residual"] = r.stats.final_residual;
    j["damping_events"] = r.stats.damping_events;
    j["dt_used"] = r.stats.dt_used;
    j["min_theta_seen"] = r.stats.min_theta_seen;
    j["dt_halvings"] = r.stats.dt_halvings;
    return j;
}

DiagnosticsRow row_from(const json& j) {
    DiagnosticsRow r;
    r.step = j.at("step").get<long>();
    r.t = j.at("t").get<double>();
    r.dt = j.at("dt").get<double>();
    r.energy.total = j.at("energy").get<double>();
    r.energy.entropy = j.at("energy_entropy").get<double>();
    r.energy.quadratic = j.at("energy_quadratic").get<double>();
    r.energy.gradient = j.at("energy_gradient").get<double>();
    r.energy.potential = j.at("energy_potential").get<double>();
    r.dissipation = j.at("dissipation").get<double>();
    r.dissipation_integral = j.at("dissipation_integral").get<double>();
    r.theta_min = j.at("theta_min").get<double>();
    r.theta_max = j.at("theta_max").get<double>();
    r.theta_lp = j.at("theta_lp").get<double>();
    r.theta_v = j.at("theta_v").get<double>();
    r.inv_theta_v = j.at("inv_theta_v").get<double>();
    r.inv_theta_linf = j.at("inv_theta_linf").get<double>();
    r.chi_h2 = j.at("chi_h2").get<double>();
    r.chi_rate = j.at("chi_rate").get<double>();
    r.flux_v0 = j.at("flux_v0").get<double>();
    r.stats.newton_iterations = j.at("newton_iterations").get<int>();
    r.stats.final_residual = j.at("final_residual").get<double>();
    r.stats.damping_events = j.at("damping_events").get<int>();
    r.stats.dt_used = j.at("dt_used").get<double>();
    r.stats.min_theta_seen = j.at("min_theta_seen").get<double>();
    r.stats.dt_halvings = j.at("dt_halvings").get<int>();
    return r;
}

}  // namespace

std::string row_to_json_line(const DiagnosticsRow& row, const char* kind) {
    return row_json(row, kind).dump();
}

std::string failure_to_json_line(const FailureRecord& f) {
    json j;
    j["kind"] = "failure";
    j["step"] = f.step;
    j["t"] = f.time;
    j["last_residual"] = f.last_residual;
    j["min_theta"] = f.min_theta;
    j["message"] = f.message;
    return j.dump();
}

StoredRecord read_ndjson(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    StoredRecord rec;
    bool have_initial = false;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "initial") {
                rec.initial = row_from(j);
                have_initial = true;
            } else if (kind == "step") {
                rec.rows.push_back(row_from(j));
            } else if (kind == "failure") {
                FailureRecord f;
                f.step = j.at("step").get<long>();
                f.time = j.at("t").get<double>();
                f.last_residual = j.at("last_residual").get<double>();
                f.min_theta = j.at("min_theta").get<double>();
                f.message = j.at("message").get<std::string>();
                rec.failure = f;
            } else {
                throw IoError("unknown row kind '" + kind + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_initial) throw IoError(path.string() + ": no initial row");
    return rec;
}

NdjsonWriter::NdjsonWriter(const fs::path& path, bool append)
    : path_(path), out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
}

void NdjsonWriter::write_line(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw IoError("write failed for " + path_.string());
}

void NdjsonWriter::write_row(const DiagnosticsRow& row, const char* kind) {
    write_line(row_to_json_line(row, kind));
}

void NdjsonWriter::write_failure(const FailureRecord& failure) {
    write_line(failure_to_json_line(failure));
}

void truncate_ndjson(const fs::path& path, long max_step) {
    const StoredRecord rec = read_ndjson(path);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        NdjsonWriter w(tmp, false);
        w.write_row(rec.initial, "initial");
        for (const auto& r : rec.rows) {
            if (r.step <= max_step) w.write_row(r, "step");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

void write_csv(const fs::path& path, const DiagnosticsRow& initial,
               const std::vector<DiagnosticsRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const json header = row_json(initial, "initial");
    bool first = true;
    for (const auto& [key, value] : header.items()) {
        if (key == "kind") continue;
        out << (first ? "" : ",") << key;
        first = false;
    }
    out << '\n';
    auto emit = [&](const DiagnosticsRow& r) {
        const json j = row_json(r, "step");
        bool f = true;
        for (const auto& [key, value] : j.items()) {
            if (key == "kind") continue;
            out << (f ? "" : ",") << value.dump();
            f = false;
        }
        out << '\n';
    };
    emit(initial);
    for (const auto& r : rows) emit(r);
    if (!out) throw IoError("write failed for " + path.string());
}

void write_ndjson(const fs::path& path, const TrajectoryRecord& record) {
    NdjsonWriter w(path, false);
    w.write_row(record.initial, "initial");
    for (const auto& r : record.rows) w.write_row(r, "step");
    if (record.failure) w.write_failure(*record.failure);
}

}  // namespace pfdyn
