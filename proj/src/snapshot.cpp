#include "pfdyn/snapshot.hpp"

#include "pfdyn/errors.hpp"

#include <boost/crc.hpp>
#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace pfdyn {

std::uint32_t crc32(const void* data, std::size_t size) {
    boost::crc_32_type crc;
    crc.process_bytes(data, size);
    return crc.checksum();
}

namespace {

std::vector<unsigned char> encode(const Field& a, const Field& b) {
    std::vector<unsigned char> out(8 * static_cast<std::size_t>(a.size() + b.size()));
    std::size_t pos = 0;
    auto put = [&](double v) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) out[pos++] = static_cast<unsigned char>(bits >> (8 * i));
    };
    for (Eigen::Index i = 0; i < a.size(); ++i) put(a[i]);
    for (Eigen::Index i = 0; i < b.size(); ++i) put(b[i]);
    return out;
}

double decode(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

void write_atomically(const fs::path& target, const void* data, std::size_t size) {
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

fs::path snapshot_base(const fs::path& p) {
    if (p.extension() == ".bin" || p.extension() == ".json") {
        fs::path b = p;
        b.replace_extension();
        return b;
    }
    return p;
}

void write_state_file(const fs::path& base_in, const State& state, long step,
                      double dissipation_integral) {
    state.validate();
    const fs::path base = snapshot_base(base_in);
    const Grid& g = state.grid();
    const auto bytes = encode(state.theta, state.chi);

    nlohmann::ordered_json meta;
    meta["format"] = "pfdyn-state-1";
    meta["dim"] = g.dim();
    meta["extent"] = g.extent();
    meta["n"] = g.n();
    meta["time"] = state.time;
    meta["step"] = step;
    meta["dissipation_integral"] = dissipation_integral;
    meta["theta_count"] = state.theta.size();
    meta["chi_count"] = state.chi.size();
    meta["crc32"] = crc32(bytes.data(), bytes.size());

    fs::path bin = base;
    bin += ".bin";
    fs::path js = base;
    js += ".json";
    write_atomically(bin, bytes.data(), bytes.size());
    const std::string text = meta.dump(2) + "\n";
    write_atomically(js, text.data(), text.size());
}

LoadedState read_state_file(const fs::path& base_in, std::shared_ptr<const Discretization> disc) {
    const fs::path base = snapshot_base(base_in);
    fs::path bin = base;
    bin += ".bin";
    fs::path js = base;
    js += ".json";

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_all(js));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("corrupt snapshot sidecar " + js.string() + ": " + e.what());
    }
    const std::string bytes = read_all(bin);

    LoadedState out;
    int dim = 0, n = 0;
    double extent = 0.0, time = 0.0;
    std::size_t theta_count = 0, chi_count = 0;
    std::uint32_t crc = 0;
    try {
        dim = meta.at("dim").get<int>();
        extent = meta.at("extent").get<double>();
        n = meta.at("n").get<int>();
        time = meta.at("time").get<double>();
        out.step = meta.at("step").get<long>();
        out.dissipation_integral = meta.at("dissipation_integral").get<double>();
        theta_count = meta.at("theta_count").get<std::size_t>();
        chi_count = meta.at("chi_count").get<std::size_t>();
        crc = meta.at("crc32").get<std::uint32_t>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("incomplete snapshot sidecar " + js.string() + ": " + e.what());
    }
    if (bytes.size() != 8 * (theta_count + chi_count)) {
        throw IoError("snapshot " + bin.string() + " has " + std::to_string(bytes.size()) +
                      " bytes, sidecar expects " + std::to_string(8 * (theta_count + chi_count)));
    }
    if (crc32(bytes.data(), bytes.size()) != crc) {
        throw IoError("checksum mismatch in " + bin.string());
    }

    if (!disc) {
        disc = make_discretization(dim, extent, n);
    } else {
        const Grid& g = disc->grid();
        if (g.dim() != dim || g.extent() != extent || g.n() != n) {
            throw DimensionError("snapshot " + base.string() + " was written on a different grid");
        }
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    Field theta(static_cast<Eigen::Index>(theta_count));
    Field chi(static_cast<Eigen::Index>(chi_count));
    for (std::size_t i = 0; i < theta_count; ++i) theta[static_cast<Eigen::Index>(i)] = decode(p + 8 * i);
    p += 8 * theta_count;
    for (std::size_t i = 0; i < chi_count; ++i) chi[static_cast<Eigen::Index>(i)] = decode(p + 8 * i);
    try {
        out.state = make_state(std::move(disc), std::move(theta), std::move(chi), time);
    } catch (const Error& e) {
        throw IoError("snapshot " + base.string() + " holds an invalid state: " + e.what());
    }
    return out;
}

fs::path step_file_base(const fs::path& dir, long step) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%08ld", step);
    return dir / name;
}

std::vector<fs::path> list_step_files(const fs::path& dir) {
    std::vector<std::pair<long, fs::path>> found;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return {};
    for (const auto& entry : fs::directory_iterator(dir)) {
        const fs::path p = entry.path();
        if (p.extension() != ".json") continue;
        const std::string stem = p.stem().string();
        if (stem.rfind("step_", 0) != 0) continue;
        try {
            found.emplace_back(std::stol(stem.substr(5)), snapshot_base(p));
        } catch (const std::exception&) {
            continue;
        }
    }
    std::sort(found.begin(), found.end());
    std::vector<fs::path> out;
    for (auto& f : found) out.push_back(std::move(f.second));
    return out;
}

}  // namespace pfdyn
