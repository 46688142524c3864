#include "pfdyn/config.hpp"

#include "pfdyn/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace pfdyn {

Potential PotentialSpec::build() const {
    if (name == "double_well") return Potential::double_well();
    return Potential::polynomial(coefficients, lambda, name);
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"grid", {"dim", "extent", "n"}},
        {"potential", {"name", "coefficients", "lambda"}},
        {"step", {"dt", "newton_tol", "newton_max_iters", "theta_floor", "max_dt_halvings", "dt_cap"}},
        {"initial", {"recipe", "theta", "chi", "theta_amplitude", "chi_amplitude", "mode",
                     "theta_min", "theta_max", "modes", "path", "noise"}},
        {"run", {"t_end", "snapshot_every", "checkpoint_every", "seed", "csv"}},
        {"metric", {"p", "epsilon"}},
        {"bundle", {"members", "radius", "modes", "ell", "squeeze_modes", "gamma",
                    "tail_fraction", "contraction_tol"}},
        {"catalog", {"constants", "modes", "mode_amplitude", "tanh_widths", "dedupe_tol"}},
    };
    return keys;
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::vector<std::string>& errors) : tree_(tree), errors_(errors) {}

    const std::string* raw(const char* section, const char* key) const {
        const auto sec = tree_.get_child_optional(section);
        if (!sec) return nullptr;
        const auto val = sec->get_child_optional(pt::ptree::path_type(key, '\0'));
        return val ? &val->data() : nullptr;
    }

    void real(const char* section, const char* key, double& out) {
        const std::string* s = raw(section, key);
        if (!s) return;
        const std::string t = trim(*s);
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(t.c_str(), &end);
        if (t.empty() || *end != '\0' || errno == ERANGE) {
            bad(section, key, "a number", t);
            return;
        }
        out = v;
    }

    template <typename Int>
    void integer(const char* section, const char* key, Int& out) {
        const std::string* s = raw(section, key);
        if (!s) return;
        const std::string t = trim(*s);
        char* end = nullptr;
        errno = 0;
        const long long v = std::strtoll(t.c_str(), &end, 10);
        if (t.empty() || *end != '\0' || errno == ERANGE) {
            bad(section, key, "an integer", t);
            return;
        }
        out = static_cast<Int>(v);
    }

    void unsigned64(const char* section, const char* key, std::uint64_t& out) {
        const std::string* s = raw(section, key);
        if (!s) return;
        const std::string t = trim(*s);
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
        if (t.empty() || t[0] == '-' || *end != '\0' || errno == ERANGE) {
            bad(section, key, "a nonnegative integer", t);
            return;
        }
        out = v;
    }

    void boolean(const char* section, const char* key, bool& out) {
        const std::string* s = raw(section, key);
        if (!s) return;
        const std::string t = trim(*s);
        if (t == "true" || t == "yes" || t == "1") {
            out = true;
        } else if (t == "false" || t == "no" || t == "0") {
            out = false;
        } else {
            bad(section, key, "true or false", t);
        }
    }

    void text(const char* section, const char* key, std::string& out) {
        const std::string* s = raw(section, key);
        if (s) out = trim(*s);
    }

    void reals(const char* section, const char* key, std::vector<double>& out) {
        const std::string* s = raw(section, key);
        if (!s) return;
        std::string t = *s;
        for (char& c : t) {
            if (c == ',') c = ' ';
        }
        std::istringstream in(t);
        std::vector<double> v;
        std::string tok;
        while (in >> tok) {
            char* end = nullptr;
            const double x = std::strtod(tok.c_str(), &end);
            if (*end != '\0') {
                bad(section, key, "a list of numbers", trim(*s));
                return;
            }
            v.push_back(x);
        }
        out = std::move(v);
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r\n");
        std::string t = s.substr(b, e - b + 1);
        if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
        return t;
    }
    void bad(const char* section, const char* key, const char* expected, const std::string& got) {
        errors_.push_back(std::string(section) + "." + key + " must be " + expected + ", got '" +
                          got + "'");
    }

    const pt::ptree& tree_;
    std::vector<std::string>& errors_;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += (out.empty() ? "" : " ") + fmt(x);
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("malformed configuration: " + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }

    std::vector<std::string> errors;
    for (const auto& [section, child] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            if (child.empty()) {
                errors.push_back("key '" + section + "' appears outside any section");
            } else {
                errors.push_back("unknown section [" + section + "]");
            }
            continue;
        }
        for (const auto& [key, value] : child) {
            if (!it->second.count(key)) errors.push_back("unknown key " + section + "." + key);
        }
    }

    RunConfig c;
    Reader r(tree, errors);
    r.integer("grid", "dim", c.grid.dim);
    r.real("grid", "extent", c.grid.extent);
    r.integer("grid", "n", c.grid.n);

    r.text("potential", "name", c.potential.name);
    r.reals("potential", "coefficients", c.potential.coefficients);
    r.real("potential", "lambda", c.potential.lambda);

    const bool dt_given = r.raw("step", "dt") != nullptr;
    r.real("step", "dt", c.step.dt);
    r.real("step", "newton_tol", c.step.newton_tol);
    r.integer("step", "newton_max_iters", c.step.newton_max_iters);
    r.real("step", "theta_floor", c.step.theta_floor);
    r.integer("step", "max_dt_halvings", c.step.max_dt_halvings);
    r.real("step", "dt_cap", c.step.dt_cap);

    r.text("initial", "recipe", c.initial.kind);
    r.real("initial", "theta", c.initial.theta);
    r.real("initial", "chi", c.initial.chi);
    r.real("initial", "theta_amplitude", c.initial.theta_amplitude);
    r.real("initial", "chi_amplitude", c.initial.chi_amplitude);
    r.integer("initial", "mode", c.initial.mode);
    r.real("initial", "theta_min", c.initial.theta_min);
    r.real("initial", "theta_max", c.initial.theta_max);
    r.integer("initial", "modes", c.initial.modes);
    r.text("initial", "path", c.initial.path);
    r.real("initial", "noise", c.initial.noise);
    if (!c.initial.path.empty() && !base_dir.empty() && fs::path(c.initial.path).is_relative()) {
        c.initial.path = (base_dir / c.initial.path).lexically_normal().string();
    }

    r.real("run", "t_end", c.run.t_end);
    r.integer("run", "snapshot_every", c.run.snapshot_every);
    r.integer("run", "checkpoint_every", c.run.checkpoint_every);
    r.unsigned64("run", "seed", c.run.seed);
    r.boolean("run", "csv", c.run.csv);

    r.real("metric", "p", c.metric.p);
    r.real("metric", "epsilon", c.metric.epsilon);

    r.integer("bundle", "members", c.bundle.members);
    r.real("bundle", "radius", c.bundle.radius);
    r.integer("bundle", "modes", c.bundle.modes);
    r.real("bundle", "ell", c.bundle.ell);
    r.integer("bundle", "squeeze_modes", c.bundle.squeeze_modes);
    r.real("bundle", "gamma", c.bundle.gamma);
    r.real("bundle", "tail_fraction", c.bundle.tail_fraction);
    r.real("bundle", "contraction_tol", c.bundle.contraction_tol);

    r.reals("catalog", "constants", c.catalog.constants);
    r.integer("catalog", "modes", c.catalog.modes);
    r.real("catalog", "mode_amplitude", c.catalog.mode_amplitude);
    r.reals("catalog", "tanh_widths", c.catalog.tanh_widths);
    r.real("catalog", "dedupe_tol", c.catalog.dedupe_tol);

    // Constraint checks.
    try {
        build_grid(c.grid.dim, c.grid.extent, c.grid.n);
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) errors.push_back("grid: " + v);
    }

    if (c.potential.name != "double_well" && c.potential.name != "polynomial") {
        errors.push_back("potential.name must be double_well or polynomial, got '" +
                         c.potential.name + "'");
    } else if (c.potential.name == "polynomial") {
        if (c.potential.coefficients.empty()) {
            errors.push_back("potential.coefficients are required for a polynomial potential");
        } else {
            try {
                for (const auto& v : c.potential.build().check_hypotheses()) {
                    errors.push_back("potential: " + v);
                }
            } catch (const ConfigError& e) {
                for (const auto& v : e.violations()) errors.push_back("potential: " + v);
            }
        }
    } else {
        c.potential.coefficients = Potential::double_well().coefficients();
        c.potential.lambda = Potential::double_well().lambda();
    }
    if (!dt_given && c.potential.lambda > 0.0 && std::isfinite(c.potential.lambda)) {
        c.step.dt = 0.25 / c.potential.lambda;
    }

    try {
        c.step.validate();
    } catch (const ConfigError& e) {
        errors.insert(errors.end(), e.violations().begin(), e.violations().end());
    }
    if (c.potential.lambda > 0.0 && c.step.dt > 2.0 / c.potential.lambda) {
        c.warnings.push_back("step.dt = " + fmt(c.step.dt) + " exceeds 2 / lambda = " +
                             fmt(2.0 / c.potential.lambda) +
                             "; energy decay is not guaranteed (dt_cap limits the step used)");
    }

    const auto init = c.initial.validate();
    errors.insert(errors.end(), init.begin(), init.end());

    if (!(c.run.t_end > 0.0) || !std::isfinite(c.run.t_end)) {
        errors.push_back("run.t_end must be positive and finite");
    }
    if (c.run.snapshot_every < 0) errors.push_back("run.snapshot_every must be >= 0");
    if (c.run.checkpoint_every < 0) errors.push_back("run.checkpoint_every must be >= 0");

    if (!(c.metric.p > 3.0)) {
        errors.push_back("metric.p must satisfy p > 3, got " + fmt(c.metric.p));
    }
    if (!(c.metric.epsilon > 0.0 && c.metric.epsilon < 1.0)) {
        errors.push_back("metric.epsilon must lie in (0, 1), got " + fmt(c.metric.epsilon));
    }

    if (c.bundle.members < 2) errors.push_back("bundle.members must be >= 2");
    if (!(c.bundle.radius > 0.0)) errors.push_back("bundle.radius must be positive");
    if (c.bundle.modes < 1) errors.push_back("bundle.modes must be >= 1");
    if (!(c.bundle.ell > 0.0)) errors.push_back("bundle.ell must be positive");
    if (c.bundle.squeeze_modes < 1) errors.push_back("bundle.squeeze_modes must be >= 1");
    if (!(c.bundle.gamma > 0.0 && c.bundle.gamma < 1.0)) {
        errors.push_back("bundle.gamma must lie in (0, 1)");
    }
    if (!(c.bundle.tail_fraction > 0.0 && c.bundle.tail_fraction <= 1.0)) {
        errors.push_back("bundle.tail_fraction must lie in (0, 1]");
    }
    if (!(c.bundle.contraction_tol >= 0.0)) errors.push_back("bundle.contraction_tol must be >= 0");

    if (c.catalog.modes < 0) errors.push_back("catalog.modes must be >= 0");
    for (double w : c.catalog.tanh_widths) {
        if (!(w > 0.0)) errors.push_back("catalog.tanh_widths must be positive");
    }
    if (!(c.catalog.dedupe_tol > 0.0)) errors.push_back("catalog.dedupe_tol must be positive");

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read configuration " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::string RunConfig::to_ini() const {
    std::ostringstream o;
    o << "[grid]\n"
      << "dim = " << grid.dim << "\n"
      << "extent = " << fmt(grid.extent) << "\n"
      << "n = " << grid.n << "\n\n";
    o << "[potential]\n"
      << "name = " << potential.name << "\n";
    if (potential.name != "double_well") {
        o << "coefficients = " << fmt_list(potential.coefficients) << "\n"
          << "lambda = " << fmt(potential.lambda) << "\n";
    }
    o << "\n[step]\n"
      << "dt = " << fmt(step.dt) << "\n"
      << "newton_tol = " << fmt(step.newton_tol) << "\n"
      << "newton_max_iters = " << step.newton_max_iters << "\n"
      << "theta_floor = " << fmt(step.theta_floor) << "\n"
      << "max_dt_halvings = " << step.max_dt_halvings << "\n"
      << "dt_cap = " << fmt(step.dt_cap) << "\n\n";
    o << "[initial]\n"
      << "recipe = " << initial.kind << "\n"
      << "theta = " << fmt(initial.theta) << "\n"
      << "chi = " << fmt(initial.chi) << "\n"
      << "theta_amplitude = " << fmt(initial.theta_amplitude) << "\n"
      << "chi_amplitude = " << fmt(initial.chi_amplitude) << "\n"
      << "mode = " << initial.mode << "\n"
      << "theta_min = " << fmt(initial.theta_min) << "\n"
      << "theta_max = " << fmt(initial.theta_max) << "\n"
      << "modes = " << initial.modes << "\n";
    if (!initial.path.empty()) o << "path = " << initial.path << "\n";
    o << "noise = " << fmt(initial.noise) << "\n\n";
    o << "[run]\n"
      << "t_end = " << fmt(run.t_end) << "\n"
      << "snapshot_every = " << run.snapshot_every << "\n"
      << "checkpoint_every = " << run.checkpoint_every << "\n"
      << "seed = " << run.seed << "\n"
      << "csv = " << (run.csv ? "true" : "false") << "\n\n";
    o << "[metric]\n"
      << "p = " << fmt(metric.p) << "\n"
      << "epsilon = " << fmt(metric.epsilon) << "\n\n";
    o << "[bundle]\n"
      << "members = " << bundle.members << "\n"
      << "radius = " << fmt(bundle.radius) << "\n"
      << "modes = " << bundle.modes << "\n"
      << "ell = " << fmt(bundle.ell) << "\n"
      << "squeeze_modes = " << bundle.squeeze_modes << "\n"
      << "gamma = " << fmt(bundle.gamma) << "\n"
      << "tail_fraction = " << fmt(bundle.tail_fraction) << "\n"
      << "contraction_tol = " << fmt(bundle.contraction_tol) << "\n\n";
    o << "[catalog]\n"
      << "constants = " << fmt_list(catalog.constants) << "\n"
      << "modes = " << catalog.modes << "\n"
      << "mode_amplitude = " << fmt(catalog.mode_amplitude) << "\n"
      << "tanh_widths = " << fmt_list(catalog.tanh_widths) << "\n"
      << "dedupe_tol = " << fmt(catalog.dedupe_tol) << "\n";
    return o.str();
}

}  // namespace pfdyn
