#include "nshs/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace nshs {

std::string to_string(DatumFamily f) {
    switch (f) {
        case DatumFamily::Bump: return "bump";
        case DatumFamily::Maekawa: return "maekawa";
        case DatumFamily::Analytic: return "analytic";
    }
    return "?";
}

std::string to_string(SolverKind k) {
    switch (k) {
        case SolverKind::Mild: return "mild";
        case SolverKind::Direct: return "direct";
        case SolverKind::Euler: return "euler";
    }
    return "?";
}

void RunConfig::validate() const {
    require(nu > 0.0 && nu <= 1.0, "config: nu must lie in (0,1]");
    require(mu0 > 0.0 && mu0 <= 0.1, "config: mu0 violates the constraint mu0 in (0,1/10]");
    require(gamma > 0.0, "config: gamma must be positive");
    require(eps0 > 0.0 && eps0 < 1.0, "config: eps0 must lie in (0,1)");
    require(alpha > 0.0 && alpha < 0.5, "config: alpha violates the constraint alpha in (0,1/2)");
    require(theta0 > 0.0, "config: theta0 must be positive");
    require(kmax >= 0, "config: kmax must be nonnegative");
    require(ny >= 32, "config: ny must be >= 32");
    require(ymax >= 2.0, "config: ymax must be >= 2");
    require(dt > 0.0, "config: dt must be positive");
    require(tfinal >= 0.0, "config: tfinal must be nonnegative");
    require(tfinal < mu0 / (2.0 * gamma),
            "config: tfinal violates the constraint T < mu0/(2 gamma)");
    require(picard_tol > 0.0 && picard_max >= 1, "config: picard settings invalid");
    require(duhamel_nodes >= 2 && gauss_points >= 2, "config: quadrature orders too small");
    require(kernel_substeps >= 8, "config: kernel_substeps must be >= 8");
    require(mu_points >= 4 && eval_points >= 17, "config: norm discretization too small");
    require(amplitude > 0.0, "config: amplitude must be positive");
    require(snapshot_every >= 1, "config: snapshot_every must be >= 1");
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Schema {
    std::map<std::string, std::function<void(RunConfig&, const std::string&)>> set;
};

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw InvalidArgument("config: value for " + key + " is not a number: " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (...) {
        throw InvalidArgument("config: value for " + key + " is not an integer: " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw InvalidArgument("config: value for " + key + " is not a boolean: " + v);
}

const Schema& schema() {
    static Schema s = [] {
        Schema sc;
        auto D = [&](const char* key, double RunConfig::* mem) {
            sc.set[key] = [key, mem](RunConfig& c, const std::string& v) { c.*mem = to_double(key, v); };
        };
        auto I = [&](const char* key, int RunConfig::* mem) {
            sc.set[key] = [key, mem](RunConfig& c, const std::string& v) { c.*mem = to_int(key, v); };
        };
        auto B = [&](const char* key, bool RunConfig::* mem) {
            sc.set[key] = [key, mem](RunConfig& c, const std::string& v) { c.*mem = to_bool(key, v); };
        };
        D("physics.nu", &RunConfig::nu);
        D("physics.mu0", &RunConfig::mu0);
        D("physics.gamma", &RunConfig::gamma);
        D("physics.eps0", &RunConfig::eps0);
        D("physics.alpha", &RunConfig::alpha);
        D("physics.theta0", &RunConfig::theta0);
        I("numerics.kmax", &RunConfig::kmax);
        I("numerics.ny", &RunConfig::ny);
        D("numerics.ymax", &RunConfig::ymax);
        D("numerics.dt", &RunConfig::dt);
        D("numerics.tfinal", &RunConfig::tfinal);
        D("numerics.picard_tol", &RunConfig::picard_tol);
        I("numerics.picard_max", &RunConfig::picard_max);
        I("numerics.duhamel_nodes", &RunConfig::duhamel_nodes);
        I("numerics.gauss_points", &RunConfig::gauss_points);
        I("numerics.kernel_substeps", &RunConfig::kernel_substeps);
        I("norms.mu_points", &RunConfig::mu_points);
        I("norms.eval_points", &RunConfig::eval_points);
        B("norms.continuation", &RunConfig::continuation);
        I("norms.contours", &RunConfig::contours);
        D("datum.amplitude", &RunConfig::amplitude);
        B("datum.compatible", &RunConfig::compatible);
        sc.set["datum.family"] = [](RunConfig& c, const std::string& v) {
            if (v == "bump") c.family = DatumFamily::Bump;
            else if (v == "maekawa") c.family = DatumFamily::Maekawa;
            else if (v == "analytic") c.family = DatumFamily::Analytic;
            else throw InvalidArgument("config: unknown datum.family: " + v);
        };
        I("io.snapshot_every", &RunConfig::snapshot_every);
        return sc;
    }();
    return s;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os << "[physics]\n";
    os << "nu = " << fmt(nu) << "\n";
    os << "mu0 = " << fmt(mu0) << "\n";
    os << "gamma = " << fmt(gamma) << "\n";
    os << "eps0 = " << fmt(eps0) << "\n";
    os << "alpha = " << fmt(alpha) << "\n";
    os << "theta0 = " << fmt(theta0) << "\n";
    os << "\n[numerics]\n";
    os << "kmax = " << kmax << "\n";
    os << "ny = " << ny << "\n";
    os << "ymax = " << fmt(ymax) << "\n";
    os << "dt = " << fmt(dt) << "\n";
    os << "tfinal = " << fmt(tfinal) << "\n";
    os << "picard_tol = " << fmt(picard_tol) << "\n";
    os << "picard_max = " << picard_max << "\n";
    os << "duhamel_nodes = " << duhamel_nodes << "\n";
    os << "gauss_points = " << gauss_points << "\n";
    os << "kernel_substeps = " << kernel_substeps << "\n";
    os << "\n[norms]\n";
    os << "mu_points = " << mu_points << "\n";
    os << "eval_points = " << eval_points << "\n";
    os << "continuation = " << (continuation ? "true" : "false") << "\n";
    os << "contours = " << contours << "\n";
    os << "\n[datum]\n";
    os << "family = " << to_string(family) << "\n";
    os << "amplitude = " << fmt(amplitude) << "\n";
    os << "compatible = " << (compatible ? "true" : "false") << "\n";
    os << "\n[io]\n";
    os << "snapshot_every = " << snapshot_every << "\n";
    return os.str();
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = t.substr(1, t.size() - 2);
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config: line " + std::to_string(lineno) + " is not key = value");
        std::string key = section + "." + trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        auto it = schema().set.find(key);
        if (it == schema().set.end()) throw InvalidArgument("config: unknown key " + key);
        it->second(cfg, value);
    }
    for (const auto& ov : overrides) {
        size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config: override is not key=value: " + ov);
        std::string key = trim(ov.substr(0, eq));
        std::string value = trim(ov.substr(eq + 1));
        auto it = schema().set.find(key);
        if (it == schema().set.end()) throw InvalidArgument("config: unknown key " + key);
        it->second(cfg, value);
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

}  // namespace nshs
