#include "survlab/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "survlab/errors.hpp"

namespace survlab {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError("config: '" + key + "' " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where.empty() ? "<root>" : where, "must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items()) {
        if (!ok.count(k)) fail(where.empty() ? k : where + "." + k, "is not a recognised key");
    }
}

std::string path(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

double number(const json& obj, const std::string& where, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path(where, key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path(where, key), "must be finite");
    return d;
}

double positive(const json& obj, const std::string& where, const char* key) {
    const double d = number(obj, where, key);
    if (!(d > 0.0)) fail(path(where, key), "must be positive");
    return d;
}

std::uint64_t count(const json& obj, const std::string& where, const char* key, std::uint64_t min) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        fail(path(where, key), "must be a non-negative integer");
    }
    const auto n = v.get<std::uint64_t>();
    if (n < min) fail(path(where, key), "must be at least " + std::to_string(min));
    return n;
}

bool boolean(const json& obj, const std::string& where, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_boolean()) fail(path(where, key), "must be true or false");
    return v.get<bool>();
}

std::string text(const json& obj, const std::string& where, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(path(where, key), "must be a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& key) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) fail(key, "must be a number or a non-empty list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number() || !std::isfinite(e.get<double>())) fail(key, "must contain finite numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

DomainBlock parse_domain(const json& j) {
    only_keys(j, "domain", {"kind", "length", "lengths", "r0", "sigma2", "sigma"});
    if (!j.contains("kind")) fail("domain.kind", "is required");
    DomainBlock d;
    const std::string kind = text(j, "domain", "kind");
    auto forbid = [&](const char* key) {
        if (j.contains(key)) fail(path("domain", key), "is not valid for kind '" + kind + "'");
    };
    auto need = [&](const char* key) {
        if (!j.contains(key)) fail(path("domain", key), "is required for kind '" + kind + "'");
    };
    if (kind == "interval") {
        d.kind = DomainKind::interval;
        need("length");
        forbid("lengths");
        forbid("r0");
        d.length = positive(j, "domain", "length");
    } else if (kind == "box") {
        d.kind = DomainKind::box;
        need("lengths");
        forbid("length");
        forbid("r0");
        d.lengths = numbers(j.at("lengths"), "domain.lengths");
        if (d.lengths.size() > kMaxDim) fail("domain.lengths", "has more than 8 entries");
        for (double l : d.lengths)
            if (!(l > 0.0)) fail("domain.lengths", "must be positive");
    } else if (kind == "disk") {
        d.kind = DomainKind::disk;
        need("r0");
        forbid("length");
        forbid("lengths");
        d.r0 = positive(j, "domain", "r0");
    } else {
        fail("domain.kind", "must be one of interval, box, disk");
    }
    if (j.contains("sigma2") == j.contains("sigma")) fail("domain.sigma2", "exactly one of sigma2 and sigma is required");
    if (j.contains("sigma2")) {
        d.sigma2 = positive(j, "domain", "sigma2");
    } else {
        const auto& s = j.at("sigma");
        if (!s.is_array()) fail("domain.sigma", "must be a square matrix (list of rows)");
        std::vector<std::vector<double>> m;
        for (const auto& row : s) m.push_back(numbers(row, "domain.sigma"));
        for (const auto& row : m)
            if (row.size() != m.size()) fail("domain.sigma", "must be a square matrix (list of rows)");
        d.sigma = std::move(m);
    }
    return d;
}

MeasureBlock parse_measure(const json& j) {
    only_keys(j, "measure", {"base", "weight", "density"});
    MeasureBlock m;
    if (j.contains("base")) m.base = text(j, "measure", "base");
    if (m.base == "lebesgue") {
        if (j.contains("density")) fail("measure.density", "is only valid with base 'density'");
        if (j.contains("weight")) {
            m.weight = number(j, "measure", "weight");
            if (!(m.weight >= 0.0)) fail("measure.weight", "must be non-negative");
        }
    } else if (m.base == "density") {
        if (j.contains("weight")) fail("measure.weight", "is only valid with base 'lebesgue'");
        if (!j.contains("density")) fail("measure.density", "is required with base 'density'");
        m.density = text(j, "measure", "density");
        const auto ids = density_ids();
        if (std::find(ids.begin(), ids.end(), m.density) == ids.end()) {
            fail("measure.density", "must be one of constant, parabolic, ramp");
        }
    } else {
        fail("measure.base", "must be 'lebesgue' or 'density'");
    }
    return m;
}

json sigma_json(const DomainBlock& d) {
    json out = json::array();
    for (const auto& row : *d.sigma) out.push_back(row);
    return out;
}

}  // namespace

std::vector<std::string> density_ids() { return {"constant", "parabolic", "ramp"}; }

RunConfig parse_config(std::string_view doc) {
    json j;
    try {
        j = json::parse(doc);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    only_keys(j, "", {"domain", "measure", "tau", "schedule", "simulation", "analysis", "output", "seed"});
    RunConfig cfg;
    if (!j.contains("domain")) fail("domain", "is required");
    cfg.domain = parse_domain(j.at("domain"));
    if (j.contains("measure")) cfg.measure = parse_measure(j.at("measure"));

    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        only_keys(s, "schedule", {"lambda1", "kind", "tau"});
        if (s.contains("lambda1")) cfg.schedule.lambda1 = positive(s, "schedule", "lambda1");
        if (s.contains("kind")) {
            cfg.schedule.kind = text(s, "schedule", "kind");
            if (cfg.schedule.kind != "exact" && cfg.schedule.kind != "slow_limit") {
                fail("schedule.kind", "must be 'exact' or 'slow_limit'");
            }
        }
        if (s.contains("tau")) {
            if (j.contains("tau")) fail("schedule.tau", "conflicts with top-level 'tau'");
            cfg.tau = numbers(s.at("tau"), "schedule.tau");
        }
    }
    if (j.contains("tau")) cfg.tau = numbers(j.at("tau"), "tau");
    if (cfg.tau.empty()) fail("tau", "is required");
    for (double t : cfg.tau)
        if (!(t > 0.0)) fail("tau", "entries must be positive");

    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        only_keys(s, "simulation", {"dt", "n_paths", "n_reps", "bridge", "monte_carlo", "threads"});
        if (s.contains("dt")) cfg.simulation.dt = positive(s, "simulation", "dt");
        if (s.contains("n_paths")) cfg.simulation.n_paths = count(s, "simulation", "n_paths", 1);
        if (s.contains("n_reps")) cfg.simulation.n_reps = count(s, "simulation", "n_reps", 1);
        if (s.contains("bridge")) cfg.simulation.bridge = boolean(s, "simulation", "bridge");
        if (s.contains("monte_carlo")) cfg.simulation.monte_carlo = boolean(s, "simulation", "monte_carlo");
        if (s.contains("threads")) {
            const auto t = count(s, "simulation", "threads", 0);
            if (t > 1024) fail("simulation.threads", "must be at most 1024");
            cfg.simulation.threads = static_cast<unsigned>(t);
        }
    }
    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        only_keys(a, "analysis", {"n_bands", "s_grid", "tau_grid", "t_min", "tol"});
        if (a.contains("n_bands")) cfg.analysis.n_bands = count(a, "analysis", "n_bands", 2);
        if (a.contains("s_grid")) {
            cfg.analysis.s_grid = numbers(a.at("s_grid"), "analysis.s_grid");
            for (double s : cfg.analysis.s_grid)
                if (!(s >= 0.0 && s <= 1.0)) fail("analysis.s_grid", "entries must lie in [0, 1]");
        }
        if (a.contains("tau_grid")) {
            cfg.analysis.tau_grid = numbers(a.at("tau_grid"), "analysis.tau_grid");
            for (std::size_t i = 0; i < cfg.analysis.tau_grid.size(); ++i) {
                if (!(cfg.analysis.tau_grid[i] > 0.0)) fail("analysis.tau_grid", "entries must be positive");
                if (i > 0 && !(cfg.analysis.tau_grid[i] > cfg.analysis.tau_grid[i - 1])) {
                    fail("analysis.tau_grid", "must be strictly increasing");
                }
            }
        }
        if (a.contains("t_min")) cfg.analysis.t_min = positive(a, "analysis", "t_min");
        if (a.contains("tol")) cfg.analysis.tol = positive(a, "analysis", "tol");
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        only_keys(o, "output", {"csv_dir", "report"});
        if (o.contains("csv_dir")) cfg.output.csv_dir = text(o, "output", "csv_dir");
        if (o.contains("report")) cfg.output.report = text(o, "output", "report");
    }
    if (!j.contains("seed")) fail("seed", "is required");
    cfg.seed = count(j, "", "seed", 0);

    // Constructing the domain checks sigma (symmetric positive definite, size).
    try {
        (void)make_domain(cfg);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(cfg.domain.sigma ? "domain.sigma" : "domain", std::string("is invalid: ") + e.what());
    }
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    json d;
    d["kind"] = to_string(cfg.domain.kind);
    switch (cfg.domain.kind) {
        case DomainKind::interval: d["length"] = cfg.domain.length; break;
        case DomainKind::box: d["lengths"] = cfg.domain.lengths; break;
        case DomainKind::disk: d["r0"] = cfg.domain.r0; break;
    }
    if (cfg.domain.sigma2) d["sigma2"] = *cfg.domain.sigma2;
    if (cfg.domain.sigma) d["sigma"] = sigma_json(cfg.domain);

    json m;
    m["base"] = cfg.measure.base;
    if (cfg.measure.base == "lebesgue") m["weight"] = cfg.measure.weight;
    else m["density"] = cfg.measure.density;

    json s;
    s["kind"] = cfg.schedule.kind;
    if (cfg.schedule.lambda1) s["lambda1"] = *cfg.schedule.lambda1;

    json sim{{"dt", cfg.simulation.dt},         {"n_paths", cfg.simulation.n_paths},
             {"n_reps", cfg.simulation.n_reps}, {"bridge", cfg.simulation.bridge},
             {"monte_carlo", cfg.simulation.monte_carlo}, {"threads", cfg.simulation.threads}};
    json an{{"n_bands", cfg.analysis.n_bands},
            {"s_grid", cfg.analysis.s_grid},
            {"tau_grid", cfg.analysis.tau_grid},
            {"tol", cfg.analysis.tol}};
    if (cfg.analysis.t_min) an["t_min"] = *cfg.analysis.t_min;
    json out{{"csv_dir", cfg.output.csv_dir}, {"report", cfg.output.report}};

    json j{{"domain", d},      {"measure", m},  {"tau", cfg.tau},   {"schedule", s},
           {"simulation", sim}, {"analysis", an}, {"output", out}, {"seed", cfg.seed}};
    return j.dump(2);
}

std::uint64_t config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : serialize_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

DomainSpec make_domain(const RunConfig& cfg) {
    const DomainBlock& d = cfg.domain;
    const std::size_t dim =
        d.kind == DomainKind::interval ? 1 : d.kind == DomainKind::disk ? 2 : d.lengths.size();
    Eigen::MatrixXd sigma;
    if (d.sigma2) {
        sigma = *d.sigma2 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    } else {
        const auto& rows = *d.sigma;
        if (rows.size() != dim) fail("domain.sigma", "must be " + std::to_string(dim) + " x " + std::to_string(dim));
        sigma.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = 0; k < dim; ++k)
                sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    switch (d.kind) {
        case DomainKind::interval: return DomainSpec::interval(d.length, sigma(0, 0));
        case DomainKind::box: return DomainSpec::box(d.lengths, sigma);
        case DomainKind::disk: return DomainSpec::disk(d.r0, sigma);
    }
    throw ConfigError("config: unknown domain kind");
}

MeasureSpec make_measure(const RunConfig& cfg, const DomainSpec& domain) {
    const MeasureBlock& m = cfg.measure;
    if (m.base == "lebesgue") return MeasureSpec::lebesgue(domain, m.weight);
    const auto kind = domain.kind();
    if (m.density == "constant") {
        return MeasureSpec::with_density(domain, [](const Point&) { return 1.0; }, 1.0, "constant");
    }
    if (m.density == "parabolic") {
        // 1 - (r / r0)^2 on the disk; prod 4 x (L - x) / L^2 on intervals and boxes.
        if (kind == DomainKind::disk) {
            const double r0 = domain.radius();
            return MeasureSpec::with_density(
                domain, [r0](const Point& x) { return std::max(0.0, 1.0 - (x[0] * x[0] + x[1] * x[1]) / (r0 * r0)); },
                1.0, "parabolic");
        }
        const auto lengths = domain.lengths();
        return MeasureSpec::with_density(
            domain,
            [lengths](const Point& x) {
                double v = 1.0;
                for (std::size_t i = 0; i < lengths.size(); ++i) v *= 4.0 * x[i] * (lengths[i] - x[i]) / (lengths[i] * lengths[i]);
                return std::max(0.0, v);
            },
            1.0, "parabolic");
    }
    // ramp: 1 + x / r0 on the disk, 2 x_1 / L_1 on intervals and boxes.
    if (kind == DomainKind::disk) {
        const double r0 = domain.radius();
        return MeasureSpec::with_density(domain, [r0](const Point& x) { return std::clamp(1.0 + x[0] / r0, 0.0, 2.0); },
                                         2.0, "ramp");
    }
    const double l = domain.lengths()[0];
    return MeasureSpec::with_density(domain, [l](const Point& x) { return std::clamp(2.0 * x[0] / l, 0.0, 2.0); }, 2.0,
                                     "ramp");
}

VerificationPlan make_plan(const RunConfig& cfg, double tau) {
    VerificationPlan plan;
    plan.domain = make_domain(cfg);
    plan.measure = make_measure(cfg, plan.domain);
    plan.lambda1 = cfg.schedule.lambda1;
    plan.schedule = cfg.schedule.kind == "slow_limit" ? ScalingRule::Schedule::slow_limit : ScalingRule::Schedule::exact;
    plan.tau = tau;
    plan.tau_grid = cfg.analysis.tau_grid;
    plan.n_reps = cfg.simulation.n_reps;
    plan.monte_carlo = cfg.simulation.monte_carlo;
    plan.options.dt = cfg.simulation.dt;
    plan.options.bridge_correction = cfg.simulation.bridge;
    plan.options.threads = cfg.simulation.threads;
    plan.n_bands = cfg.analysis.n_bands;
    plan.s_grid = cfg.analysis.s_grid;
    plan.t_min = cfg.analysis.t_min;
    plan.tol = cfg.analysis.tol;
    plan.seed = cfg.seed;
    return plan;
}

}  // namespace survlab
