#include "netkernel/jsonio.hpp"

#include <fstream>
#include <limits>

#include "netkernel/errors.hpp"
#include "netkernel/simulate.hpp"

namespace netkernel {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + context);
    }
}

namespace {

json bound_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

double bound_from_json(const json& j, const std::string& context) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw ConfigError("bad support bound '" + s + "' in " + context);
    }
    if (!j.is_number()) throw ConfigError("support bound must be a number in " + context);
    return j.get<double>();
}

json function_to_json(const BasisFunction& f) {
    json j;
    switch (f.kind) {
        case BasisFunction::Kind::PowerLaw:
            j["kind"] = "power_law";
            j["exponent"] = f.exponent;
            j["support"] = {bound_to_json(f.support_lo), bound_to_json(f.support_hi)};
            break;
        case BasisFunction::Kind::Indicator:
            j["kind"] = "indicator";
            j["support"] = {bound_to_json(f.support_lo), bound_to_json(f.support_hi)};
            break;
        case BasisFunction::Kind::Sin:
            j["kind"] = "sin";
            j["frequency"] = f.frequency;
            break;
        case BasisFunction::Kind::Cos:
            j["kind"] = "cos";
            j["frequency"] = f.frequency;
            break;
        case BasisFunction::Kind::Spline:
            j["kind"] = "spline";
            j["knots"] = f.knots;
            j["coefs"] = f.coefs;
            break;
        case BasisFunction::Kind::Tabulated:
            j["kind"] = "tabulated";
            j["knots"] = f.knots;
            j["coefs"] = f.coefs;
            break;
    }
    return j;
}

BasisFunction function_from_json(const json& j) {
    check_keys(j, {"kind", "exponent", "support", "frequency", "knots", "coefs"},
               "basis function");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power_law" || kind == "indicator") {
        const auto& s = j.at("support");
        if (!s.is_array() || s.size() != 2)
            throw ConfigError("support must be [lo, hi]");
        const double lo = bound_from_json(s[0], kind);
        const double hi = bound_from_json(s[1], kind);
        return kind == "power_law"
                   ? BasisFunction::power_law(j.at("exponent").get<double>(), lo, hi)
                   : BasisFunction::indicator(lo, hi);
    }
    if (kind == "sin") return BasisFunction::sin_fn(j.at("frequency").get<int>());
    if (kind == "cos") return BasisFunction::cos_fn(j.at("frequency").get<int>());
    if (kind == "spline")
        return BasisFunction::spline(j.at("knots").get<std::vector<double>>(),
                                     j.at("coefs").get<std::vector<double>>());
    if (kind == "tabulated")
        return BasisFunction::tabulated(j.at("knots").get<std::vector<double>>(),
                                        j.at("coefs").get<std::vector<double>>());
    throw ConfigError("unknown basis function kind '" + kind + "'");
}

}  // namespace

json basis_to_json(const BasisSpec& basis) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = basis.kind == BasisSpec::Kind::RadialLift ? "radial_lift" : "direct_scalar";
    j["dim"] = basis.dim;
    j["singular_cutoff"] = basis.singular_cutoff;
    j["functions"] = json::array();
    for (const auto& f : basis.functions) j["functions"].push_back(function_to_json(f));
    return j;
}

BasisSpec basis_from_json(const json& j) {
    check_keys(j, {"schema_version", "kind", "dim", "singular_cutoff", "functions"}, "basis");
    BasisSpec b;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "radial_lift")
        b.kind = BasisSpec::Kind::RadialLift;
    else if (kind == "direct_scalar")
        b.kind = BasisSpec::Kind::DirectScalar;
    else
        throw ConfigError("unknown basis kind '" + kind + "'");
    b.dim = j.at("dim").get<int>();
    if (j.contains("singular_cutoff")) b.singular_cutoff = j.at("singular_cutoff").get<double>();
    for (const auto& fj : j.at("functions")) b.functions.push_back(function_from_json(fj));
    b.validate();
    return b;
}

json system_to_json(const SystemSpec& spec) {
    json j;
    j["schema_version"] = 1;
    j["n_agents"] = spec.n_agents;
    j["dim"] = spec.dim;
    j["sigma"] = spec.sigma;
    j["dt"] = spec.dt;
    j["n_steps"] = spec.n_steps;
    j["init"] = {{"kind", spec.init == SystemSpec::Init::UniformBox ? "uniform" : "gaussian"},
                 {"a", spec.init_a},
                 {"b", spec.init_b}};
    j["seed"] = spec.seed;
    return j;
}

SystemSpec system_from_json(const json& j) {
    check_keys(j, {"schema_version", "n_agents", "dim", "sigma", "dt", "n_steps", "init", "seed"},
               "system");
    SystemSpec s;
    s.n_agents = j.at("n_agents").get<int>();
    s.dim = j.at("dim").get<int>();
    s.sigma = j.at("sigma").get<double>();
    s.dt = j.at("dt").get<double>();
    s.n_steps = j.at("n_steps").get<int>();
    if (j.contains("init")) {
        const auto& init = j.at("init");
        check_keys(init, {"kind", "a", "b"}, "system.init");
        const std::string kind = init.at("kind").get<std::string>();
        if (kind == "uniform")
            s.init = SystemSpec::Init::UniformBox;
        else if (kind == "gaussian")
            s.init = SystemSpec::Init::Gaussian;
        else
            throw ConfigError("unknown init kind '" + kind + "'");
        s.init_a = init.at("a").get<double>();
        s.init_b = init.at("b").get<double>();
    }
    s.seed = j.value("seed", std::uint64_t{0});
    s.validate();
    return s;
}

json regularizer_to_json(const Regularizer& reg) {
    json j;
    switch (reg.mode) {
        case Regularizer::Mode::None:
            j["mode"] = "none";
            break;
        case Regularizer::Mode::PseudoInverse:
            j["mode"] = "pseudo_inverse";
            j["rcond"] = reg.rcond;
            break;
        case Regularizer::Mode::MinNorm:
            j["mode"] = "min_norm";
            break;
        case Regularizer::Mode::TikhonovId:
            j["mode"] = "tikhonov_id";
            j["lambda"] = reg.lambda;
            j["auto_lambda"] = reg.auto_lambda;
            break;
        case Regularizer::Mode::TikhonovGeneralized:
            j["mode"] = "tikhonov_generalized";
            j["lambda"] = reg.lambda;
            j["auto_lambda"] = reg.auto_lambda;
            break;
    }
    return j;
}

Regularizer regularizer_from_json(const json& j) {
    check_keys(j, {"mode", "rcond", "lambda", "auto_lambda"}, "regularizer");
    const std::string mode = j.at("mode").get<std::string>();
    Regularizer reg;
    if (mode == "none") {
        reg = Regularizer::none();
    } else if (mode == "pseudo_inverse") {
        reg = Regularizer::pseudo_inverse(j.value("rcond", 1e-12));
    } else if (mode == "min_norm") {
        reg = Regularizer::min_norm();
    } else if (mode == "tikhonov_id") {
        reg = Regularizer::tikhonov_id(j.value("lambda", 0.0));
        reg.auto_lambda = j.value("auto_lambda", false);
    } else {
        throw ConfigError("unknown regularizer mode '" + mode + "'");
    }
    return reg;
}

// ---- trajectory sidecar ------------------------------------------------

void save_trajectory_sidecar(const TrajectoryData& data, const std::string& path) {
    json j;
    j["schema_version"] = 1;
    j["system"] = system_to_json(data.spec);
    j["sigma_obs"] = data.sigma_obs;
    j["a_hash"] = data.a_hash;
    j["c_hash"] = data.c_hash;
    std::ofstream os(path);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
}

void load_trajectory_sidecar(TrajectoryData& data, const std::string& path) {
    std::ifstream is(path);
    if (!is) return;  // binary payload alone still loads
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw DataError("bad trajectory sidecar " + path + ": " + e.what());
    }
    check_keys(j, {"schema_version", "system", "sigma_obs", "a_hash", "c_hash"}, "sidecar");
    if (j.contains("system")) {
        const SystemSpec s = system_from_json(j.at("system"));
        if (s.n_agents != data.spec.n_agents || s.dim != data.spec.dim)
            throw DataError("sidecar disagrees with the binary header in " + path);
        data.spec = s;
    }
    data.sigma_obs = j.value("sigma_obs", 0.0);
    data.a_hash = j.value("a_hash", std::uint64_t{0});
    data.c_hash = j.value("c_hash", std::uint64_t{0});
}

}  // namespace netkernel
