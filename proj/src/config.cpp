#include "sectorhomog/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sectorhomog/error.hpp"

namespace sectorhomog {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw Error(ErrorKind::Config, path + ": " + what);
}

// Typed access to one JSON object; remembers which keys were read so that leftovers can
// be reported as unknown.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            fail(path_, "expected an object");
        }
    }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return j_.contains(key);
    }

    double number(const std::string& key, double def)
    {
        if (!has(key)) {
            return def;
        }
        const auto& v = j_.at(key);
        if (!v.is_number()) {
            fail(at(key), "expected a number");
        }
        return v.get<double>();
    }

    double positive(const std::string& key, double def)
    {
        const double v = number(key, def);
        if (!(v > 0.0)) {
            fail(at(key), "must be positive");
        }
        return v;
    }

    std::int64_t integer(const std::string& key, std::int64_t def)
    {
        if (!has(key)) {
            return def;
        }
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) {
            fail(at(key), "expected an integer");
        }
        return v.get<std::int64_t>();
    }

    bool boolean(const std::string& key, bool def)
    {
        if (!has(key)) {
            return def;
        }
        const auto& v = j_.at(key);
        if (!v.is_boolean()) {
            fail(at(key), "expected true or false");
        }
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& def)
    {
        if (!has(key)) {
            return def;
        }
        const auto& v = j_.at(key);
        if (!v.is_string()) {
            fail(at(key), "expected a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> def, bool require_positive = true)
    {
        if (!has(key)) {
            return def;
        }
        const auto& v = j_.at(key);
        if (!v.is_array() || v.empty()) {
            fail(at(key), "expected a non-empty array of numbers");
        }
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) {
                fail(at(key), "expected a non-empty array of numbers");
            }
            out.push_back(x.get<double>());
            if (require_positive && !(out.back() > 0.0)) {
                fail(at(key), "entries must be positive");
            }
        }
        return out;
    }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) {
                fail(at(key), "unknown key");
            }
        }
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

bool known_experiment(std::string_view kind)
{
    return std::find(std::begin(experiment_kinds), std::end(experiment_kinds), kind) != std::end(experiment_kinds);
}

std::vector<double> default_gain_radii()
{
    std::vector<double> r;
    for (int k = 1; k <= 8; ++k) {
        r.push_back(std::ldexp(1.0, -k));
    }
    return r;
}

json resolve(const RunConfig& c)
{
    json j;
    j["domain"] = {{"omega", c.domain.omega}, {"R", c.domain.R}};
    json mesh = {{"grading", c.mesh.grading}, {"cells_per_epsilon", c.mesh.cells_per_epsilon}};
    mesh["h"] = c.mesh.h ? json(*c.mesh.h) : json(nullptr);
    j["mesh"] = mesh;

    const auto& k = c.coeff;
    json coeff = {{"kind", k.kind}};
    if (k.kind == "constant") {
        coeff["matrix"] = {{k.matrix(0, 0), k.matrix(0, 1)}, {k.matrix(1, 0), k.matrix(1, 1)}};
    } else if (k.kind == "periodic") {
        coeff["kappa"] = k.kappa;
        coeff["rotation"] = k.rotation;
    } else if (k.kind == "laminate") {
        coeff["first"] = k.first;
        coeff["second"] = k.second;
        coeff["rotation"] = k.rotation;
    } else if (k.kind == "checkerboard") {
        coeff["contrast"] = k.contrast;
        coeff["seed"] = k.seed;
    }
    coeff["normalize"] = k.normalize;
    coeff["cell_grid"] = k.cell_grid;
    j["coeff"] = coeff;

    const auto& e = c.experiment;
    json ex = {{"kind", e.kind}};
    if (e.kind == "cell") {
        ex["sublinearity_radii"] = e.sublinearity_radii;
    } else if (e.kind == "gain") {
        ex["epsilons"] = e.epsilons;
        ex["radii"] = e.radii;
        ex["fit_min"] = e.fit_min;
        ex["fit_max"] = e.fit_max;
        ex["N"] = e.N;
        ex["r0"] = e.r0;
        ex["cutoff_expansion"] = e.cutoff_expansion;
        ex["write_fields"] = e.write_fields;
    } else if (e.kind == "corrector-growth") {
        ex["epsilons"] = e.epsilons;
        ex["N"] = e.N;
        ex["radii_min_eps"] = e.radii_min_eps;
        ex["fit_max"] = e.fit_max;
        ex["radii_count"] = e.radii_count;
    } else if (e.kind == "excess-decay") {
        ex["epsilons"] = e.epsilons;
        ex["N"] = e.N;
        ex["radii"] = e.radii;
        ex["fit_min_eps"] = e.fit_min_eps;
        ex["fit_max"] = e.fit_max;
    } else if (e.kind == "gamma-recovery") {
        ex["mesh_sizes"] = e.mesh_sizes;
        ex["coefficients"] = e.coefficients;
        ex["r0"] = e.r0;
    } else if (e.kind == "extend-check") {
        ex["n_theta"] = e.n_theta;
        ex["radii"] = e.radii;
        ex["test_field"] = e.test_field;
    }
    j["experiment"] = ex;
    j["solver"] = {{"tol", c.solver.rel_tol}, {"max_iter", c.solver.max_iter}};
    j["output"] = c.output;
    j["seed"] = c.seed;
    return j;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config(const json& j, std::string_view experiment)
{
    RunConfig c;
    Section top(j, "");

    if (top.has("domain")) {
        Section d(top.raw("domain"), "domain");
        const bool has_omega = d.has("omega");
        const bool has_ratio = d.has("omega_over_pi");
        if (has_omega && has_ratio) {
            fail("domain", "give either omega or omega_over_pi, not both");
        }
        if (has_ratio) {
            c.domain.omega = d.positive("omega_over_pi", 1.95) * pi;
        } else {
            c.domain.omega = d.positive("omega", c.domain.omega);
        }
        if (c.domain.omega > 2.0 * pi) {
            fail("domain.omega", "must not exceed 2 pi");
        }
        c.domain.R = d.positive("R", 1.0);
        d.finish();
    }

    if (top.has("mesh")) {
        Section m(top.raw("mesh"), "mesh");
        if (m.has("h") && !m.raw("h").is_null()) {
            c.mesh.h = m.positive("h", 0.0);
        }
        c.mesh.grading = m.number("grading", 2.0);
        if (c.mesh.grading < 1.0) {
            fail("mesh.grading", "must be at least 1");
        }
        c.mesh.cells_per_epsilon = m.positive("cells_per_epsilon", 8.0);
        m.finish();
    }

    if (top.has("coeff")) {
        Section k(top.raw("coeff"), "coeff");
        c.coeff.kind = k.string("kind", "periodic");
        const auto& kind = c.coeff.kind;
        if (kind == "constant") {
            if (!k.has("matrix")) {
                fail("coeff.matrix", "required for a constant coefficient");
            }
            const auto& m = k.raw("matrix");
            if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 ||
                m[1].size() != 2) {
                fail("coeff.matrix", "expected [[a11, a12], [a21, a22]]");
            }
            for (int r = 0; r < 2; ++r) {
                for (int s = 0; s < 2; ++s) {
                    if (!m[r][s].is_number()) {
                        fail("coeff.matrix", "entries must be numbers");
                    }
                    c.coeff.matrix(r, s) = m[r][s].get<double>();
                }
            }
        } else if (kind == "periodic") {
            c.coeff.kappa = k.number("kappa", 1.5);
            c.coeff.rotation = k.number("rotation", 0.35);
        } else if (kind == "laminate") {
            c.coeff.first = k.positive("first", 2.0);
            c.coeff.second = k.positive("second", 0.5);
            c.coeff.rotation = k.number("rotation", 0.0);
        } else if (kind == "checkerboard") {
            c.coeff.contrast = k.number("contrast", 4.0);
            const auto seed = k.integer("seed", 0);
            if (seed < 0) {
                fail("coeff.seed", "must be non-negative");
            }
            c.coeff.seed = static_cast<std::uint64_t>(seed);
        } else if (kind != "identity") {
            fail("coeff.kind", "unknown coefficient kind '" + kind + "'");
        }
        c.coeff.normalize = k.boolean("normalize", kind != "identity" && kind != "constant");
        c.coeff.cell_grid = static_cast<int>(k.integer("cell_grid", 256));
        if (c.coeff.cell_grid < 32) {
            fail("coeff.cell_grid", "must be at least 32");
        }
        k.finish();
    }

    std::string kind(experiment);
    json empty_experiment = json::object();
    const json* ej = &empty_experiment;
    if (top.has("experiment")) {
        ej = &top.raw("experiment");
    }
    Section e(*ej, "experiment");
    const std::string own = e.string("kind", "");
    if (!own.empty() && !kind.empty() && own != kind) {
        fail("experiment.kind", "config is for '" + own + "' but '" + kind + "' was requested");
    }
    if (kind.empty()) {
        kind = own;
    }
    if (kind.empty()) {
        fail("experiment.kind", "no experiment given");
    }
    if (!known_experiment(kind)) {
        fail("experiment.kind", "unknown experiment '" + kind + "'");
    }
    auto& x = c.experiment;
    x.kind = kind;
    if (kind == "cell") {
        x.sublinearity_radii = e.numbers("sublinearity_radii", {1, 2, 4, 8, 16, 32, 64});
    } else if (kind == "gain") {
        x.epsilons = e.numbers("epsilons", {0.2, 0.1, 0.05});
        x.radii = e.numbers("radii", default_gain_radii());
        x.fit_min = e.positive("fit_min", std::ldexp(1.0, -8));
        x.fit_max = e.positive("fit_max", 0.5);
        x.N = static_cast<int>(e.integer("N", 1));
        x.r0 = e.positive("r0", 0.35);
        x.cutoff_expansion = e.boolean("cutoff_expansion", false);
        x.write_fields = e.boolean("write_fields", true);
    } else if (kind == "corrector-growth") {
        x.epsilons = e.numbers("epsilons", {0.05});
        x.N = static_cast<int>(e.integer("N", 1));
        x.radii_min_eps = e.positive("radii_min_eps", 4.0);
        x.fit_max = e.positive("fit_max", 0.5);
        x.radii_count = static_cast<std::size_t>(std::max<std::int64_t>(0, e.integer("radii_count", 8)));
        if (x.radii_count < 4) {
            fail("experiment.radii_count", "must be at least 4");
        }
        if (x.N < 1) {
            fail("experiment.N", "corner mode must be at least 1");
        }
    } else if (kind == "excess-decay") {
        x.epsilons = e.numbers("epsilons", {0.05});
        x.N = static_cast<int>(e.integer("N", 0));
        x.radii = e.numbers("radii", {0.01,   0.01425, 0.0203, 0.0289, 0.0412, 0.0587,
                                      0.0837, 0.119,   0.170,  0.242,  0.345,  0.5});
        x.fit_min_eps = e.number("fit_min_eps", 2.0);
        x.fit_max = e.positive("fit_max", 0.5);
    } else if (kind == "gamma-recovery") {
        x.mesh_sizes = e.numbers("mesh_sizes", {0.01, 0.005});
        x.coefficients = e.numbers("coefficients", {1.0, 0.3, -0.2}, false);
        x.r0 = e.positive("r0", 0.35);
    } else if (kind == "extend-check") {
        x.n_theta = static_cast<int>(e.integer("n_theta", 4096));
        if (x.n_theta < 4) {
            fail("experiment.n_theta", "must be at least 4");
        }
        x.radii = e.numbers("radii", {0.1, 0.25, 0.5, 1.0});
        x.test_field = e.string("test_field", "rotated-gradient");
        if (x.test_field != "rotated-gradient" && x.test_field != "vortex" && x.test_field != "radial") {
            fail("experiment.test_field", "expected rotated-gradient, vortex or radial");
        }
    }
    if (x.N < 0) {
        fail("experiment.N", "must be non-negative");
    }
    e.finish();

    if (top.has("solver")) {
        Section s(top.raw("solver"), "solver");
        c.solver.rel_tol = s.positive("tol", 1e-10);
        const auto it = s.integer("max_iter", 50000);
        if (it < 1) {
            fail("solver.max_iter", "must be positive");
        }
        c.solver.max_iter = static_cast<std::size_t>(it);
        s.finish();
    }
    c.output = top.string("output", "runs");
    const auto seed = top.integer("seed", 1);
    if (seed < 0) {
        fail("seed", "must be non-negative");
    }
    c.seed = static_cast<std::uint64_t>(seed);
    top.finish();

    refresh_resolved(c);
    return c;
}

void refresh_resolved(RunConfig& c)
{
    c.resolved = resolve(c);
    json hashed = c.resolved;
    hashed.erase("output");
    c.hash = fnv1a_hex(hashed.dump());
}

RunConfig load_config(const std::filesystem::path& file, std::string_view experiment)
{
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open config file " + file.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw Error(ErrorKind::Config, "config is not valid JSON: " + std::string(err.what()));
    }
    return parse_config(j, experiment);
}

CoeffField make_field(const CoeffConfig& c, double epsilon)
{
    if (c.kind == "identity") {
        return CoeffField::identity();
    }
    if (c.kind == "constant") {
        return CoeffField::constant(c.matrix);
    }
    if (c.kind == "periodic") {
        return CoeffField::rotated_periodic(default_periodic_cell(c.kappa), c.rotation, epsilon, 1.0, "exp-sine");
    }
    if (c.kind == "laminate") {
        return CoeffField::rotated_periodic(laminate_cell(c.first, c.second), c.rotation, epsilon, 1.0, "laminate");
    }
    if (c.kind == "checkerboard") {
        return CoeffField::checkerboard(c.contrast, epsilon, c.seed);
    }
    throw Error(ErrorKind::Config, "unknown coefficient kind '" + c.kind + "'");
}

}  // namespace sectorhomog
