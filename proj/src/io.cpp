#include "ptint/io.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

#include "ptint/kernels.hpp"

namespace ptint::io {

namespace fs = std::filesystem;

// ---- profiles ----------------------------------------------------------------

std::string profile_csv(const RadialProfile& profile)
{
    std::string out = "r,u,du,f\n";
    out.reserve(out.size() + profile.size() * 100);
    for (std::size_t i = 0; i < profile.size(); ++i) {
        out += format_double(profile.grid.radii[i]);
        out += ',';
        out += format_double(profile.u[i]);
        out += ',';
        out += format_double(profile.du[i]);
        out += ',';
        out += format_double(profile.f[i]);
        out += '\n';
    }
    return out;
}

void write_profile_csv(const fs::path& path, const RadialProfile& profile)
{
    write_text_atomic(path, profile_csv(profile));
}

RadialProfile read_profile_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("r,u,du,f", 0) != 0)
        throw std::runtime_error(path.string() + ": expected header r,u,du,f");
    RadialProfile prof;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double v[4];
        std::size_t pos = 0;
        for (int c = 0; c < 4; ++c) {
            const std::size_t end = c < 3 ? line.find(',', pos) : line.size();
            if (end == std::string::npos)
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 4 columns");
            try {
                std::size_t used = 0;
                const std::string cell = line.substr(pos, end - pos);
                v[c] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number");
            }
            pos = end + 1;
        }
        prof.grid.radii.push_back(v[0]);
        prof.u.push_back(v[1]);
        prof.du.push_back(v[2]);
        prof.f.push_back(v[3]);
    }
    if (!prof.grid.valid()) throw std::runtime_error(path.string() + ": radii must be positive and increasing");
    return prof;
}

// ---- json --------------------------------------------------------------------

json number(double x)
{
    if (!std::isfinite(x)) return nullptr;
    return x;
}

json to_json(const Params& params)
{
    json j;
    j["d"] = params.d;
    j["sigma"] = params.sigma;
    j["p"] = params.p;
    j["lambda"] = params.lambda;
    if (params.alpha.is_free()) j["alpha"] = "free";
    else j["alpha"] = params.alpha.value();
    j["nonlinear"] = params.nonlinear;
    return j;
}

json to_json(const Outcome& o)
{
    json j;
    j["kind"] = to_string(o.kind);
    j["zeros"] = o.zeros;
    j["radius"] = number(o.radius);
    j["zero_radii"] = o.zero_radii;
    j["origin_sign_change"] = o.origin_sign_change;
    if (!o.note.empty()) j["note"] = o.note;
    return j;
}

json to_json(const BranchPoint& pt)
{
    json j;
    j["q"] = pt.q;
    j["a"] = pt.a;
    j["f0"] = pt.f0 ? number(*pt.f0) : json(nullptr);
    j["zero_count"] = pt.zero_count;
    j["alpha_kind"] = to_string(pt.alpha_kind);
    j["alpha"] = number(pt.alpha);
    j["action"] = number(pt.action);
    j["d_norm2"] = number(pt.d_norm2);
    j["lp_integral"] = number(pt.lp_norm);
    j["residuals"] = {{"ode", number(pt.residuals.ode)},
                      {"relation", number(pt.residuals.relation)},
                      {"decay_margin", number(pt.residuals.decay_margin)},
                      {"nehari", number(pt.residuals.nehari)}};
    j["outcome"] = to_json(pt.outcome);
    j["splice_radius"] = pt.profile.splice_radius;
    j["bracket"] = {pt.bracket_lo, pt.bracket_hi};
    j["certified"] = pt.certified;
    if (!pt.note.empty()) j["note"] = pt.note;
    return j;
}

json to_json(const VerificationReport& rep)
{
    json j;
    j["label"] = rep.label;
    j["regime"] = to_string(rep.regime);
    j["q_fit"] = {{"value", rep.fit.q}, {"stderr", rep.fit.q_stderr}};
    j["a_fit"] = {{"value", rep.fit.a}, {"stderr", rep.fit.a_stderr}};
    j["fit_window"] = {rep.fit.window_lo, rep.fit.window_hi};
    j["fit_condition"] = number(rep.fit.condition);
    j["q_flux"] = {{"value", rep.flux.q}, {"stderr", rep.flux.stderr_}, {"converged", rep.flux.converged}};
    j["flux_samples"] = {{"r", rep.flux.radii}, {"q", rep.flux.values}};
    j["q_agreement"] = rep.q_agreement;
    j["f0"] = rep.f0 ? number(*rep.f0) : json(nullptr);
    j["alpha_kind"] = to_string(rep.alpha_kind);
    j["alpha"] = number(rep.alpha);
    j["relation_residual"] = number(rep.relation_residual);
    if (rep.weak) {
        const WeakFit& w = *rep.weak;
        j["weak"] = {{"log", w.log_flag},
                     {"exponent", number(w.exponent)},
                     {"coefficient", w.coefficient},
                     {"predicted_coefficient", w.predicted_coefficient},
                     {"constant", w.constant},
                     {"window", {w.window_lo, w.window_hi}}};
    }
    j["decay_rate"] = rep.decay_rate;
    j["bound_const"] = number(rep.bound_const);
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", number(c.value)}, {"tolerance", c.tolerance}});
    j["checks"] = checks;
    j["pass"] = rep.pass;
    return j;
}

json to_json(const FunctionalReport& r)
{
    return {{"action", r.action},
            {"d_norm", r.d_norm},
            {"lp_norm", r.lp_norm},
            {"grad_norm", r.grad_norm},
            {"nehari_residual", r.nehari_residual}};
}

json to_json(const MinimizeResult& res)
{
    json j;
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["message"] = res.message;
    j["q"] = res.state.q;
    j["report"] = to_json(res.report);
    json trace = json::array();
    for (const auto& t : res.trace) trace.push_back({t.action, t.grad_norm});
    j["trace"] = trace;
    return j;
}

json to_json(const GeometryReport& g)
{
    json j;
    j["radii"] = g.radii;
    json mins = json::array();
    for (double v : g.min_values) mins.push_back(number(v));
    j["min_values"] = mins;
    j["rho_star"] = g.rho_star;
    j["small_sphere_positive"] = g.small_sphere_positive;
    j["all_rays_negative"] = g.all_rays_negative;
    j["mountain_pass_level"] = number(g.mountain_pass_level);
    j["best_direction"] = g.best_direction;
    j["non_normalizable"] = g.non_normalizable;
    json dirs = json::array();
    for (const auto& d : g.directions)
        dirs.push_back({{"normalizable", d.normalizable},
                        {"d_norm2", d.d_norm2},
                        {"r_star", number(d.r_star)},
                        {"ray_max", number(d.ray_max)}});
    j["directions"] = dirs;
    return j;
}

void write_text_atomic(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

// ---- config text ---------------------------------------------------------------

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ConfigText ConfigText::parse(const std::string& text)
{
    ConfigText ct;
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", lineno);
            ct.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
        if (section.empty()) throw ConfigError("key outside of a [section]", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno);
        if (ct.sections[section].count(key)) throw ConfigError("duplicate key '" + key + "'", lineno);
        ct.sections[section][key] = value;
        ct.lines[section][key] = lineno;
    }
    return ct;
}

std::string ConfigText::str() const
{
    std::string out;
    for (const auto& [name, kv] : sections) {
        if (!out.empty()) out += '\n';
        out += "[" + name + "]\n";
        for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    }
    return out;
}

// ---- run config ----------------------------------------------------------------

namespace {

using Slot = std::variant<double*, int*, bool*, std::string*, std::uint64_t*>;

struct Binding {
    std::string section;
    std::string key;
    Slot slot;
};

std::vector<Binding> bindings(RunConfig& c)
{
    IntegrateControls& ig = c.shoot.integ;
    return {
        {"run", "mode", &c.mode},
        {"run", "k", &c.k},
        {"run", "q", &c.q},
        {"run", "q_points", &c.q_points},
        {"run", "q_lo", &c.q_lo},
        {"run", "q_hi", &c.q_hi},
        {"run", "directions", &c.directions},
        {"run", "seed", &c.seed},
        {"run", "output", &c.output},
        {"run", "crosscheck_sup_tol", &c.crosscheck_sup_tol},
        {"run", "crosscheck_action_tol", &c.crosscheck_action_tol},
        {"shoot", "a_lo", &c.shoot.a_lo},
        {"shoot", "a_hi", &c.shoot.a_hi},
        {"shoot", "scan_points", &c.shoot.scan_points},
        {"shoot", "scan_scale", &c.shoot.scan_scale},
        {"shoot", "max_widen", &c.shoot.max_widen},
        {"shoot", "bisect_rel_tol", &c.shoot.bisect_rel_tol},
        {"shoot", "max_bisect", &c.shoot.max_bisect},
        {"shoot", "max_branch", &c.shoot.max_branch},
        {"shoot", "max_depth", &c.shoot.max_depth},
        {"shoot", "q_lo", &c.shoot.q_lo},
        {"shoot", "q_hi", &c.shoot.q_hi},
        {"shoot", "q_per_decade", &c.shoot.q_per_decade},
        {"shoot", "agree_tol", &c.shoot.agree_tol},
        {"shoot", "decay_margin_tol", &c.shoot.decay_margin_tol},
        {"integrate", "abs_tol", &ig.abs_tol},
        {"integrate", "rel_tol", &ig.rel_tol},
        {"integrate", "r0", &ig.r0},
        {"integrate", "r_max", &ig.r_max},
        {"integrate", "grid_ratio", &ig.grid_ratio},
        {"integrate", "tail_step", &ig.tail_step},
        {"integrate", "max_step", &ig.max_step},
        {"integrate", "blow_factor", &ig.blow_factor},
        {"integrate", "tol_decay", &ig.tol_decay},
        {"integrate", "decay_band", &ig.decay_band},
        {"integrate", "max_zeros", &ig.max_zeros},
        {"integrate", "stop_on_negative_energy", &ig.stop_on_negative_energy},
        {"variational", "r1", &c.var_grid.r1},
        {"variational", "ratio", &c.var_grid.ratio},
        {"variational", "h", &c.var_grid.h},
        {"variational", "R", &c.var_grid.R},
        {"variational", "gauss_points", &c.var_grid.gauss_points},
        {"variational", "singular_points", &c.var_grid.singular_points},
        {"variational", "gtol", &c.minimize.gtol},
        {"variational", "max_iter", &c.minimize.max_iter},
        {"variational", "armijo", &c.minimize.armijo},
        {"variational", "initial_step", &c.minimize.initial_step},
        {"verify", "q_agreement", &c.verify.q_agreement},
        {"verify", "relation", &c.verify.relation},
        {"verify", "weak_exponent", &c.verify.weak_exponent},
        {"verify", "weak_coefficient", &c.verify.weak_coefficient},
        {"verify", "decay_fraction", &c.verify.decay_fraction},
    };
}

void assign(Slot slot, const std::string& key, const std::string& v)
{
    auto bad = [&](const char* what) {
        return std::invalid_argument("key '" + key + "': expected " + what + ", got '" + v + "'");
    };
    if (auto* d = std::get_if<double*>(&slot)) {
        if (v == "nan" || v == "auto") {
            **d = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        double x = 0.0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
        if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw bad("a real number");
        **d = x;
    } else if (auto* i = std::get_if<int*>(&slot)) {
        int x = 0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
        if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw bad("an integer");
        **i = x;
    } else if (auto* u = std::get_if<std::uint64_t*>(&slot)) {
        std::uint64_t x = 0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
        if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw bad("a nonnegative integer");
        **u = x;
    } else if (auto* b = std::get_if<bool*>(&slot)) {
        if (v == "true" || v == "1") **b = true;
        else if (v == "false" || v == "0") **b = false;
        else throw bad("true/false");
    } else {
        *std::get<std::string*>(slot) = v;
    }
}

std::string render(const Slot& slot)
{
    if (auto* d = std::get_if<double*>(&slot)) return std::isnan(**d) ? std::string("auto") : format_double(**d);
    if (auto* i = std::get_if<int*>(&slot)) return std::to_string(**i);
    if (auto* u = std::get_if<std::uint64_t*>(&slot)) return std::to_string(**u);
    if (auto* b = std::get_if<bool*>(&slot)) return **b ? "true" : "false";
    return *std::get<std::string*>(slot);
}

int line_of(const ConfigText& t, const std::string& section, const std::string& key)
{
    const auto s = t.lines.find(section);
    if (s == t.lines.end()) return 0;
    const auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second;
}

}  // namespace

RunConfig RunConfig::from_text(const ConfigText& text)
{
    RunConfig c;
    auto binds = bindings(c);
    for (const auto& [section, kv] : text.sections) {
        if (section == "params") continue;
        for (const auto& [key, value] : kv) {
            const auto it = std::find_if(binds.begin(), binds.end(),
                                         [&](const Binding& b) { return b.section == section && b.key == key; });
            const int line = line_of(text, section, key);
            if (it == binds.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
            try {
                assign(it->slot, key, value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what(), line);
            }
        }
    }
    const auto ps = text.sections.find("params");
    if (ps != text.sections.end()) {
        for (const auto& [key, value] : ps->second) {
            try {
                params_from_keyvalues({{key, value}});
            } catch (const std::invalid_argument& e) {
                // single-key validation can fail only on the cross-key rules;
                // report those against the whole record below
                const std::string msg = e.what();
                if (msg.find("key") != std::string::npos) throw ConfigError(msg, line_of(text, "params", key));
            }
        }
        try {
            c.params = params_from_keyvalues(ps->second);
        } catch (const std::invalid_argument& e) {
            // range errors name their key first ("p must ...", "d = 3 requires p < 3" goes to p)
            const std::string msg = e.what();
            std::string key = msg.substr(0, msg.find(' '));
            if (msg.rfind("d = 3 requires", 0) == 0) key = "p";
            throw ConfigError("[params] " + msg, line_of(text, "params", key));
        }
    }
    auto check = [&](bool ok, const std::string& section, const std::string& key, const std::string& what) {
        if (!ok) throw ConfigError("[" + section + "] " + key + ": " + what, line_of(text, section, key));
    };
    check(c.mode == "ground" || c.mode == "nodal" || c.mode == "fixed-q", "run", "mode",
          "expected ground, nodal or fixed-q");
    check(c.k >= 0, "run", "k", "must be >= 0");
    check(c.q_points >= 1, "run", "q_points", "must be >= 1");
    check(c.q_lo > 0 && c.q_hi >= c.q_lo, "run", "q_lo", "need 0 < q_lo <= q_hi");
    check(c.directions >= 1, "run", "directions", "must be >= 1");
    check(!c.output.empty(), "run", "output", "must not be empty");
    check(c.shoot.scan_points >= 3, "shoot", "scan_points", "must be >= 3");
    check(c.shoot.scan_scale > 0, "shoot", "scan_scale", "must be > 0");
    check(c.shoot.q_lo > 0 && c.shoot.q_hi > c.shoot.q_lo, "shoot", "q_lo", "need 0 < q_lo < q_hi");
    check(c.shoot.q_per_decade >= 1, "shoot", "q_per_decade", "must be >= 1");
    check(c.shoot.integ.abs_tol > 0 && c.shoot.integ.rel_tol > 0, "integrate", "abs_tol", "tolerances must be > 0");
    check(c.shoot.integ.grid_ratio > 1, "integrate", "grid_ratio", "must be > 1");
    check(c.var_grid.ratio > 1, "variational", "ratio", "must be > 1");
    check(c.var_grid.h > 0 && c.var_grid.r1 > 0 && c.var_grid.R > c.var_grid.r1, "variational", "R",
          "need 0 < r1 < R and h > 0");
    check(c.minimize.gtol > 0, "variational", "gtol", "must be > 0");
    return c;
}

ConfigText RunConfig::to_text() const
{
    ConfigText t;
    t.sections["params"] = params_to_keyvalues(params);
    RunConfig copy = *this;
    for (const auto& b : bindings(copy)) t.sections[b.section][b.key] = render(b.slot);
    return t;
}

RunConfig load_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string(), 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return RunConfig::from_text(ConfigText::parse(ss.str()));
}

std::string versions_stamp()
{
    std::ostringstream os;
    os << "ptint: 1.0.0\n";
#if defined(__clang__)
    os << "compiler: clang " << __clang_major__ << '.' << __clang_minor__ << '.' << __clang_patchlevel__ << '\n';
#elif defined(__GNUC__)
    os << "compiler: gcc " << __GNUC__ << '.' << __GNUC_MINOR__ << '.' << __GNUC_PATCHLEVEL__ << '\n';
#endif
    os << "eigen: " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n';
    os << "boost: " << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100
       << '\n';
    os << "nlohmann_json: " << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.'
       << NLOHMANN_JSON_VERSION_PATCH << '\n';
    os << "kernels: " << kernels::to_string(kernels::active().isa) << '\n';
    return os.str();
}

}  // namespace ptint::io
