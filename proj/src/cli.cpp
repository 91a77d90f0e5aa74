#include "radshock/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "radshock/chord.hpp"
#include "radshock/evolution.hpp"
#include "radshock/expr.hpp"
#include "radshock/flux.hpp"
#include "radshock/profile.hpp"
#include "radshock/regularity.hpp"
#include "radshock/system.hpp"

namespace radshock {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size())
            throw ConfigError("key '" + key + "' has trailing characters: " + text);
        if (!std::isfinite(v))
            throw ConfigError("key '" + key + "' must be finite");
        return v;
    } catch (const std::invalid_argument&) {
        throw ConfigError("key '" + key + "' is not a number: " + text);
    } catch (const std::out_of_range&) {
        throw ConfigError("key '" + key + "' is out of range: " + text);
    }
}

FluxModel make_scalar_flux(const std::string& spec) {
    if (spec == "burgers" || spec == "quartic" || spec == "cubic")
        return FluxModel::builtin(spec);
    return FluxModel::parse(spec);
}

std::string kvline(const std::string& key, double v) {
    return key + "=" + format17(v) + "\n";
}

}  // namespace

std::string format17(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

RunConfig RunConfig::from_file(const std::string& mode, const std::string& path) {
    RunConfig cfg;
    cfg.mode = mode;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("malformed line " + std::to_string(lineno) +
                              " in " + path + " (expected key=value)");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("empty key on line " + std::to_string(lineno) +
                              " in " + path);
        cfg.kv[key] = val;
    }
    return cfg;
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

std::string RunConfig::get_or(const std::string& key, const std::string& def) const {
    auto it = kv.find(key);
    return it == kv.end() ? def : it->second;
}

double RunConfig::num(const std::string& key) const {
    return parse_number(key, get(key));
}

double RunConfig::num_or(const std::string& key, double def) const {
    auto it = kv.find(key);
    return it == kv.end() ? def : parse_number(key, it->second);
}

int RunConfig::integer(const std::string& key) const {
    double v = num(key);
    if (v != std::floor(v))
        throw ConfigError("key '" + key + "' must be an integer");
    return static_cast<int>(v);
}

int RunConfig::integer_or(const std::string& key, int def) const {
    return has(key) ? integer(key) : def;
}

std::vector<double> RunConfig::vec(const std::string& key) const {
    const std::string& text = get(key);
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("key '" + key + "' has an empty component");
        out.push_back(parse_number(key, item));
    }
    if (out.empty()) throw ConfigError("key '" + key + "' is empty");
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write to " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

namespace {

// ---------------------------------------------------------------- profile

int mode_profile(const RunConfig& cfg) {
    FluxModel flux = make_scalar_flux(cfg.get("flux"));
    double um = cfg.num("uminus");
    double up = cfg.num("uplus");
    if (um == up) throw ConfigError("coincident states (uminus == uplus)");
    double eps = cfg.num("eps");
    if (eps <= 0.0) throw ConfigError("key 'eps' must be positive");

    ChordFunction chord(flux, shock_speed(flux, um, up));
    AssemblyOptions opts;
    opts.ode_rel_tol = cfg.num_or("ode_rel_tol", opts.ode_rel_tol);
    RadiativeProfile prof = assemble_profile(chord, eps, opts);

    write_atomic(cfg.get_or("out", "profile.csv"), profile_csv(prof));
    write_atomic(cfg.get_or("jumps_out", "jumps.csv"), jumps_csv(prof));
    if (cfg.has("report_out")) {
        std::string rep;
        rep += kvline("eps", eps);
        rep += kvline("s", chord.triple().s);
        int njumps = 0;
        for (const auto& j : prof.jumps)
            if (!j.continuous) ++njumps;
        rep += "n_jumps=" + std::to_string(njumps) + "\n";
        rep += kvline("decay_rate_left", prof.decay_rate_left);
        rep += kvline("decay_rate_right", prof.decay_rate_right);
        write_atomic(cfg.get("report_out"), rep);
    }
    return kExitOk;
}

// -------------------------------------------------------------- regularity

int mode_regularity(const RunConfig& cfg) {
    FluxModel flux = make_scalar_flux(cfg.get("flux"));
    double um = cfg.num("uminus");
    double up = cfg.num("uplus");
    if (um == up) throw ConfigError("coincident states (uminus == uplus)");
    if (um < up)
        throw ConfigError("regularity analysis needs a decreasing shock "
                          "(uminus > uplus)");
    int nmax = cfg.integer_or("nmax", 5);
    ScaledFlux sf(flux, up, um - up);
    RegularityReport rep = expansion_and_thresholds(sf, nmax);
    write_atomic(cfg.get_or("out", "regularity.txt"), rep.to_text());
    return kExitOk;
}

// ------------------------------------------------------------------ system

int mode_system(const RunConfig& cfg) {
    std::vector<std::string> comps;
    for (int i = 1;; ++i) {
        std::string key = "f" + std::to_string(i);
        if (!cfg.has(key)) break;
        comps.push_back(cfg.get(key));
    }
    if (comps.size() < 2)
        throw ConfigError("system mode needs flux components f1, f2, ...");
    FluxModel flux = FluxModel::parse_components(comps);
    const int n = flux.dimension();

    auto to_eigen = [&](const std::string& key) {
        std::vector<double> v = cfg.vec(key);
        if (static_cast<int>(v.size()) != n)
            throw ConfigError("key '" + key + "' must have " + std::to_string(n) +
                              " components");
        return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                 static_cast<Eigen::Index>(v.size()))
            .eval();
    };
    SystemModel sys(flux, to_eigen("L"), to_eigen("G"), cfg.num_or("R", 1.0));
    int k = cfg.integer("k");
    if (k < 1 || k > n) throw ConfigError("key 'k' out of range");
    VectorShock vs = vector_shock(sys, to_eigen("uminus"), to_eigen("uplus"));

    double ma_minus = main_assumption(sys, vs.u_minus, k);
    double ma_plus = main_assumption(sys, vs.u_plus, k);
    if (ma_minus <= 0.0 || ma_plus <= 0.0)
        throw AdmissibilityError("diffusive-coupling condition (l_k.L)(G.r_k) "
                                 "is nonpositive at an end state");

    ReductionMap map = build_reduction(sys, vs, k);
    double eps = cfg.num_or("eps", 1.0);
    if (eps <= 0.0) throw ConfigError("key 'eps' must be positive");

    ChordFunction chord = map.reduced_chord();
    RadiativeProfile scalar = assemble_profile(chord, eps);
    SystemProfile lifted = lift_profile(map, scalar);

    std::string rep;
    rep += kvline("s", vs.s);
    rep += kvline("w_minus", map.w_minus());
    rep += kvline("w_plus", map.w_plus());
    rep += kvline("main_assumption_minus", ma_minus);
    rep += kvline("main_assumption_plus", ma_plus);
    rep += kvline("fhat_prime_minus", map.Fhat_prime(map.w_minus()));
    rep += kvline("fhat_prime_plus", map.Fhat_prime(map.w_plus()));
    rep += kvline("d2fhat_minus", map.Fhat_second(map.w_minus()));
    rep += kvline("d2fhat_minus_ref", convexity_reference(sys, vs.u_minus, k));
    rep += kvline("residual_flux", lifted.residual_flux);
    rep += kvline("residual_constraint", lifted.residual_constraint);
    rep += "n_jumps=" + std::to_string(lifted.jumps.size()) + "\n";

    bool all_admissible = true;
    for (std::size_t j = 0; j < lifted.jumps.size(); ++j) {
        const auto& ij = lifted.jumps[j];
        JumpTranslation tr = translate_admissibility(map, ij.u_left, ij.u_right);
        std::string p = "jump" + std::to_string(j) + "_";
        rep += kvline(p + "xi", ij.xi0);
        rep += kvline(p + "rh_residual", tr.rh_residual);
        rep += p + "lax=" + (tr.lax ? "1" : "0") + "\n";
        rep += p + "liu=" + (tr.liu ? "1" : "0") + "\n";
        rep += kvline(p + "liu_min_margin", tr.liu_min_margin);
        rep += p + "sign_consistent=" + (tr.sign_consistent ? "1" : "0") + "\n";
        if (!tr.no_jump && (!tr.lax || !tr.liu)) all_admissible = false;
    }
    write_atomic(cfg.get_or("out", "system.txt"), rep);

    if (cfg.has("profile_out")) {
        std::ostringstream os;
        os << "xi,w,z,q";
        for (int c = 1; c <= n; ++c) os << ",u" << c;
        os << "\n";
        for (std::size_t i = 0; i < lifted.xi.size(); ++i) {
            os << format17(lifted.xi[i]) << ',' << format17(lifted.w[i]) << ','
               << format17(lifted.z[i]) << ',' << format17(lifted.q[i]);
            for (int c = 0; c < n; ++c) os << ',' << format17(lifted.u[i](c));
            os << "\n";
        }
        write_atomic(cfg.get("profile_out"), os.str());
    }
    if (!all_admissible)
        throw AdmissibilityError("an inner jump of the lifted profile fails "
                                 "the Lax/Liu translation");
    return kExitOk;
}

// ------------------------------------------------------------------ evolve

Grid1D grid_from(const RunConfig& cfg) {
    Grid1D g;
    g.a = cfg.num("xmin");
    g.b = cfg.num("xmax");
    if (g.b <= g.a) throw ConfigError("key 'xmax' must exceed 'xmin'");
    g.M = cfg.integer("cells");
    if (g.M < 4) throw ConfigError("key 'cells' must be at least 4");
    std::string bc = cfg.get_or("boundary", "outflow");
    if (bc == "outflow")
        g.mode = BoundaryMode::Outflow;
    else if (bc == "periodic")
        g.mode = BoundaryMode::Periodic;
    else
        throw ConfigError("key 'boundary' must be outflow or periodic");
    return g;
}

EvolveParams params_from(const RunConfig& cfg) {
    EvolveParams p;
    p.eps = cfg.num_or("eps", 1.0);
    p.R = cfg.num_or("R", 1.0);
    if (p.eps <= 0.0) throw ConfigError("key 'eps' must be positive");
    if (p.R <= 0.0) throw ConfigError("key 'R' must be positive");
    std::string form = cfg.get_or("form", "elliptic");
    if (form == "elliptic")
        p.form = SourceForm::Elliptic;
    else if (form == "kernel")
        p.form = SourceForm::Kernel;
    else
        throw ConfigError("key 'form' must be elliptic or kernel");
    p.cfl = cfg.num_or("cfl", p.cfl);
    return p;
}

int mode_evolve(const RunConfig& cfg) {
    FluxModel flux = make_scalar_flux(cfg.get("flux"));
    Grid1D g = grid_from(cfg);
    EvolveParams p = params_from(cfg);
    Evolver ev(flux, g, p);

    std::string init = cfg.get_or("init", "riemann");
    FieldState s;
    if (init == "riemann") {
        double um = cfg.num("uminus");
        double up = cfg.num("uplus");
        ev.set_farfield({um}, {up});
        double x0 = cfg.num_or("x0", 0.5 * (g.a + g.b));
        s = ev.init_scalar([&](double x) { return x < x0 ? um : up; });
    } else if (init == "sine") {
        double amp = cfg.num_or("amp", 0.3);
        double mean = cfg.num_or("mean", 0.0);
        double period = g.b - g.a;
        s = ev.init_scalar([&](double x) {
            return mean + amp * std::sin(2.0 * M_PI * (x - g.a) / period);
        });
    } else {
        throw ConfigError("key 'init' must be riemann or sine");
    }

    double T = cfg.num("T");
    if (T < 0.0) throw ConfigError("key 'T' must be nonnegative");
    ev.advance(s, T);

    // snapshot: profile CSV schema plus a leading time column; z solves
    // -eps z'' + R z = u with the same boundary handling, so dz = -q
    std::vector<double> q = ev.radiation(s);
    FieldState zsrc = s;
    std::vector<double> z(g.M);
    {
        const double dx = g.dx();
        const double r = p.eps / (dx * dx);
        std::vector<double> rhs(s.u);
        if (g.mode == BoundaryMode::Periodic) {
            // cyclic solve via the shared elliptic path on the antiderivative
            // relation is unnecessary; solve directly
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g.M, g.M);
            for (int i = 0; i < g.M; ++i) {
                A(i, (i + g.M - 1) % g.M) += -r;
                A(i, (i + 1) % g.M) += -r;
                A(i, i) += p.R + 2.0 * r;
            }
            Eigen::VectorXd b =
                Eigen::Map<const Eigen::VectorXd>(rhs.data(), g.M);
            Eigen::VectorXd x = A.partialPivLu().solve(b);
            for (int i = 0; i < g.M; ++i) z[i] = x(i);
        } else {
            std::vector<double> sub(g.M - 1, -r), diag(g.M, p.R + 2.0 * r),
                sup(g.M - 1, -r);
            rhs.front() += r * s.u.front();
            rhs.back() += r * s.u.back();
            // forward elimination
            for (int i = 1; i < g.M; ++i) {
                double w = sub[i - 1] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            z[g.M - 1] = rhs[g.M - 1] / diag[g.M - 1];
            for (int i = g.M - 2; i >= 0; --i)
                z[i] = (rhs[i] - sup[i] * z[i + 1]) / diag[i];
        }
    }
    std::ostringstream os;
    os << "t,xi,z,dz,ddz,u,q\n";
    for (int i = 0; i < g.M; ++i) {
        double ddz = (p.R * z[i] - s.u[i]) / p.eps;
        os << format17(s.t) << ',' << format17(g.center(i)) << ','
           << format17(z[i]) << ',' << format17(-q[i]) << ',' << format17(ddz)
           << ',' << format17(s.u[i]) << ',' << format17(q[i]) << "\n";
    }
    write_atomic(cfg.get_or("out", "snapshot.csv"), os.str());
    return kExitOk;
}

// ------------------------------------------------------------------ verify

int mode_verify(const RunConfig& cfg) {
    FluxModel flux = make_scalar_flux(cfg.get("flux"));
    double um = cfg.num("uminus");
    double up = cfg.num("uplus");
    if (um == up) throw ConfigError("coincident states (uminus == uplus)");
    double eps = cfg.num("eps");
    if (eps <= 0.0) throw ConfigError("key 'eps' must be positive");

    ChordFunction chord(flux, shock_speed(flux, um, up));
    RadiativeProfile prof = assemble_profile(chord, eps);

    Grid1D g = grid_from(cfg);
    if (g.mode != BoundaryMode::Outflow)
        throw ConfigError("verify mode requires boundary=outflow");
    EvolveParams p = params_from(cfg);
    p.eps = eps;
    Evolver ev(flux, g, p);
    double T = cfg.num("T");
    double s_exact = cfg.num_or("s", chord.triple().s);
    DriftReport rep = verify_traveling_wave(ev, prof, s_exact, T);

    std::string out;
    out += kvline("T", T);
    out += kvline("s_exact", s_exact);
    out += kvline("l1_drift", rep.l1_drift);
    out += kvline("best_shift", rep.best_shift);
    out += kvline("recovered_speed", rep.recovered_speed);
    out += kvline("front_start", rep.front_start);
    out += kvline("front_end", rep.front_end);
    write_atomic(cfg.get_or("out", "verify.txt"), out);
    return kExitOk;
}

int dispatch(const RunConfig& cfg) {
    if (cfg.mode == "profile") return mode_profile(cfg);
    if (cfg.mode == "regularity") return mode_regularity(cfg);
    if (cfg.mode == "system") return mode_system(cfg);
    if (cfg.mode == "evolve") return mode_evolve(cfg);
    if (cfg.mode == "verify") return mode_verify(cfg);
    throw ConfigError("unknown mode '" + cfg.mode +
                      "' (expected profile|regularity|system|evolve|verify)");
}

int run_one(const RunConfig& cfg) {
    try {
        return dispatch(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "config error: flux expression: " << e.what() << "\n";
        return kExitConfig;
    } catch (const AdmissibilityError& e) {
        std::cerr << "admissibility failure: " << e.what() << "\n";
        return kExitAdmissibility;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace

int run_config(const RunConfig& cfg) {
    auto it = cfg.kv.find("sweep");
    if (it == cfg.kv.end()) return run_one(cfg);

    // sweep=<key>:<v1>,<v2>,... — one worker per value; every output path
    // must carry a {sweep} placeholder so workers write to distinct files
    const std::string& spec = it->second;
    std::size_t colon = spec.find(':');
    if (colon == std::string::npos) {
        std::cerr << "config error: key 'sweep' must look like key:v1,v2,...\n";
        return kExitConfig;
    }
    std::string skey = trim(spec.substr(0, colon));
    std::vector<std::string> values;
    {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) values.push_back(item);
        }
    }
    if (skey.empty() || values.empty()) {
        std::cerr << "config error: key 'sweep' has no key or no values\n";
        return kExitConfig;
    }

    std::vector<RunConfig> runs;
    for (const std::string& v : values) {
        RunConfig sub = cfg;
        sub.kv.erase("sweep");
        sub.kv[skey] = v;
        bool substituted = false;
        auto is_out_key = [](const std::string& key) {
            return key == "out" ||
                   (key.size() > 4 &&
                    key.compare(key.size() - 4, 4, "_out") == 0);
        };
        for (auto& [key, val] : sub.kv) {
            if (!is_out_key(key)) continue;
            std::size_t pos;
            while ((pos = val.find("{sweep}")) != std::string::npos) {
                val.replace(pos, 7, v);
                substituted = true;
            }
        }
        if (!substituted) {
            std::cerr << "config error: sweep requires a {sweep} placeholder "
                         "in an output path\n";
            return kExitConfig;
        }
        runs.push_back(std::move(sub));
    }

    std::vector<int> codes(runs.size(), 0);
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    for (unsigned t = 0; t < std::min<std::size_t>(workers, runs.size()); ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= runs.size()) return;
                    i = next++;
                }
                codes[i] = run_one(runs[i]);
            }
        });
    }
    for (auto& th : pool) th.join();
    int rc = 0;
    for (int c : codes) rc = std::max(rc, c);
    return rc;
}

}  // namespace radshock
