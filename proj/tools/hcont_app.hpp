/// \file hcont_app.hpp
/// Batch front-end: run configuration, command dispatch, artifact and
/// manifest writing.
#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hcont/hcont.hpp"

namespace hcont::cli {

using ordered_json = nlohmann::ordered_json;

enum class Command { eigs, bound, powerlaw, rates, boundary, transplant };
enum class Mode { f64, dd };
enum class Format { csv, json };

inline constexpr int exit_config = 1;
inline constexpr int exit_numeric = 2;
inline constexpr int exit_io = 3;

inline std::string command_name(Command c) {
    switch (c) {
        case Command::eigs: return "eigs";
        case Command::bound: return "bound";
        case Command::powerlaw: return "powerlaw";
        case Command::rates: return "rates";
        case Command::boundary: return "boundary";
        case Command::transplant: return "transplant";
    }
    return "";
}

inline std::string command_help(Command c) {
    switch (c) {
        case Command::eigs: return "Operator spectrum and decay rates of a curve";
        case Command::bound: return "Error bound M(eps) at extrapolation points";
        case Command::powerlaw: return "Power-law exponents on a segment";
        case Command::rates: return "Asymptotic rate constants of a curve";
        case Command::boundary: return "Closed-form bounds for data on [-1,1]";
        case Command::transplant: return "Exponents transplanted to the half-strip";
    }
    return {};
}

inline Command parse_command(const std::string& s) {
    for (Command c : {Command::eigs, Command::bound, Command::powerlaw, Command::rates, Command::boundary,
                      Command::transplant})
        if (command_name(c) == s) return c;
    throw ConfigError("unknown command '" + s + "'");
}

inline Mode parse_mode(const std::string& s) {
    if (s == "f64") return Mode::f64;
    if (s == "dd") return Mode::dd;
    throw ConfigError("mode must be f64 or dd, got '" + s + "'");
}

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ConfigError("format must be csv or json, got '" + s + "'");
}

/// Logarithmic grid from min to max with per_decade points per decade.
struct EpsGrid {
    double min = 1e-12;
    double max = 1e-3;
    int per_decade = 4;

    [[nodiscard]] std::vector<double> values() const {
        if (!(min > 0.0) || !(max >= min)) throw ConfigError("eps grid needs 0 < min <= max");
        if (per_decade < 1) throw ConfigError("eps grid needs per_decade >= 1");
        const double lo = std::log10(min), hi = std::log10(max);
        const long count = std::lround((hi - lo) * per_decade);
        std::vector<double> v;
        for (long k = 0; k <= count; ++k) v.push_back(std::pow(10.0, lo + double(k) / per_decade));
        v.back() = max;
        v.front() = min;
        return v;
    }
};

/// "1e-12..1e-3" or a single value.
inline EpsGrid parse_eps(const std::string& s, int per_decade) {
    EpsGrid g;
    g.per_decade = per_decade;
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        g.min = g.max = detail::parse_double(s, "--eps");
    } else {
        g.min = detail::parse_double(std::string_view(s).substr(0, dots), "--eps");
        g.max = detail::parse_double(std::string_view(s).substr(dots + 2), "--eps");
    }
    return g;
}

struct RunConfig {
    Command command = Command::eigs;
    std::optional<std::string> curve;
    std::vector<std::string> z_list;
    std::optional<EpsGrid> eps;
    int n = 80;
    Mode mode = Mode::dd;
    std::string output;
    Format format = Format::csv;
    int jobs = 1;
    std::vector<double> h_limit;
    std::vector<double> x_list;

    /// Canonical form used for hashing; output path and job count excluded.
    [[nodiscard]] ordered_json canonical() const {
        ordered_json j;
        j["command"] = command_name(command);
        j["curve"] = curve ? parse_curve(*curve).literal() : "";
        ordered_json zs = ordered_json::array();
        for (const auto& z : z_list) {
            const auto c = parse_complex(z);
            zs.push_back({to_string(c.re), to_string(c.im)});
        }
        j["z"] = zs;
        if (eps) j["eps"] = {{"min", to_string(eps->min)}, {"max", to_string(eps->max)}, {"per_decade", eps->per_decade}};
        else j["eps"] = nullptr;
        j["n"] = n;
        j["mode"] = mode == Mode::dd ? "dd" : "f64";
        j["format"] = format == Format::csv ? "csv" : "json";
        ordered_json hs = ordered_json::array();
        for (double h : h_limit) hs.push_back(to_string(h));
        j["h_limit"] = hs;
        ordered_json xs = ordered_json::array();
        for (double x : x_list) xs.push_back(to_string(x));
        j["x"] = xs;
        return j;
    }
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string config_hash(const RunConfig& cfg) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(cfg.canonical().dump());
    return os.str();
}

/// Fills fields present in a JSON config file.
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
    try {
        if (j.contains("command")) cfg.command = parse_command(j.at("command").get<std::string>());
        if (j.contains("curve")) cfg.curve = j.at("curve").get<std::string>();
        if (j.contains("z")) {
            cfg.z_list.clear();
            if (j.at("z").is_array())
                for (const auto& z : j.at("z")) cfg.z_list.push_back(z.get<std::string>());
            else cfg.z_list.push_back(j.at("z").get<std::string>());
        }
        if (j.contains("eps")) {
            const auto& e = j.at("eps");
            if (e.is_string()) {
                cfg.eps = parse_eps(e.get<std::string>(), 4);
            } else if (e.is_number()) {
                cfg.eps = EpsGrid{e.get<double>(), e.get<double>(), 4};
            } else {
                EpsGrid g;
                g.min = e.at("min").get<double>();
                g.max = e.at("max").get<double>();
                g.per_decade = e.value("per_decade", 4);
                cfg.eps = g;
            }
        }
        if (j.contains("n")) cfg.n = j.at("n").get<int>();
        if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
        if (j.contains("format")) cfg.format = parse_format(j.at("format").get<std::string>());
        if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
        if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
        if (j.contains("h_limit")) cfg.h_limit = j.at("h_limit").get<std::vector<double>>();
        if (j.contains("x")) cfg.x_list = j.at("x").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
}

inline nlohmann::json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

/// Named output produced by a command; the primary artifact has an empty suffix.
struct Artifact {
    std::string suffix;
    std::string content;
};

struct RunResult {
    std::vector<Artifact> artifacts;
    ordered_json manifest_extra = ordered_json::object();
};

/// Runs fn(i) for i in [0, count) on up to `jobs` threads; results keep input order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, int jobs, F fn) {
    std::vector<std::optional<R>> out(count);
    std::vector<std::exception_ptr> errs(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i].emplace(fn(i));
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const std::size_t nthreads = std::max<std::size_t>(1, std::min<std::size_t>(count, std::size_t(std::max(jobs, 1))));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
    std::vector<R> res;
    res.reserve(count);
    for (auto& o : out) res.push_back(std::move(*o));
    return res;
}

namespace detail {

inline double mode_floor(Mode m) { return m == Mode::dd ? 1e-16 : 1e-8; }

inline std::vector<Complex<double>> parse_z_list(const RunConfig& cfg, const std::optional<CurveSpec>& curve) {
    std::vector<Complex<double>> zs;
    for (const auto& s : cfg.z_list) {
        const auto z = parse_complex(s);
        if (!(z.im > 0.0)) throw ConfigError("z = " + s + " must lie in the upper half-plane");
        if (curve && distance_to_curve(*curve, z) < 1e-12) throw ConfigError("z = " + s + " lies on the curve");
        zs.push_back(z);
    }
    return zs;
}

inline std::vector<double> eps_values(const RunConfig& cfg) {
    if (!cfg.eps) throw ConfigError("--eps is required for command " + command_name(cfg.command));
    auto v = cfg.eps->values();
    if (v.front() < mode_floor(cfg.mode))
        throw ConfigError("eps = " + to_string(v.front()) + " is below the floor " + to_string(mode_floor(cfg.mode)) +
                          " of mode " + (cfg.mode == Mode::dd ? "dd" : "f64"));
    return v;
}

inline CurveSpec interior_curve(const RunConfig& cfg) {
    if (!cfg.curve) throw ConfigError("a curve literal is required for command " + command_name(cfg.command));
    CurveSpec c = parse_curve(*cfg.curve);
    if (!c.is_interior()) throw ConfigError("command " + command_name(cfg.command) + " needs a curve inside the upper half-plane");
    if (cfg.n < 4 || cfg.n > 2048) throw ConfigError("--n must lie in [4, 2048]");
    return c;
}

/// Segment [a,b] + ih normalized to [-1,1] + ih': (h', center, half-width).
struct SegmentFrame {
    double h;
    double mid;
    double hw;
    [[nodiscard]] Complex<double> to_unit(const Complex<double>& z) const { return {(z.re - mid) / hw, z.im / hw}; }
};

inline std::optional<SegmentFrame> segment_frame(const CurveSpec& c) {
    if (const auto* s = std::get_if<SegmentShifted>(&c.kind())) {
        const double hw = 0.5 * (s->b - s->a);
        return SegmentFrame{s->h / hw, 0.5 * (s->a + s->b), hw};
    }
    return std::nullopt;
}

template <Scalar T>
struct SpectralSetup {
    CurveDiscretization<T> disc;
    SpectralData<T> spec;
};

template <Scalar T>
SpectralSetup<T> spectral_setup(const CurveSpec& curve, int n) {
    const auto rule = gauss_legendre<T>(n);
    auto disc = discretize(curve, rule);
    const auto op = assemble_K(disc, Symmetrization::sqrt_weight);
    return {disc, eigendecompose(op)};
}

inline std::string csv_row(std::initializer_list<std::string> cells) {
    std::string s;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) s += ',';
        s += c;
        first = false;
    }
    return s + '\n';
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + '\n'; }

template <Scalar T>
ordered_json rates_json(const CurveSpec& curve, const SpectralData<T>* spec) {
    ordered_json r;
    r["rho1"] = to_string(moebius_contraction(curve).rho1);
    if (const auto f = segment_frame(curve)) {
        const auto inv = riemann_invariant(T(f->h));
        const T w = widom_rate(T(f->h));
        r["h_normalized"] = to_string(f->h);
        r["m_param"] = to_string(inv.m_param);
        r["tau"] = to_string(inv.tau);
        r["rho_gamma"] = to_string(inv.rho_gamma);
        r["ln_rho_gamma"] = to_string(inv.ln_rho());
        r["widom_W"] = to_string(w);
        r["widom_2W"] = to_string(T(2.0) * w);
    }
    if (spec && spec->rank_cutoff >= 16) {
        const auto fit = decay_fit(*spec);
        r["alpha_hat"] = to_string(fit.alpha_hat);
        r["alpha_r2"] = to_string(fit.r2_lambda);
        r["fit_window"] = {fit.first, fit.last};
    }
    return r;
}

template <Scalar T>
RunResult run_eigs(const RunConfig& cfg) {
    const CurveSpec curve = interior_curve(cfg);
    const auto zs = parse_z_list(cfg, curve);
    auto setup = spectral_setup<T>(curve, cfg.n);
    SpectralData<T> spec = std::move(setup.spec);
    if (!zs.empty()) spec = project_rhs(std::move(spec), rhs_vector(setup.disc, complex_cast<double, T>(zs.front())));
    RunResult res;
    const auto rates = rates_json<T>(curve, &spec);
    if (cfg.format == Format::csv) {
        std::ostringstream os;
        write_spectrum_csv(os, spec);
        res.artifacts.push_back({"", os.str()});
        res.artifacts.push_back({"rates", dump(rates)});
    } else {
        ordered_json j;
        ordered_json rows = ordered_json::array();
        for (std::size_t n = 0; n < spec.rank_cutoff; ++n) {
            const Complex<T> p = spec.has_projections() ? spec.pis[n] : Complex<T>{};
            rows.push_back({{"n", n + 1},
                            {"lambda", to_string(spec.lambdas[n])},
                            {"ln_lambda", to_string(log(spec.lambdas[n]))},
                            {"pi", {to_string(p.re), to_string(p.im)}}});
        }
        j["spectrum"] = rows;
        j["rates"] = rates;
        res.artifacts.push_back({"", dump(j)});
    }
    res.manifest_extra["rank_cutoff"] = spec.rank_cutoff;
    res.manifest_extra["noise_floor"] = to_string(spec.noise_floor);
    res.manifest_extra["jacobi_sweeps"] = spec.sweeps;
    res.manifest_extra["offdiag_residual"] = to_string(spec.offdiag_residual);
    return res;
}

template <Scalar T>
struct BoundRecord {
    Complex<double> z;
    double eps;
    ContinuationSolution<T> sol;
    BoundReport<T> bound;
    std::optional<T> eta_ratio;
};

template <Scalar T>
std::vector<BoundRecord<T>> bound_sweep(const RunConfig& cfg, const CurveSpec& curve, std::size_t& rank_cutoff,
                                        std::string& noise_floor, std::vector<DecayFit>* fits = nullptr) {
    const auto zs = parse_z_list(cfg, curve);
    if (zs.empty()) throw ConfigError("--z is required for command " + command_name(cfg.command));
    const auto eps = eps_values(cfg);
    auto setup = spectral_setup<T>(curve, cfg.n);
    rank_cutoff = setup.spec.rank_cutoff;
    noise_floor = to_string(setup.spec.noise_floor);
    std::vector<SpectralData<T>> projected;
    for (const auto& z : zs) projected.push_back(project_rhs(setup.spec, rhs_vector(setup.disc, complex_cast<double, T>(z))));
    if (fits)
        for (const auto& s : projected) fits->push_back(decay_fit(s));
    const std::size_t ne = eps.size();
    return parallel_map<BoundRecord<T>>(zs.size() * ne, cfg.jobs, [&](std::size_t i) {
        const std::size_t iz = i / ne, ie = i % ne;
        const SpectralData<T>& s = projected[iz];
        BoundRecord<T> r{zs[iz], eps[ie], solve_spectral(s, T(eps[ie])), {}, std::nullopt};
        r.bound = bound_M(r.sol);
        r.eta_ratio = eta_star(s, T(eps[ie])).ratio();
        return r;
    });
}

template <Scalar T>
RunResult run_bound(const RunConfig& cfg) {
    const CurveSpec curve = interior_curve(cfg);
    RunResult res;
    std::size_t cutoff = 0;
    std::string floor;
    const auto recs = bound_sweep<T>(cfg, curve, cutoff, floor);
    T worst_trunc(0.0);
    for (const auto& r : recs)
        if (r.sol.truncation_bound > worst_trunc) worst_trunc = r.sol.truncation_bound;
    auto opt = [](const std::optional<T>& v) { return v ? to_string(*v) : std::string("nan"); };
    if (cfg.format == Format::csv) {
        std::string s = "zr,zi,eps,u_at_z_re,u_at_z_im,norm_L2_Gamma,norm_H2,M,rigorous,branch_UB1,branch_UB2,"
                        "branch_ratio,eta_star_ratio,truncation_bound\n";
        for (const auto& r : recs)
            s += csv_row({to_string(r.z.re), to_string(r.z.im), to_string(r.eps), to_string(r.sol.u_at_z.re),
                          to_string(r.sol.u_at_z.im), to_string(r.sol.norm_L2_Gamma), to_string(r.sol.norm_H2),
                          to_string(r.bound.M), to_string(r.bound.rigorous), to_string(r.bound.UB1),
                          to_string(r.bound.UB2), to_string(r.bound.branch_ratio()), opt(r.eta_ratio),
                          to_string(r.sol.truncation_bound)});
        res.artifacts.push_back({"", s});
    } else {
        ordered_json arr = ordered_json::array();
        for (const auto& r : recs) {
            ordered_json j;
            j["eps"] = to_string(T(r.eps));
            j["z"] = {to_string(T(r.z.re)), to_string(T(r.z.im))};
            j["u_at_z"] = {to_string(r.sol.u_at_z.re), to_string(r.sol.u_at_z.im)};
            j["norm_L2_Gamma"] = to_string(r.sol.norm_L2_Gamma);
            j["norm_H2"] = to_string(r.sol.norm_H2);
            j["M"] = to_string(r.bound.M);
            j["branch_UB1"] = to_string(r.bound.UB1);
            j["branch_UB2"] = to_string(r.bound.UB2);
            j["eta_star_ratio"] = opt(r.eta_ratio);
            j["truncation_bound"] = to_string(r.sol.truncation_bound);
            arr.push_back(j);
        }
        res.artifacts.push_back({"", dump(arr)});
    }
    res.manifest_extra["rank_cutoff"] = cutoff;
    res.manifest_extra["noise_floor"] = floor;
    res.manifest_extra["truncation_bound_max"] = to_string(worst_trunc);
    return res;
}

template <Scalar T>
RunResult run_powerlaw(const RunConfig& cfg) {
    const CurveSpec curve = interior_curve(cfg);
    RunResult res;
    std::size_t cutoff = 0;
    std::string floor;
    std::vector<DecayFit> decay;
    const auto recs = bound_sweep<T>(cfg, curve, cutoff, floor, &decay);
    const auto zs = parse_z_list(cfg, curve);
    const std::size_t ne = recs.size() / zs.size();
    const auto frame = segment_frame(curve);
    std::optional<SegmentConformalMap<T>> map;
    if (frame) map.emplace(T(frame->h));

    std::string data = "zr,zi,eps,M\n";
    std::string fits = "x,gamma_hat,theta,r2\n";
    ordered_json jfits = ordered_json::array();
    for (std::size_t iz = 0; iz < zs.size(); ++iz) {
        std::vector<double> e, m;
        for (std::size_t ie = 0; ie < ne; ++ie) {
            const auto& r = recs[iz * ne + ie];
            data += csv_row({to_string(r.z.re), to_string(r.z.im), to_string(r.eps), to_string(r.bound.M)});
            e.push_back(r.eps);
            m.push_back(to_double(r.bound.M));
        }
        const PowerLawFit fit = powerlaw_fit(e, m);
        std::string theta = "nan";
        if (map) theta = to_string(map->theta(complex_cast<double, T>(frame->to_unit(zs[iz]))));
        fits += csv_row({to_string(zs[iz].re), to_string(fit.gamma_hat), theta, to_string(fit.r2)});
        jfits.push_back({{"z", {to_string(zs[iz].re), to_string(zs[iz].im)}},
                         {"gamma_hat", to_string(fit.gamma_hat)},
                         {"theta", theta},
                         {"r2", to_string(fit.r2)},
                         {"non_monotone", fit.non_monotone},
                         {"alpha_hat", to_string(decay[iz].alpha_hat)},
                         {"beta_hat", to_string(decay[iz].beta_hat)},
                         {"gamma_predicted", to_string((decay[iz].beta_hat - decay[iz].alpha_hat) / decay[iz].alpha_hat)}});
    }
    if (cfg.format == Format::csv) {
        res.artifacts.push_back({"", data});
        res.artifacts.push_back({"fit", fits});
    } else {
        ordered_json j;
        ordered_json rows = ordered_json::array();
        for (const auto& r : recs)
            rows.push_back({{"z", {to_string(r.z.re), to_string(r.z.im)}}, {"eps", to_string(r.eps)}, {"M", to_string(r.bound.M)}});
        j["data"] = rows;
        j["fits"] = jfits;
        res.artifacts.push_back({"", dump(j)});
    }
    res.manifest_extra["rank_cutoff"] = cutoff;
    res.manifest_extra["noise_floor"] = floor;
    res.manifest_extra["fits"] = jfits;
    return res;
}

template <Scalar T>
RunResult run_rates(const RunConfig& cfg) {
    const CurveSpec curve = interior_curve(cfg);
    auto setup = spectral_setup<T>(curve, cfg.n);
    const auto rates = rates_json<T>(curve, &setup.spec);
    RunResult res;
    if (cfg.format == Format::csv) {
        std::string s = "quantity,value\n";
        for (const auto& [k, v] : rates.items())
            if (v.is_string()) s += csv_row({k, v.template get<std::string>()});
        res.artifacts.push_back({"", s});
    } else {
        res.artifacts.push_back({"", dump(rates)});
    }
    res.manifest_extra["rank_cutoff"] = setup.spec.rank_cutoff;
    return res;
}

template <Scalar T>
RunResult run_boundary(const RunConfig& cfg) {
    const auto zs = parse_z_list(cfg, std::nullopt);
    if (zs.empty()) throw ConfigError("--z is required for command boundary");
    RunResult res;
    std::optional<double> eps;
    if (cfg.eps) {
        if (cfg.eps->min != cfg.eps->max) throw ConfigError("boundary: --eps takes a single value");
        eps = cfg.eps->min;
        if (!(*eps > 0.0 && *eps < 1.0)) throw ConfigError("boundary: eps must lie in (0,1)");
    }
    if (cfg.format == Format::json) {
        ordered_json arr = ordered_json::array();
        for (const auto& z : zs) {
            const auto zt = complex_cast<double, T>(z);
            ordered_json j;
            j["z"] = {to_string(zt.re), to_string(zt.im)};
            j["gamma"] = to_string(gamma_exponent(zt));
            if (eps) {
                const auto b = boundary_bound(zt, T(*eps));
                j["rho"] = to_string(b.rho);
                j["bound"] = to_string(b.bound);
                j["B"] = to_string(b.B);
            } else {
                j["rho"] = to_string(T(3.0) / sqrt(boundary_p_norm_sq(zt) * zt.im * zt.im));
            }
            arr.push_back(j);
        }
        res.artifacts.push_back({"", dump(arr.size() == 1 ? arr[0] : arr)});
    } else {
        std::vector<Complex<T>> zt;
        for (const auto& z : zs) zt.push_back(complex_cast<double, T>(z));
        std::ostringstream os;
        write_gamma_map_csv<T>(os, zt);
        res.artifacts.push_back({"", os.str()});
    }
    if (!cfg.h_limit.empty()) {
        if (!eps) throw ConfigError("boundary --h-limit needs --eps");
        const auto rows = h_limit_study(zs.front(), *eps, cfg.h_limit);
        std::ostringstream os;
        write_hlimit_csv(os, rows);
        res.artifacts.push_back({"hlimit", os.str()});
        ordered_json lm = ordered_json::array();
        for (const auto& r : rows) lm.push_back(to_string(r.lambda_max));
        res.manifest_extra["kh_lambda_max"] = lm;
    }
    return res;
}

template <Scalar T>
RunResult run_transplant(const RunConfig& cfg) {
    std::vector<double> xs = cfg.x_list;
    if (xs.empty()) xs = {0.5, 1.0, 2.0, 3.0};
    RunResult res;
    if (cfg.format == Format::csv) {
        std::string s = "x,gamma,zeta_re,zeta_im\n";
        for (double x : xs) {
            const Complex<T> zeta = halfstrip_map(Complex<T>(T(x)));
            s += csv_row({to_string(T(x)), to_string(halfstrip_exponent(T(x))), to_string(zeta.re), to_string(zeta.im)});
        }
        res.artifacts.push_back({"", s});
    } else {
        ordered_json arr = ordered_json::array();
        for (double x : xs) arr.push_back({{"x", to_string(T(x))}, {"gamma", to_string(halfstrip_exponent(T(x)))}});
        res.artifacts.push_back({"", dump(arr)});
    }
    return res;
}

template <Scalar T>
RunResult dispatch(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::eigs: return run_eigs<T>(cfg);
        case Command::bound: return run_bound<T>(cfg);
        case Command::powerlaw: return run_powerlaw<T>(cfg);
        case Command::rates: return run_rates<T>(cfg);
        case Command::boundary: return run_boundary<T>(cfg);
        case Command::transplant: return run_transplant<T>(cfg);
    }
    throw ConfigError("unhandled command");
}

inline std::filesystem::path artifact_path(const std::filesystem::path& out, const std::string& suffix) {
    if (suffix.empty()) return out;
    std::filesystem::path p = out;
    const std::string ext = suffix == "rates" ? ".json" : out.extension().string();
    p.replace_filename(out.stem().string() + "." + suffix + ext);
    return p;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open '" + p.string() + "' for writing");
    f << content;
    f.close();
    if (!f) throw IoError("write to '" + p.string() + "' failed");
}

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace detail

/// Runs a validated configuration and writes artifacts plus a manifest.
inline void run(const RunConfig& cfg, std::ostream& out) {
    const RunResult res = cfg.mode == Mode::dd ? detail::dispatch<DDReal>(cfg) : detail::dispatch<double>(cfg);
    if (cfg.output.empty()) {
        for (std::size_t i = 0; i < res.artifacts.size(); ++i) {
            if (i) out << '\n';
            out << res.artifacts[i].content;
        }
        return;
    }
    const std::filesystem::path base(cfg.output);
    ordered_json files = ordered_json::array();
    for (const auto& a : res.artifacts) {
        const auto p = detail::artifact_path(base, a.suffix);
        detail::write_file(p, a.content);
        files.push_back(p.filename().string());
    }
    ordered_json m;
    m["tool"] = "hcont_cli";
    m["command"] = command_name(cfg.command);
    m["config_hash"] = config_hash(cfg);
    m["config"] = cfg.canonical();
    m["mode"] = cfg.mode == Mode::dd ? "dd" : "f64";
    m["files"] = files;
    for (const auto& [k, v] : res.manifest_extra.items()) m[k] = v;
    m["timestamp"] = detail::utc_timestamp();
    auto mp = base;
    mp.replace_filename(base.stem().string() + ".manifest.json");
    detail::write_file(mp, m.dump(2) + '\n');
}

/// Parses argv, runs, and maps failures to exit codes 1 (config),
/// 2 (numeric), 3 (I/O).
inline int main_entry(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Analytic-continuation error bounds for Hardy-space functions"};
    app.require_subcommand(0, 1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON run configuration; flags override its fields");

    struct Flags {
        std::string curve, z, eps, mode, format, output, h_limit, x;
        int n = 0, per_decade = 0, jobs = 0;
    } fl;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration; flags override its fields");
        sub->add_option("--z", fl.z, "Extrapolation points, comma separated (e.g. 2+1i,3+1i)");
        sub->add_option("--eps", fl.eps, "Single eps or range min..max");
        sub->add_option("--per-decade", fl.per_decade, "Grid points per decade of eps");
        sub->add_option("--n", fl.n, "Quadrature order (nodes per leg)");
        sub->add_option("--mode", fl.mode, "Arithmetic: f64 or dd");
        sub->add_option("--output", fl.output, "Output file; a manifest is written next to it");
        sub->add_option("--format", fl.format, "csv or json");
        sub->add_option("--jobs", fl.jobs, "Worker threads for sweeps");
    };
    std::vector<CLI::App*> subs;
    for (Command c : {Command::eigs, Command::bound, Command::powerlaw, Command::rates, Command::boundary,
                      Command::transplant}) {
        auto* s = app.add_subcommand(command_name(c), command_help(c));
        add_common(s);
        if (c != Command::boundary && c != Command::transplant) s->add_option("curve", fl.curve, "Curve literal");
        if (c == Command::boundary) s->add_option("--h-limit", fl.h_limit, "Decreasing h values for the limit study");
        if (c == Command::transplant) s->add_option("--x", fl.x, "Points on the half-strip axis");
        subs.push_back(s);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : exit_config;
    }
    try {
        RunConfig cfg;
        bool have_command = false;
        if (!config_path.empty()) {
            const auto j = read_config_file(config_path);
            apply_config_json(cfg, j);
            have_command = j.contains("command");
        }
        for (auto* s : subs) {
            if (s->parsed()) {
                cfg.command = parse_command(s->get_name());
                have_command = true;
            }
        }
        if (!have_command) throw ConfigError("no command given (eigs, bound, powerlaw, rates, boundary, transplant)");
        if (!fl.curve.empty()) cfg.curve = fl.curve;
        if (!fl.z.empty()) {
            cfg.z_list.clear();
            for (auto part : hcont::detail::split(fl.z, ',')) cfg.z_list.emplace_back(part);
        }
        if (!fl.eps.empty()) cfg.eps = parse_eps(fl.eps, fl.per_decade > 0 ? fl.per_decade : 4);
        else if (fl.per_decade > 0 && cfg.eps) cfg.eps->per_decade = fl.per_decade;
        if (fl.n > 0) cfg.n = fl.n;
        if (!fl.mode.empty()) cfg.mode = parse_mode(fl.mode);
        if (!fl.format.empty()) cfg.format = parse_format(fl.format);
        if (!fl.output.empty()) cfg.output = fl.output;
        if (fl.jobs > 0) cfg.jobs = fl.jobs;
        if (!fl.h_limit.empty()) {
            cfg.h_limit.clear();
            for (auto part : hcont::detail::split(fl.h_limit, ',')) cfg.h_limit.push_back(hcont::detail::parse_double(part, "--h-limit"));
        }
        if (!fl.x.empty()) {
            cfg.x_list.clear();
            for (auto part : hcont::detail::split(fl.x, ',')) cfg.x_list.push_back(hcont::detail::parse_double(part, "--x"));
        }
        run(cfg, out);
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return exit_numeric;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}

}  // namespace hcont::cli
