#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "qtrans/design.hpp"
#include "qtrans/dispersive.hpp"
#include "qtrans/dynamics.hpp"
#include "qtrans/errors.hpp"
#include "qtrans/network.hpp"
#include "qtrans/open_system.hpp"
#include "qtrans/spectral.hpp"
#include "validate.hpp"

namespace qtrans::cli {
namespace {

using json = nlohmann::ordered_json;
using std::numbers::pi;

// Malformed invocation that CLI11 cannot detect on its own.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

double to_double(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError(fmt::format("'{}' is not a number", text));
    }
    if (used != text.size()) throw UsageError(fmt::format("'{}' is not a number", text));
    return v;
}

int to_int(const std::string& text) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(text, &used);
    } catch (const std::exception&) {
        throw UsageError(fmt::format("'{}' is not an integer", text));
    }
    if (used != text.size()) throw UsageError(fmt::format("'{}' is not an integer", text));
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

// JSON integer when the value fits, decimal string otherwise.
json big(const BigInt& v) {
    if (v <= BigInt(std::numeric_limits<long long>::max()) && v >= BigInt(std::numeric_limits<long long>::min()))
        return v.convert_to<long long>();
    return v.str();
}

// ---------------------------------------------------------------------------------------------
// Options

struct NetworkOpts {
    double omega{1.0};
    double lambda{0.1};
    int capN{1};
    int kappa{1};
    double delta{0.0};
    std::string units{"angular"};

    NetworkConfig config() const {
        return to_angular({omega, lambda, capN, kappa, delta},
                          units == "hz" ? FrequencyUnit::hz : FrequencyUnit::angular);
    }
};

struct OutputOpts {
    bool json{false};
    bool csv{false};
    std::string out;
    std::string config;
};

struct ThermalOpts {
    std::optional<double> nbar;
    std::optional<double> kbt_over_hnu;
    std::optional<double> temperature;
    std::optional<double> nu_hz;

    double resolve() const {
        const int given = nbar.has_value() + kbt_over_hnu.has_value() + temperature.has_value();
        if (given != 1)
            throw UsageError("give exactly one of --nbar, --kbt-over-hnu or --temperature (with --nu-hz)");
        if (nbar) return *nbar;
        if (kbt_over_hnu) return nbar_from_kbt_over_hnu(*kbt_over_hnu);
        if (!nu_hz) throw UsageError("--temperature needs --nu-hz");
        return planck_nbar(*temperature, *nu_hz);
    }
};

StateMeasure measure_from(const std::string& name) {
    return name == "haar" ? StateMeasure::haar : StateMeasure::alpha_uniform;
}

struct Opts {
    NetworkOpts net;
    OutputOpts io;

    // evolve
    std::string times{"0:100:101"};
    double alpha{0.0};
    double theta{0.0};

    // block-check
    double threshold{kDefaultMarginThreshold};

    // plan-transfer
    std::optional<std::string> omega_hz, omega_rad, lambda_hz, lambda_rad;
    std::string odd_multiplier{"1"};

    // design-gate
    double phi{0.0};
    std::optional<double> gate_omega;
    double gate_lambda{1.0};
    std::optional<int> gate_kappa;
    std::optional<int> ell;
    int ell_max{99};
    std::optional<int> kappa_max;
    std::optional<int> bus_size;
    double gate_delta{0.0};
    bool allow_partial_bus{false};
    std::string gate_units{"angular"};

    // dispersive
    DispersiveConfig disp{};
    double disp_t{0.0};
    int disp_n_max{kDefaultDispersiveFockCut};

    // fidelity, fidelity-map, optimal-kappa
    int fid_kappa{1};
    std::optional<double> gamma_over_lambda;
    std::optional<double> x;
    ThermalOpts thermal;
    std::optional<double> fid_alpha;
    std::string measure{"alpha-uniform"};
    std::string panel{"kbt-over-hnu=0.5"};
    std::string gamma_range{"0:1:100"};
    std::string kappa_range{"1:60"};
    std::string kbt_range{"0:1:101"};
    unsigned workers{1};
    int opt_kappa_max{100};
};

void add_network(CLI::App* sub, NetworkOpts& n) {
    sub->add_option("--omega", n.omega, "source/drain/resonant frequency")->check(CLI::PositiveNumber);
    sub->add_option("--lambda", n.lambda, "coupling strength")->check(CLI::PositiveNumber);
    sub->add_option("--N", n.capN, "data-bus size")->check(CLI::PositiveNumber);
    sub->add_option("--kappa", n.kappa, "resonant bus oscillators")->check(CLI::NonNegativeNumber);
    sub->add_option("--delta", n.delta, "detuning of the remaining bus oscillators");
    sub->add_option("--units", n.units, "frequency units")->check(CLI::IsMember({"angular", "hz"}));
}

void add_output(CLI::App* sub, OutputOpts& o, bool tabular) {
    auto* j = sub->add_flag("--json", o.json, "JSON output");
    if (tabular) {
        auto* c = sub->add_flag("--csv", o.csv, "CSV output");
        j->excludes(c);
    }
    sub->add_option("--out", o.out, "write data to this file (a run manifest is written next to it)");
    sub->add_option("--config", o.config, "JSON file whose keys override flags (a run manifest also works)");
}

void add_thermal(CLI::App* sub, ThermalOpts& t) {
    sub->add_option("--nbar", t.nbar, "mean thermal photon number")->check(CLI::NonNegativeNumber);
    sub->add_option("--kbt-over-hnu", t.kbt_over_hnu, "k_B T / (h nu)")->check(CLI::NonNegativeNumber);
    sub->add_option("--temperature", t.temperature, "reservoir temperature in kelvin");
    sub->add_option("--nu-hz", t.nu_hz, "reservoir mode frequency in Hz");
}

// ---------------------------------------------------------------------------------------------
// --config: rewrite the argument list so the file's keys win over flags given on the command line

std::vector<std::string> apply_config(const CLI::App& app, std::vector<std::string> args) {
    if (args.empty()) return args;
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    const CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(args[0]);
    } catch (const CLI::OptionNotFound&) {
        return args; // reported by the parser
    }

    std::ifstream in(path);
    if (!in) throw UsageError(fmt::format("cannot open config file '{}'", path));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(fmt::format("config file '{}' is not valid JSON: {}", path, e.what()));
    }
    if (doc.contains("subcommand") && doc.contains("config")) {
        if (doc["subcommand"] != args[0])
            throw UsageError(fmt::format("manifest '{}' belongs to subcommand '{}'", path,
                                         doc["subcommand"].get<std::string>()));
        doc = doc["config"];
    }
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");

    for (const auto& [key, value] : doc.items()) {
        const std::string flag = "--" + key;
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (!opt || key == "config" || key == "out")
            throw UsageError(fmt::format("config key '{}' is not an option of '{}'", key, args[0]));
        const bool is_flag = opt->get_items_expected_max() == 0;

        std::vector<std::string> kept{args[0]};
        for (std::size_t i = 1; i < args.size(); ++i) {
            if (args[i] == flag) {
                if (!is_flag) ++i;
                continue;
            }
            if (args[i].rfind(flag + "=", 0) == 0) continue;
            kept.push_back(args[i]);
        }
        args = std::move(kept);

        if (is_flag) {
            if (!value.is_boolean()) throw UsageError(fmt::format("config key '{}' must be true or false", key));
            if (value.get<bool>()) args.push_back(flag);
            continue;
        }
        args.push_back(flag);
        if (value.is_string()) args.push_back(value.get<std::string>());
        else if (value.is_number_integer()) args.push_back(std::to_string(value.get<long long>()));
        else if (value.is_number()) args.push_back(num(value.get<double>()));
        else if (value.is_boolean()) args.push_back(value.get<bool>() ? "true" : "false");
        else throw UsageError(fmt::format("config key '{}' has an unsupported value", key));
    }
    return args;
}

// Every option of the subcommand with its effective value, as the strings the parser accepts.
json resolved_config(const CLI::App* sub) {
    json cfg = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "help" || name == "config" || name == "out") continue;
        if (opt->get_items_expected_max() == 0) {
            cfg[name] = opt->count() > 0;
        } else if (opt->count() > 0) {
            cfg[name] = opt->results().front();
        } else if (!opt->get_default_str().empty()) {
            cfg[name] = opt->get_default_str();
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------------------------
// Output

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error(fmt::format("cannot write '{}'", path));
        }
        stream_ = path.empty() ? &fallback : &file_;
    }
    std::ostream& operator()() { return *stream_; }
    void close() {
        if (file_.is_open()) {
            file_.close();
            if (!file_) throw std::runtime_error(fmt::format("error writing '{}'", path_));
        }
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_{nullptr};
};

void emit_json(Sink& sink, const json& doc) { sink() << doc.dump(2) << '\n'; }

void csv_row(std::ostream& os, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
        if (!first) os << ',';
        os << c;
        first = false;
    }
    os << '\n';
}

// ---------------------------------------------------------------------------------------------
// Subcommands

void run_spectrum(const Opts& o, Sink& sink) {
    const auto cfg = o.net.config();
    const auto s = analytic_spectrum(cfg);
    if (o.io.csv) {
        std::ostream& os = sink();
        os << "index,family,eigenvalue";
        for (std::size_t j = 0; j < cfg.dim(); ++j) os << ",c" << j;
        os << '\n';
        for (std::size_t l = 0; l < s.size(); ++l) {
            const auto col = static_cast<Eigen::Index>(l);
            os << l << ',' << to_string(s.families[l]) << ',' << num(s.eigenvalues(col));
            for (Eigen::Index j = 0; j < s.vectors.rows(); ++j) os << ',' << num(s.vectors(j, col));
            os << '\n';
        }
        return;
    }
    json doc;
    doc["eigenvalues"] = std::vector<double>(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
    json families = json::array();
    for (auto f : s.families) families.push_back(to_string(f));
    doc["families"] = families;
    json vectors = json::array();
    for (Eigen::Index l = 0; l < s.vectors.cols(); ++l) {
        const Eigen::VectorXd c = s.vectors.col(l);
        vectors.push_back(std::vector<double>(c.data(), c.data() + c.size()));
    }
    doc["vectors"] = vectors;
    doc["trio_normalization"] = std::vector<double>(s.trio_normalization.begin(), s.trio_normalization.end());
    emit_json(sink, doc);
}

void run_evolve(const Opts& o, Sink& sink, std::ostream& err) {
    const auto cfg = o.net.config();
    const auto times = parse_linspace(o.times);
    for (double t : times)
        if (!(t >= 0.0)) throw UsageError("evolution times must be >= 0");
    const auto psi = QubitState::from_angles(o.alpha, o.theta);
    const TransferPropagator prop(cfg);
    if (cfg.kappa < cfg.capN && cfg.delta != 0.0 && !blocking_margin(cfg).in_blocking_regime)
        err << "note: configuration is outside the blocking regime\n";

    json rows = json::array();
    if (!o.io.json) sink() << "t,p_s,p_d,re_u_plus,im_u_plus,re_u_minus,im_u_minus\n";
    for (double t : times) {
        const auto u = prop(t);
        const auto p = survival_probabilities(prop, psi, t);
        if (o.io.json) {
            rows.push_back({{"t", t},
                            {"p_s", p.p_source},
                            {"p_d", p.p_drain},
                            {"re_u_plus", u.u_plus.real()},
                            {"im_u_plus", u.u_plus.imag()},
                            {"re_u_minus", u.u_minus.real()},
                            {"im_u_minus", u.u_minus.imag()}});
        } else {
            csv_row(sink(), {num(t), num(p.p_source), num(p.p_drain), num(u.u_plus.real()), num(u.u_plus.imag()),
                             num(u.u_minus.real()), num(u.u_minus.imag())});
        }
    }
    if (o.io.json) emit_json(sink, rows);
}

void run_block_check(const Opts& o, Sink& sink) {
    const auto m = blocking_margin(o.net.config(), o.threshold);
    if (o.io.csv) {
        sink() << "ratio,threshold,in_blocking_regime\n";
        csv_row(sink(), {num(m.ratio), num(o.threshold), m.in_blocking_regime ? "true" : "false"});
        return;
    }
    emit_json(sink, {{"ratio", m.ratio}, {"threshold", o.threshold}, {"in_blocking_regime", m.in_blocking_regime}});
}

void run_plan_transfer(const Opts& o, Sink& sink) {
    if (o.omega_hz.has_value() == o.omega_rad.has_value())
        throw UsageError("give exactly one of --omega-hz or --omega-rad");
    if (o.lambda_hz.has_value() == o.lambda_rad.has_value())
        throw UsageError("give exactly one of --lambda-hz or --lambda-rad");
    const bool hz = o.omega_hz.has_value();
    if (hz != o.lambda_hz.has_value())
        throw RequiresRationalError("mixing Hz and rad/s makes lambda/omega irrational; use one unit for both");

    const Rational omega = parse_rational(hz ? *o.omega_hz : *o.omega_rad);
    const Rational lambda = parse_rational(hz ? *o.lambda_hz : *o.lambda_rad);
    const Rational u = parse_rational(o.odd_multiplier);
    if (boost::multiprecision::denominator(u) != 1) throw DomainError("--u must be an odd positive integer");
    const auto plan = plan_transfer(omega, lambda, boost::multiprecision::numerator(u),
                                    hz ? FrequencyUnit::hz : FrequencyUnit::angular);

    const double omega_rad = omega.convert_to<double>() * (hz ? 2.0 * pi : 1.0);
    const double lambda_rad = lambda.convert_to<double>() * (hz ? 2.0 * pi : 1.0);
    const double coupling = lambda_rad * std::sqrt(2.0 * plan.kappa.convert_to<double>());
    json doc;
    doc["units"] = hz ? "hz" : "angular";
    doc["m"] = big(plan.m);
    doc["kappa"] = big(plan.kappa);
    doc["c1"] = big(plan.c1);
    doc["c2"] = big(plan.c2);
    doc["j"] = big(plan.j);
    doc["j_prime"] = big(plan.j_prime);
    doc["tau_trans"] = plan.tau_trans;
    doc["tau_from_j_prime"] = (2.0 * plan.j_prime.convert_to<double>() + 1.0) * pi / coupling;
    doc["omega_rad"] = omega_rad;
    doc["lambda_rad"] = lambda_rad;
    emit_json(sink, doc);
}

void run_design_gate(const Opts& o, Sink& sink) {
    const double scale = o.gate_units == "hz" ? 2.0 * pi : 1.0;
    GateRequest req;
    req.phi = o.phi;
    req.lambda = o.gate_lambda * scale;
    if (o.gate_omega) req.omega = *o.gate_omega * scale;
    req.kappa = o.gate_kappa;
    req.ell = o.ell;
    req.ell_search_max = o.ell_max;
    req.kappa_max = o.kappa_max;
    if (!req.omega && !req.kappa) throw UsageError("give --omega (to solve for kappa) or --kappa (to solve for omega)");
    if (req.omega && req.kappa) throw UsageError("--omega and --kappa cannot both be fixed");
    const auto plan = design_gate(req);

    NetworkConfig net = gate_network(plan);
    if (o.bus_size && *o.bus_size != plan.kappa) {
        if (*o.bus_size < plan.kappa)
            throw DomainError(fmt::format("bus size N={} is smaller than kappa={}", *o.bus_size, plan.kappa));
        net.capN = *o.bus_size;
        net.delta = o.gate_delta * scale;
        const auto margin = blocking_margin(net);
        if (!margin.in_blocking_regime && !o.allow_partial_bus)
            throw ScopeError(fmt::format("kappa < N needs the blocking regime (margin ratio {:.3g} > {:.3g}); "
                                         "pass --allow-partial-bus to override",
                                         margin.ratio, kDefaultMarginThreshold));
    }

    json doc;
    doc["phi"] = plan.phi;
    doc["ell"] = plan.ell;
    doc["solved"] = plan.solved == GateUnknown::omega ? "omega" : "kappa";
    doc["omega"] = plan.omega;
    doc["lambda"] = plan.lambda;
    doc["kappa"] = plan.kappa;
    doc["t_ex"] = plan.t_ex;
    doc["network"] = {{"omega", net.omega}, {"lambda", net.lambda}, {"N", net.capN},
                      {"kappa", net.kappa}, {"delta", net.delta}, {"units", "angular"}};
    emit_json(sink, doc);
}

void run_dispersive(const Opts& o, Sink& sink) {
    Diagnostics diag;
    const auto field = QubitState::from_angles(o.alpha, o.theta);
    const auto res = simulate_dispersive(o.disp, field, o.disp_t, o.disp_n_max, &diag);
    json doc;
    doc["effective_frequency"] = effective_frequency(o.disp);
    doc["chi"] = o.disp.chi();
    doc["purity"] = res.field_purity;
    doc["phase_error"] = res.phase_error;
    doc["validity"] = res.valid;
    doc["warnings"] = diag.warnings;
    emit_json(sink, doc);
}

double exponent_from(const Opts& o, int kappa) {
    if (o.gamma_over_lambda.has_value() == o.x.has_value())
        throw UsageError("give exactly one of --gamma-over-lambda or --x");
    if (o.x) return *o.x;
    return exchange_exponent(*o.gamma_over_lambda, kappa);
}

void run_fidelity(const Opts& o, Sink& sink) {
    const double nbar = o.thermal.resolve();
    const double x = exponent_from(o, o.fid_kappa);
    FidelityScope scope;
    scope.bus_size = o.bus_size.value_or(o.fid_kappa);
    scope.allow_partial_bus = o.allow_partial_bus;
    json doc;
    doc["kappa"] = o.fid_kappa;
    doc["x"] = x;
    doc["nbar"] = nbar;
    if (o.fid_alpha) {
        doc["alpha"] = *o.fid_alpha;
        doc["F"] = fidelity_point(o.fid_kappa, x, nbar, *o.fid_alpha, scope);
    } else {
        doc["measure"] = o.measure;
        doc["fbar"] = fidelity_avg(o.fid_kappa, x, nbar, measure_from(o.measure), scope);
    }
    emit_json(sink, doc);
}

void run_fidelity_map(const Opts& o, Sink& sink, std::ostream& err) {
    const auto eq = o.panel.find('=');
    if (eq == std::string::npos) throw UsageError("--panel expects kbt-over-hnu=<value> or kappa=<value>");
    const std::string axis = o.panel.substr(0, eq);
    const std::string value = o.panel.substr(eq + 1);

    FidelityMapGrid grid;
    grid.measure = measure_from(o.measure);
    grid.gamma_over_lambda = parse_linspace(o.gamma_range);
    if (axis == "kbt-over-hnu") {
        grid.kbt_over_hnu = {to_double(value)};
        grid.kappa = parse_int_range(o.kappa_range);
    } else if (axis == "kappa") {
        grid.kappa = {to_int(value)};
        grid.kbt_over_hnu = parse_linspace(o.kbt_range);
    } else {
        throw UsageError(fmt::format("unknown panel axis '{}'", axis));
    }

    const auto rows = fidelity_map(grid, o.workers);
    std::size_t invalid = 0;
    for (const auto& r : rows) invalid += r.valid ? 0 : 1;
    if (invalid > 0)
        err << fmt::format("warning: {} rows have nbar > {} (outside the analytic range)\n", invalid,
                           kMaxAnalyticNbar);

    if (o.io.json) {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"gamma_over_lambda", r.gamma_over_lambda},
                           {"kBT_over_hnu", r.kbt_over_hnu},
                           {"kappa", r.kappa},
                           {"nbar", r.nbar},
                           {"fbar", r.fbar},
                           {"valid", r.valid}});
        emit_json(sink, arr);
        return;
    }
    std::string buffer = "gamma_over_lambda,kBT_over_hnu,kappa,nbar,fbar\n";
    buffer.reserve(rows.size() * 80);
    for (const auto& r : rows)
        buffer += fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g}\n", r.gamma_over_lambda, r.kbt_over_hnu, r.kappa,
                              r.nbar, r.fbar);
    sink() << buffer;
}

void run_optimal_kappa(const Opts& o, Sink& sink) {
    if (!o.gamma_over_lambda) throw UsageError("--gamma-over-lambda is required");
    const double nbar = o.thermal.resolve();
    const auto best = optimal_kappa(*o.gamma_over_lambda, nbar, o.opt_kappa_max, measure_from(o.measure));
    if (o.io.csv) {
        sink() << "gamma_over_lambda,nbar,kappa_max,kappa_star,fbar_star\n";
        csv_row(sink(), {num(*o.gamma_over_lambda), num(nbar), std::to_string(o.opt_kappa_max),
                         std::to_string(best.kappa), num(best.fbar)});
        return;
    }
    emit_json(sink, {{"gamma_over_lambda", *o.gamma_over_lambda},
                     {"nbar", nbar},
                     {"kappa_max", o.opt_kappa_max},
                     {"kappa_star", best.kappa},
                     {"fbar_star", best.fbar}});
}

bool run_validate(const Opts& o, Sink& sink) {
    const auto checks = run_validation();
    bool all = true;
    for (const auto& c : checks) all = all && c.pass;
    if (o.io.csv) {
        sink() << "check,config,max_error,tolerance,pass\n";
        for (const auto& c : checks)
            csv_row(sink(), {c.check, "\"" + c.config + "\"", num(c.max_error), num(c.tolerance),
                             c.pass ? "true" : "false"});
        return all;
    }
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back({{"check", c.check},
                       {"config", c.config},
                       {"max_error", c.max_error},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass}});
    emit_json(sink, arr);
    return all;
}

unsigned default_workers() {
    if (const char* env = std::getenv("QT_WORKERS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

} // namespace

std::vector<double> parse_linspace(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 1) return {to_double(parts[0])};
    if (parts.size() != 3) throw UsageError(fmt::format("range '{}' must look like start:stop:count", text));
    const double a = to_double(parts[0]);
    const double b = to_double(parts[1]);
    const int n = to_int(parts[2]);
    if (n < 1) throw UsageError(fmt::format("range '{}' needs a positive count", text));
    if (n == 1) return {a};
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    v.back() = b;
    return v;
}

std::vector<int> parse_int_range(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 1) return {to_int(parts[0])};
    if (parts.size() != 2) throw UsageError(fmt::format("integer range '{}' must look like first:last", text));
    const int a = to_int(parts[0]);
    const int b = to_int(parts[1]);
    if (b < a) throw UsageError(fmt::format("integer range '{}' is empty", text));
    std::vector<int> v;
    for (int k = a; k <= b; ++k) v.push_back(k);
    return v;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    Opts o;
    o.workers = default_workers();

    CLI::App app{"qt: coupled-oscillator quantum transistor toolkit", "qt"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    auto* spectrum = app.add_subcommand("spectrum", "closed-form eigenvalues and eigenvectors");
    add_network(spectrum, o.net);
    add_output(spectrum, o.io, true);

    auto* evolve = app.add_subcommand("evolve", "transfer amplitudes and survival probabilities over time");
    add_network(evolve, o.net);
    evolve->add_option("--times", o.times, "start:stop:count (inclusive) or a single time");
    evolve->add_option("--alpha", o.alpha, "vacuum amplitude of the source qubit")->check(CLI::Range(0.0, 1.0));
    evolve->add_option("--theta", o.theta, "relative phase of the source qubit");
    add_output(evolve, o.io, true);

    auto* block = app.add_subcommand("block-check", "blocking-regime margin (lambda/|delta|) 3 sqrt(N)");
    add_network(block, o.net);
    block->add_option("--threshold", o.threshold, "largest margin counted as blocking")->check(CLI::PositiveNumber);
    add_output(block, o.io, true);

    auto* plan = app.add_subcommand("plan-transfer", "bus size and time for a full-state transfer");
    plan->add_option("--omega-hz", o.omega_hz, "source frequency in Hz (exact decimal or p/q)");
    plan->add_option("--omega-rad", o.omega_rad, "source frequency in rad/s (exact decimal or p/q)");
    plan->add_option("--lambda-hz", o.lambda_hz, "coupling in Hz");
    plan->add_option("--lambda-rad", o.lambda_rad, "coupling in rad/s");
    plan->add_option("--u", o.odd_multiplier, "odd multiplier of m (larger bus, shorter exchange)");
    add_output(plan, o.io, false);

    auto* gate = app.add_subcommand("design-gate", "phase-gate parameters");
    gate->add_option("--phi", o.phi, "target phase in radians, (-pi, pi]");
    gate->add_option("--lambda", o.gate_lambda, "coupling strength")->check(CLI::PositiveNumber);
    gate->add_option("--omega", o.gate_omega, "fixed frequency (solve for kappa)");
    gate->add_option("--kappa", o.gate_kappa, "fixed resonant bus size (solve for omega)");
    gate->add_option("--ell", o.ell, "force an odd ell");
    gate->add_option("--ell-max", o.ell_max, "largest odd ell scanned when solving for kappa");
    gate->add_option("--kappa-max", o.kappa_max, "largest acceptable kappa when solving for it");
    gate->add_option("--N", o.bus_size, "bus size when it exceeds kappa");
    gate->add_option("--delta", o.gate_delta, "detuning of the N - kappa extra oscillators");
    gate->add_flag("--allow-partial-bus", o.allow_partial_bus, "skip the blocking-regime requirement for kappa < N");
    gate->add_option("--units", o.gate_units, "frequency units")->check(CLI::IsMember({"angular", "hz"}));
    add_output(gate, o.io, false);

    auto* disp = app.add_subcommand("dispersive", "atom-controlled frequency shift of a field mode");
    disp->add_option("--omega0", o.disp.omega0, "field frequency")->check(CLI::PositiveNumber);
    disp->add_option("--nu", o.disp.nu, "atom frequency");
    disp->add_option("--g", o.disp.g, "atom-field coupling");
    disp->add_option("--gamma-spont", o.disp.gamma_spont, "spontaneous emission rate");
    disp->add_option("--nbar-field", o.disp.nbar_field, "photon number used in the validity test");
    disp->add_option("--alpha", o.alpha, "vacuum amplitude of the field qubit")->check(CLI::Range(0.0, 1.0));
    disp->add_option("--theta", o.theta, "relative phase of the field qubit");
    disp->add_option("--t", o.disp_t, "evolution time")->check(CLI::NonNegativeNumber);
    disp->add_option("--n-max", o.disp_n_max, "field Fock cutoff")->check(CLI::PositiveNumber);
    add_output(disp, o.io, false);

    auto* fid = app.add_subcommand("fidelity", "gate fidelity in a thermal environment");
    fid->add_option("--kappa", o.fid_kappa, "resonant bus size")->check(CLI::PositiveNumber);
    fid->add_option("--gamma-over-lambda", o.gamma_over_lambda, "damping rate over coupling");
    fid->add_option("--x", o.x, "gamma t_ex directly");
    add_thermal(fid, o.thermal);
    fid->add_option("--alpha", o.fid_alpha, "evaluate at this input amplitude instead of averaging")
        ->check(CLI::Range(0.0, 1.0));
    fid->add_option("--measure", o.measure, "input-state average")->check(CLI::IsMember({"alpha-uniform", "haar"}));
    fid->add_option("--N", o.bus_size, "bus size (defaults to kappa)");
    fid->add_flag("--allow-partial-bus", o.allow_partial_bus, "evaluate the kappa = N formula with kappa < N");
    add_output(fid, o.io, false);

    auto* fmap = app.add_subcommand("fidelity-map", "average-fidelity sweep over gamma/lambda and kappa or temperature");
    fmap->add_option("--panel", o.panel, "fixed axis: kbt-over-hnu=<v> or kappa=<k>");
    fmap->add_option("--gamma-over-lambda", o.gamma_range, "start:stop:count");
    fmap->add_option("--kappa", o.kappa_range, "first:last (kbt-over-hnu panel)");
    fmap->add_option("--kbt-over-hnu", o.kbt_range, "start:stop:count (kappa panel)");
    fmap->add_option("--measure", o.measure, "input-state average")->check(CLI::IsMember({"alpha-uniform", "haar"}));
    fmap->add_option("--workers", o.workers, "worker threads (default QT_WORKERS or 1)")->check(CLI::PositiveNumber);
    add_output(fmap, o.io, true);

    auto* opt = app.add_subcommand("optimal-kappa", "bus size maximising the average fidelity");
    opt->add_option("--gamma-over-lambda", o.gamma_over_lambda, "damping rate over coupling")
        ->check(CLI::NonNegativeNumber);
    add_thermal(opt, o.thermal);
    opt->add_option("--kappa-max", o.opt_kappa_max, "largest kappa considered")->check(CLI::PositiveNumber);
    opt->add_option("--measure", o.measure, "input-state average")->check(CLI::IsMember({"alpha-uniform", "haar"}));
    add_output(opt, o.io, true);

    auto* val = app.add_subcommand("validate", "run the oracle-equivalence suite");
    add_output(val, o.io, true);

    try {
        std::vector<std::string> argv = apply_config(app, args);
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    int code = 0;
    try {
        Sink sink(o.io.out, out);
        if (name == "spectrum") run_spectrum(o, sink);
        else if (name == "evolve") run_evolve(o, sink, err);
        else if (name == "block-check") run_block_check(o, sink);
        else if (name == "plan-transfer") run_plan_transfer(o, sink);
        else if (name == "design-gate") run_design_gate(o, sink);
        else if (name == "dispersive") run_dispersive(o, sink);
        else if (name == "fidelity") run_fidelity(o, sink);
        else if (name == "fidelity-map") run_fidelity_map(o, sink, err);
        else if (name == "optimal-kappa") run_optimal_kappa(o, sink);
        else if (name == "validate") code = run_validate(o, sink) ? 0 : 1;
        sink.close();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
        return 2;
    } catch (const qtrans::Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    if (!o.io.out.empty()) {
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        json manifest;
        manifest["subcommand"] = name;
        manifest["config"] = resolved_config(sub);
        manifest["version"] = kVersion;
        manifest["outputs"] = json::array({o.io.out});
        manifest["wall_clock_seconds"] = seconds;
        std::ofstream mf(o.io.out + ".manifest.json", std::ios::binary);
        if (!mf) {
            err << "error: cannot write manifest for '" << o.io.out << "'\n";
            return 1;
        }
        mf << manifest.dump(2) << '\n';
    }
    return code;
}

} // namespace qtrans::cli
