#include "pipeline/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace seirdmon {
namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    const std::string s(trim(v));
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x))
        raise(ErrorKind::InvalidArgument, key + ": not a finite number '" + v + "'");
    return x;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    const std::string_view s = trim(v);
    std::int64_t x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        raise(ErrorKind::InvalidArgument, key + ": not an integer '" + v + "'");
    return x;
}

std::size_t to_count(const std::string& key, const std::string& v) {
    const std::int64_t x = to_int(key, v);
    if (x < 1) raise(ErrorKind::InvalidArgument, key + ": must be >= 1");
    return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string_view s = trim(v);
    if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "off" || s == "no") return false;
    raise(ErrorKind::InvalidArgument, key + ": expected true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& cell : split_csv_line(v)) out.push_back(to_double(key, cell));
    if (out.empty()) raise(ErrorKind::InvalidArgument, key + ": empty list");
    return out;
}

struct Option {
    std::string key;
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

Option real(std::string key, std::string help, double RunConfig::*m) {
    const std::string k = key;
    return {std::move(key), std::move(help), [k, m](RunConfig& c, const std::string& v) { c.*m = to_double(k, v); },
            [m](const RunConfig& c) { return fmt_double(c.*m); }};
}

template <class S>
Option real_in(std::string key, std::string help, S RunConfig::*s, double S::*m) {
    const std::string k = key;
    return {std::move(key), std::move(help),
            [k, s, m](RunConfig& c, const std::string& v) { (c.*s).*m = to_double(k, v); },
            [s, m](const RunConfig& c) { return fmt_double((c.*s).*m); }};
}

Option count(std::string key, std::string help, std::size_t CloudSizes::*m) {
    const std::string k = key;
    return {std::move(key), std::move(help), [k, m](RunConfig& c, const std::string& v) { c.sizes.*m = to_count(k, v); },
            [m](const RunConfig& c) { return std::to_string(c.sizes.*m); }};
}

Option text(std::string key, std::string help, std::string RunConfig::*m) {
    return {std::move(key), std::move(help), [m](RunConfig& c, const std::string& v) { c.*m = std::string(trim(v)); },
            [m](const RunConfig& c) { return c.*m; }};
}

Option flag(std::string key, std::string help, bool RunConfig::*m) {
    const std::string k = key;
    return {std::move(key), std::move(help), [k, m](RunConfig& c, const std::string& v) { c.*m = to_bool(k, v); },
            [m](const RunConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

const std::vector<Option>& options() {
    static const std::vector<Option> table = [] {
        std::vector<Option> t;
        t.push_back(text("data", "directory with the JHU global time-series CSVs", &RunConfig::data_dir));
        t.push_back(text("region", "Country/Region to extract (exact match)", &RunConfig::region));
        t.push_back({"start_date", "calendar date of day 0 (YYYY-MM-DD)",
                     [](RunConfig& c, const std::string& v) { c.start_date = parse_iso_date(trim(v)); },
                     [](const RunConfig& c) { return format_iso_date(c.start_date); }});
        t.push_back({"days", "number of filter steps T (0 = all available)",
                     [](RunConfig& c, const std::string& v) {
                         c.days = to_int("days", v);
                         if (c.days < 0) raise(ErrorKind::InvalidArgument, "days: must be >= 0");
                     },
                     [](const RunConfig& c) { return std::to_string(c.days); }});
        t.push_back(text("observations", "canonical observation CSV (default <out>/observations.csv)",
                         &RunConfig::observations));
        t.push_back(text("out", "output directory", &RunConfig::out_dir));
        t.push_back(count("n_c", "initial prior draws", &CloudSizes::n_c));
        t.push_back(count("n_p", "posterior samples kept per day", &CloudSizes::n_p));
        t.push_back(count("n_b", "children per posterior sample", &CloudSizes::n_b));
        t.push_back({"substeps", "RK4 substeps per day",
                     [](RunConfig& c, const std::string& v) {
                         const std::int64_t n = to_int("substeps", v);
                         if (n < 1 || n > 1000000) raise(ErrorKind::InvalidArgument, "substeps: out of range");
                         c.substeps = static_cast<int>(n);
                     },
                     [](const RunConfig& c) { return std::to_string(c.substeps); }});
        t.push_back(real("sigma_log", "log-normal augmentation scale", &RunConfig::sigma_log));
        t.push_back(flag("prior_correction", "weight by prior over proposal density", &RunConfig::prior_correction));
        t.push_back({"threads", "worker threads for weighting (0 = auto)",
                     [](RunConfig& c, const std::string& v) {
                         const std::int64_t n = to_int("threads", v);
                         if (n < 0 || n > 4096) raise(ErrorKind::InvalidArgument, "threads: out of range");
                         c.threads = static_cast<unsigned>(n);
                     },
                     [](const RunConfig& c) { return std::to_string(c.threads); }});
        t.push_back(real_in("prior_alpha", "prior mean of alpha", &RunConfig::prior, &PriorSpec::mean_alpha));
        t.push_back(real_in("prior_beta", "prior mean of beta", &RunConfig::prior, &PriorSpec::mean_beta));
        t.push_back(real_in("prior_gamma", "prior mean of gamma", &RunConfig::prior, &PriorSpec::mean_gamma));
        t.push_back(real_in("prior_eta", "prior mean of eta", &RunConfig::prior, &PriorSpec::mean_eta));
        t.push_back(real_in("init_s", "initial S", &RunConfig::init, &StateVector::s));
        t.push_back(real_in("init_e", "initial E", &RunConfig::init, &StateVector::e));
        t.push_back(real_in("init_i", "initial I", &RunConfig::init, &StateVector::i));
        t.push_back(real_in("init_r", "initial R", &RunConfig::init, &StateVector::r));
        t.push_back(real_in("init_d", "initial D", &RunConfig::init, &StateVector::d));
        t.push_back({"seed", "master RNG seed",
                     [](RunConfig& c, const std::string& v) {
                         const std::string_view s = trim(v);
                         std::uint64_t x = 0;
                         const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
                         if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
                             raise(ErrorKind::InvalidArgument, "seed: not an unsigned integer '" + v + "'");
                         c.seed = x;
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        t.push_back(real("lambda", "MEWMA smoothing coefficient", &RunConfig::lambda));
        t.push_back(real("control_limit", "T2 signal threshold", &RunConfig::control_limit));
        t.push_back(flag("sweep", "also run the chart for every sweep_lambdas value", &RunConfig::sweep));
        t.push_back({"sweep_lambdas", "comma-separated smoothing coefficients for the sweep",
                     [](RunConfig& c, const std::string& v) { c.sweep_lambdas = to_list("sweep_lambdas", v); },
                     [](const RunConfig& c) {
                         std::string s;
                         for (double x : c.sweep_lambdas) s += (s.empty() ? "" : ",") + fmt_double(x);
                         return s;
                     }});
        t.push_back(real_in("sim_alpha", "simulated alpha", &RunConfig::sim_params, &ParamVector::alpha));
        t.push_back(real_in("sim_beta", "simulated beta", &RunConfig::sim_params, &ParamVector::beta));
        t.push_back(real_in("sim_gamma", "simulated gamma", &RunConfig::sim_params, &ParamVector::gamma));
        t.push_back(real_in("sim_eta", "simulated eta", &RunConfig::sim_params, &ParamVector::eta));
        t.push_back(text("schedule", "piecewise rate schedule CSV for simulate", &RunConfig::schedule));
        return t;
    }();
    return table;
}

const Option& find_option(const std::string& key) {
    for (const auto& o : options())
        if (o.key == key) return o;
    raise(ErrorKind::InvalidArgument, "unknown option '" + key + "'");
}

}  // namespace

const std::vector<std::string>& option_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& o : options()) k.push_back(o.key);
        return k;
    }();
    return keys;
}

std::string option_help(const std::string& key) { return find_option(key).help; }

void set_option(RunConfig& cfg, const std::string& key, const std::string& value) {
    find_option(key).set(cfg, value);
}

std::string get_option(const RunConfig& cfg, const std::string& key) { return find_option(key).get(cfg); }

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) raise(ErrorKind::NotFound, "cannot open config file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string_view s = strip_cr(line);
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            raise(ErrorKind::InvalidArgument, path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(s.substr(0, eq)));
        try {
            set_option(cfg, key, std::string(trim(s.substr(eq + 1))));
        } catch (const Error& e) {
            raise(e.kind(), path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.region.empty()) raise(ErrorKind::InvalidArgument, "region must not be empty");
    if (cfg.out_dir.empty()) raise(ErrorKind::InvalidArgument, "out must not be empty");
    if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) raise(ErrorKind::InvalidArgument, "lambda must be in (0, 1]");
    for (double l : cfg.sweep_lambdas)
        if (!(l > 0.0 && l <= 1.0)) raise(ErrorKind::InvalidArgument, "sweep_lambdas must be in (0, 1]");
    if (!(cfg.control_limit > 0.0)) raise(ErrorKind::InvalidArgument, "control_limit must be > 0");
    if (!is_valid(cfg.init)) raise(ErrorKind::InvalidArgument, "initial state must be finite and >= 0");
    if (!is_valid(cfg.sim_params)) raise(ErrorKind::InvalidArgument, "simulated rates must be finite and >= 0");
    require_valid(filter_config(cfg));
}

FilterConfig filter_config(const RunConfig& cfg) {
    FilterConfig f;
    f.sizes = cfg.sizes;
    f.prior = cfg.prior;
    f.kernel.sigma_log = cfg.sigma_log;
    f.weigh.substeps = cfg.substeps;
    f.weigh.prior_correction = cfg.prior_correction;
    f.weigh.threads = resolved_threads(cfg);
    f.master_seed = cfg.seed;
    return f;
}

std::string observations_path(const RunConfig& cfg) {
    if (!cfg.observations.empty()) return cfg.observations;
    return (std::filesystem::path(cfg.out_dir) / "observations.csv").string();
}

unsigned resolved_threads(const RunConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string dump_config(const RunConfig& cfg) {
    std::string s;
    for (const auto& o : options()) {
        if (o.key == "out" || o.key == "threads") continue;
        s += o.key + " = " + o.get(cfg) + "\n";
    }
    return s;
}

}  // namespace seirdmon
