#include "pipeline/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "data/jhu_csv.hpp"
#include "monitor/mewma.hpp"
#include "report/simulate.hpp"

namespace seirdmon {
namespace fs = std::filesystem;
namespace {

std::string out_path(const RunConfig& cfg, const char* name) { return (fs::path(cfg.out_dir) / name).string(); }

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec || !fs::is_directory(cfg.out_dir)) raise(ErrorKind::Io, "cannot create output directory " + cfg.out_dir);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) raise(ErrorKind::Io, "cannot open " + path + " for writing");
    return os;
}

void finish(std::ofstream& os, const std::string& path) {
    os.flush();
    if (!os) raise(ErrorKind::Io, "write failed: " + path);
}

std::string g(double v, int digits = 10) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

void note(std::ostream* log, const std::string& msg) {
    if (log) *log << msg << '\n';
}

void write_config_dump(const RunConfig& cfg) {
    const std::string path = out_path(cfg, kConfigDumpFile);
    auto os = open_out(path);
    os << dump_config(cfg);
    finish(os, path);
}

std::string join_days(const std::vector<std::int64_t>& days) {
    std::string s;
    for (std::int64_t d : days) s += (s.empty() ? "" : " ") + std::to_string(d);
    return s.empty() ? "none" : s;
}

std::vector<MonitorRecord> run_chart(const std::map<std::int64_t, std::vector<ParamVector>>& archive, double lambda,
                                     double limit) {
    MewmaMonitor chart(lambda, limit);
    for (const auto& [day, samples] : archive) chart.push(day, samples);
    return chart.history();
}

std::vector<std::int64_t> signal_days(const std::vector<MonitorRecord>& history) {
    std::vector<std::int64_t> days;
    for (const auto& r : history)
        if (r.signaled) days.push_back(r.day);
    return days;
}

}  // namespace

IngestResult run_ingest(const RunConfig& cfg, std::ostream* log) {
    validate(cfg);
    if (cfg.data_dir.empty()) raise(ErrorKind::InvalidArgument, "ingest needs --data DIR");
    const RawSeries raw = load_jhu_directory(cfg.data_dir, cfg.region);
    const DerivedObservations derived = derive_observations(raw, cfg.start_date);
    if (derived.repairs > 0)
        note(log, "warning: raised " + std::to_string(derived.repairs) + " cumulative values to their running maximum");
    ensure_out_dir(cfg);
    const std::string path = observations_path(cfg);
    write_observation_csv(path, derived.series);
    note(log, "wrote " + path + " (" + std::to_string(derived.series.observations.size()) + " days from " +
                  format_iso_date(cfg.start_date) + ")");
    return {derived.series.observations.size(), derived.repairs};
}

std::size_t run_simulate(const RunConfig& cfg, std::ostream* log) {
    validate(cfg);
    if (cfg.days < 1) raise(ErrorKind::InvalidArgument, "simulate needs days >= 1");
    const PiecewiseSchedule schedule =
        cfg.schedule.empty() ? PiecewiseSchedule(cfg.sim_params) : read_schedule_csv(cfg.schedule);
    const ObservationSeries series = simulate(schedule, cfg.init, cfg.days, cfg.seed, cfg.start_date, cfg.substeps);
    ensure_out_dir(cfg);
    const std::string path = observations_path(cfg);
    write_observation_csv(path, series);
    note(log, "wrote " + path + " (" + std::to_string(series.observations.size()) + " simulated days)");
    return series.observations.size();
}

FitResult run_fit(const RunConfig& cfg, std::ostream* log) {
    validate(cfg);
    const ObservationSeries obs = read_observation_csv(observations_path(cfg));
    const auto available = static_cast<std::int64_t>(obs.observations.size()) - 1;
    if (available < 1) raise(ErrorKind::DataIntegrity, "need at least two observed days to fit");
    const std::int64_t steps = cfg.days == 0 ? available : cfg.days;
    if (steps > available)
        raise(ErrorKind::DataIntegrity, "requested " + std::to_string(steps) + " days but only " +
                                            std::to_string(available) + " follow day 0");
    ensure_out_dir(cfg);

    ParticleFilter filter(filter_config(cfg), cfg.init, 0);
    std::vector<FilterOutput> outputs;
    std::vector<PredictiveSummary> fits;
    std::vector<ParamQuantiles> quantiles;
    FitResult result;
    result.min_ess = static_cast<double>(cfg.sizes.n_c);
    for (std::int64_t k = 1; k <= steps; ++k) {
        FilterOutput out;
        try {
            out = filter.step(obs.observations[static_cast<std::size_t>(k)]);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Depletion) raise(e.kind(), "day " + std::to_string(k) + ": " + e.what());
            throw;
        }
        fits.push_back(predictive_summary(out, cfg.seed));
        quantiles.push_back(param_quantiles(out));
        result.min_ess = std::min(result.min_ess, out.ess);
        outputs.push_back(std::move(out));
        if (k % 10 == 0 || k == steps) note(log, "day " + std::to_string(k) + "/" + std::to_string(steps));
    }
    result.steps = steps;

    write_posterior_archive(out_path(cfg, kPosteriorFile), outputs);
    write_fit_csv(out_path(cfg, kFitFile), obs, fits);

    const std::string ppath = out_path(cfg, kParamsFile);
    auto os = open_out(ppath);
    os << "day,date,ess";
    for (const char* r : {"alpha", "beta", "gamma", "eta"}) os << ',' << r << "_median," << r << "_lo," << r << "_hi";
    os << ",r0_median\n";
    for (std::size_t k = 0; k < quantiles.size(); ++k) {
        const ParamQuantiles& q = quantiles[k];
        std::vector<double> r0;
        r0.reserve(outputs[k].posterior_samples.size());
        for (const ParamVector& p : outputs[k].posterior_samples)
            if (p.beta + p.gamma > 0.0) r0.push_back(compute_r0(p));
        os << q.day << ',' << format_iso_date(add_days(obs.start_date, q.day)) << ',' << g(outputs[k].ess);
        for (double ParamVector::*m : {&ParamVector::alpha, &ParamVector::beta, &ParamVector::gamma, &ParamVector::eta})
            os << ',' << g(q.median.*m) << ',' << g(q.lower95.*m) << ',' << g(q.upper95.*m);
        os << ',' << (r0.empty() ? std::string("nan") : g(nearest_rank(r0, 0.5))) << '\n';
    }
    finish(os, ppath);
    write_config_dump(cfg);
    return result;
}

std::vector<SignalList> run_monitor(const RunConfig& cfg, std::ostream* log) {
    validate(cfg);
    const auto archive = read_posterior_archive(out_path(cfg, kPosteriorFile));
    if (archive.size() < 2) raise(ErrorKind::DataIntegrity, "monitoring needs at least two days of posterior samples");
    ensure_out_dir(cfg);

    const auto main = run_chart(archive, cfg.lambda, cfg.control_limit);
    const std::string mpath = out_path(cfg, kMonitorFile);
    auto os = open_out(mpath);
    os << "day,t2,signaled,mewma_alpha,mewma_gamma,mewma_beta,mewma_eta\n";
    for (const auto& r : main) {
        os << r.day << ',' << g(r.t2) << ',' << (r.signaled ? 1 : 0);
        for (int c = 0; c < 4; ++c) os << ',' << g(r.mewma[c]);
        os << '\n';
    }
    finish(os, mpath);

    std::vector<SignalList> lists{{cfg.lambda, signal_days(main)}};
    if (cfg.sweep) {
        const std::string spath = out_path(cfg, kSweepFile);
        auto ss = open_out(spath);
        ss << "lambda,day,t2,signaled\n";
        for (double lambda : cfg.sweep_lambdas) {
            const auto hist = run_chart(archive, lambda, cfg.control_limit);
            for (const auto& r : hist) ss << g(lambda) << ',' << r.day << ',' << g(r.t2) << ',' << (r.signaled ? 1 : 0) << '\n';
            lists.push_back({lambda, signal_days(hist)});
        }
        finish(ss, spath);
    }

    const std::string tpath = out_path(cfg, kSignalsFile);
    auto ts = open_out(tpath);
    for (std::size_t k = 0; k < lists.size(); ++k) {
        const std::string line = (k == 0 ? "lambda=" : "sweep lambda=") + g(lists[k].lambda) +
                                 " limit=" + g(cfg.control_limit) + ": " + join_days(lists[k].days);
        ts << line << '\n';
        note(log, line);
    }
    finish(ts, tpath);
    return lists;
}

ReportResult run_report(const RunConfig& cfg, std::ostream* log) {
    validate(cfg);
    const ObservationSeries obs = read_observation_csv(observations_path(cfg));
    const auto fits = read_fit_csv(out_path(cfg, kFitFile));

    ReportResult r;
    r.pseudo_r2 = pseudo_r2(obs, fits);
    r.coverage = coverage(obs, fits);

    const std::string mpath = out_path(cfg, kMonitorFile);
    std::ifstream ms(mpath, std::ios::binary);
    if (!ms) raise(ErrorKind::NotFound, "cannot open " + mpath + " (run monitor first)");
    std::string line;
    std::size_t line_no = 1;
    std::getline(ms, line);
    while (std::getline(ms, line)) {
        ++line_no;
        const auto cells = split_csv_line(strip_cr(line));
        if (cells.size() < 3) raise(ErrorKind::Format, mpath + ": line " + std::to_string(line_no) + ": too few fields");
        if (parse_int(cells[2], line_no) != 0) r.signal_days.push_back(parse_int(cells[0], line_no));
    }

    std::ostringstream text;
    text << "region: " << cfg.region << '\n'
         << "start_date: " << format_iso_date(obs.start_date) << '\n'
         << "days: " << fits.size() << '\n'
         << "pseudo_r2: " << g(r.pseudo_r2) << '\n'
         << "p_fit: " << g(r.coverage) << '\n'
         << "lambda: " << g(cfg.lambda) << '\n'
         << "control_limit: " << g(cfg.control_limit) << '\n'
         << "signal_days: " << join_days(r.signal_days) << '\n';
    r.text = text.str();

    const std::string spath = out_path(cfg, kSummaryFile);
    auto os = open_out(spath);
    os << r.text;
    finish(os, spath);
    note(log, r.text);
    return r;
}

void write_posterior_archive(const std::string& path, const std::vector<FilterOutput>& outputs) {
    auto os = open_out(path);
    os << "day,particle,alpha,beta,gamma,eta\n";
    for (const FilterOutput& out : outputs) {
        for (std::size_t j = 0; j < out.posterior_samples.size(); ++j) {
            const ParamVector& p = out.posterior_samples[j];
            os << out.day << ',' << j << ',' << g(p.alpha, 17) << ',' << g(p.beta, 17) << ',' << g(p.gamma, 17) << ','
               << g(p.eta, 17) << '\n';
        }
    }
    finish(os, path);
}

std::map<std::int64_t, std::vector<ParamVector>> read_posterior_archive(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) raise(ErrorKind::NotFound, "cannot open " + path + " (run fit first)");
    std::string line;
    if (!std::getline(is, line) || strip_cr(line) != "day,particle,alpha,beta,gamma,eta")
        raise(ErrorKind::Format, path + ": line 1: unexpected header");
    std::map<std::int64_t, std::vector<ParamVector>> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view row = strip_cr(line);
        if (row.empty()) continue;
        const auto cells = split_csv_line(row);
        if (cells.size() != 6) raise(ErrorKind::Format, path + ": line " + std::to_string(line_no) + ": expected 6 fields");
        const std::int64_t day = parse_int(cells[0], line_no);
        const ParamVector p{parse_double(cells[2], line_no), parse_double(cells[3], line_no),
                            parse_double(cells[4], line_no), parse_double(cells[5], line_no)};
        out[day].push_back(p);
    }
    return out;
}

void write_fit_csv(const std::string& path, const ObservationSeries& obs, const std::vector<PredictiveSummary>& fits) {
    auto os = open_out(path);
    os << "day,date";
    for (const char* c : {"infected", "recovered", "deaths"}) os << ',' << c << "_obs," << c << "_median," << c << "_lo," << c << "_hi";
    os << '\n';
    for (const PredictiveSummary& f : fits) {
        const Observation& o = obs.observations.at(static_cast<std::size_t>(f.day));
        const std::int64_t y[3] = {o.infected, o.recovered, o.deaths};
        os << f.day << ',' << format_iso_date(add_days(obs.start_date, f.day));
        for (int c = 0; c < 3; ++c) os << ',' << y[c] << ',' << f.median[c] << ',' << f.lower95[c] << ',' << f.upper95[c];
        os << '\n';
    }
    finish(os, path);
}

std::vector<PredictiveSummary> read_fit_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) raise(ErrorKind::NotFound, "cannot open " + path + " (run fit first)");
    std::string line;
    std::getline(is, line);
    std::vector<PredictiveSummary> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view row = strip_cr(line);
        if (row.empty()) continue;
        const auto cells = split_csv_line(row);
        if (cells.size() != 14) raise(ErrorKind::Format, path + ": line " + std::to_string(line_no) + ": expected 14 fields");
        PredictiveSummary s;
        s.day = parse_int(cells[0], line_no);
        for (int c = 0; c < 3; ++c) {
            s.median[c] = parse_int(cells[3 + 4 * c], line_no);
            s.lower95[c] = parse_int(cells[4 + 4 * c], line_no);
            s.upper95[c] = parse_int(cells[5 + 4 * c], line_no);
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace seirdmon
