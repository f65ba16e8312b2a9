#include "qreduce/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qreduce {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
    }
    if (pos != value.size())
        throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + value + "' as an integer");
    }
    if (pos != value.size())
        throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
    return v;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("key '" + key + "': empty list entry");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "omega") c.omega = parse_double(key, value);
    else if (key == "nu") c.nu = parse_double(key, value);
    else if (key == "g") c.g = parse_double(key, value);
    else if (key == "lambda") c.lambda = parse_double(key, value);
    else if (key == "alpha_re") c.alpha_re = parse_double(key, value);
    else if (key == "alpha_im") c.alpha_im = parse_double(key, value);
    else if (key == "c1_re") c.c1_re = parse_double(key, value);
    else if (key == "c1_im") c.c1_im = parse_double(key, value);
    else if (key == "c2_re") c.c2_re = parse_double(key, value);
    else if (key == "c2_im") c.c2_im = parse_double(key, value);
    else if (key == "dt") c.dt = parse_double(key, value);
    else if (key == "sample_interval") c.sample_interval = parse_double(key, value);
    else if (key == "t_max") c.t_max = parse_double(key, value);
    else if (key == "threshold") c.threshold = parse_double(key, value);
    else if (key == "n_paths") {
        const long long v = parse_int(key, value);
        if (v < 0 || v > 1000000000) throw ConfigError("n_paths out of range");
        c.n_paths = static_cast<int>(v);
    } else if (key == "seed") {
        const long long v = parse_int(key, value);
        if (v < 0) throw ConfigError("seed must be >= 0");
        c.seed = static_cast<std::uint64_t>(v);
    } else if (key == "n_max") {
        if (value == "auto") {
            c.n_max.reset();
        } else {
            const long long v = parse_int(key, value);
            if (v < 1 || v > 200000) throw ConfigError("n_max out of range");
            c.n_max = static_cast<int>(v);
        }
    } else if (key == "out_dir") {
        c.out_dir = value;
    } else if (key == "g_list") {
        c.g_list = parse_double_list(key, value);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

} // namespace

// ------------------------------ RunConfig -----------------------------------

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig config;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        set_key(config, key, value);
    }
    return config;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

void RunConfig::apply_override(const std::string& key_equals_value) {
    const auto eq = key_equals_value.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + key_equals_value + "': expected key=value");
    const std::string key = trim(key_equals_value.substr(0, eq));
    const std::string value = trim(key_equals_value.substr(eq + 1));
    if (key.empty() || value.empty())
        throw ConfigError("override '" + key_equals_value + "': empty key or value");
    set_key(*this, key, value);
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os << "omega = " << full_precision(omega) << "\n";
    os << "nu = " << full_precision(nu) << "\n";
    os << "g = " << full_precision(g) << "\n";
    os << "lambda = " << full_precision(lambda) << "\n";
    os << "alpha_re = " << full_precision(alpha_re) << "\n";
    os << "alpha_im = " << full_precision(alpha_im) << "\n";
    os << "c1_re = " << full_precision(c1_re) << "\n";
    os << "c1_im = " << full_precision(c1_im) << "\n";
    os << "c2_re = " << full_precision(c2_re) << "\n";
    os << "c2_im = " << full_precision(c2_im) << "\n";
    os << "dt = " << full_precision(dt) << "\n";
    os << "sample_interval = " << full_precision(sample_interval) << "\n";
    os << "t_max = " << full_precision(t_max) << "\n";
    os << "n_max = " << (n_max ? std::to_string(*n_max) : std::string("auto")) << "\n";
    os << "threshold = " << full_precision(threshold) << "\n";
    os << "n_paths = " << n_paths << "\n";
    os << "seed = " << seed << "\n";
    if (!out_dir.empty()) os << "out_dir = " << out_dir << "\n";
    if (!g_list.empty()) {
        os << "g_list = ";
        for (std::size_t i = 0; i < g_list.size(); ++i)
            os << (i ? "," : "") << full_precision(g_list[i]);
        os << "\n";
    }
    return os.str();
}

ExperimentSpec RunConfig::to_spec() const {
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (!(t_max > 0.0)) throw ConfigError("t_max must be > 0");

    ModelParams params{omega, nu, g, lambda};
    params.validate();
    BranchSpec branch(Complex(c1_re, c1_im), Complex(c2_re, c2_im), Complex(alpha_re, alpha_im));
    const FockCutoff cutoff =
        n_max ? FockCutoff(*n_max) : FockCutoff::for_run(std::abs(branch.alpha), g, t_max);
    IntegratorConfig integrator;
    integrator.dt = dt;
    integrator.sample_interval = sample_interval;
    integrator.validate();

    ExperimentSpec spec{params, branch, cutoff, integrator, t_max, threshold, n_paths, seed};
    spec.validate();
    return spec;
}

std::string RunConfig::resolved_out_dir() const {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv("QREDUCE_OUT_DIR"); env && *env) return env;
    return ".";
}

// ------------------------------ Formatting ----------------------------------

std::string format_sig(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

// ------------------------------ Writers -------------------------------------

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

json ensemble_json(const EnsembleResult& result, const RunConfig& config) {
    json j;
    j["n_paths"] = static_cast<int>(result.paths.size());
    j["count_plus"] = result.count_plus;
    j["count_minus"] = result.count_minus;
    j["count_unreduced"] = result.count_unreduced;
    j["mean_tau"] = result.mean_tau ? json(*result.mean_tau) : json(nullptr);
    j["std_tau"] = result.std_tau ? json(*result.std_tau) : json(nullptr);
    j["stderr_tau"] = result.stderr_tau ? json(*result.stderr_tau) : json(nullptr);
    json c;
    c["omega"] = config.omega;
    c["nu"] = config.nu;
    c["g"] = config.g;
    c["lambda"] = config.lambda;
    c["alpha_re"] = config.alpha_re;
    c["alpha_im"] = config.alpha_im;
    c["c1_re"] = config.c1_re;
    c["c1_im"] = config.c1_im;
    c["c2_re"] = config.c2_re;
    c["c2_im"] = config.c2_im;
    c["dt"] = config.dt;
    c["sample_interval"] = config.sample_interval;
    c["t_max"] = config.t_max;
    c["n_max"] = config.n_max ? json(*config.n_max) : json("auto");
    c["threshold"] = config.threshold;
    c["n_paths"] = config.n_paths;
    c["seed"] = config.seed;
    j["config"] = c;
    return j;
}

} // namespace

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& record) {
    std::ofstream out = open_out(path);
    out << "t,re_a,im_a,var_a,re_da2,im_da2,sx,cov_sx_field,norm_drift,trunc_top5\n";
    for (std::size_t i = 0; i < record.times.size(); ++i) {
        const ObservableSet& o = record.series[i];
        out << format_sig(record.times[i]) << ',' << format_sig(o.a_mean.real()) << ','
            << format_sig(o.a_mean.imag()) << ',' << format_sig(o.var_a) << ','
            << format_sig(o.delta_a_sq.real()) << ',' << format_sig(o.delta_a_sq.imag()) << ','
            << format_sig(o.sx_mean) << ',' << format_sig(o.cov_current_field) << ','
            << format_sig(record.step_drift[i]) << ',' << format_sig(record.occupancy_top5[i])
            << '\n';
    }
    finish(out, path);
}

void write_paths_csv(const std::filesystem::path& path, const EnsembleResult& result) {
    std::ofstream out = open_out(path);
    out << "path_index,stopping_time,outcome\n";
    for (const auto& p : result.paths) {
        out << p.path_index << ',';
        if (p.stopping_time) out << format_sig(*p.stopping_time);
        out << ',';
        if (p.outcome) out << *p.outcome;
        out << '\n';
    }
    finish(out, path);
}

void write_summary_json(const std::filesystem::path& path, const EnsembleResult& result,
                        const RunConfig& config) {
    std::ofstream out = open_out(path);
    out << ensemble_json(result, config).dump(2) << '\n';
    finish(out, path);
}

void write_kde_csv(const std::filesystem::path& path, const DensityEstimate& estimate) {
    std::ofstream out = open_out(path);
    out << "tau,density\n";
    for (std::size_t i = 0; i < estimate.grid.size(); ++i)
        out << format_sig(estimate.grid[i]) << ',' << format_sig(estimate.density[i]) << '\n';
    finish(out, path);
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
    std::ofstream out = open_out(path);
    out << "g,n_paths,n_reduced,mean_tau,std_tau,stderr_tau\n";
    for (const auto& p : points) {
        out << format_sig(p.g) << ',' << p.n_paths << ',' << p.n_reduced << ',';
        if (p.mean_tau) out << format_sig(*p.mean_tau);
        out << ',';
        if (p.std_tau) out << format_sig(*p.std_tau);
        out << ',';
        if (p.stderr_tau) out << format_sig(*p.stderr_tau);
        out << '\n';
    }
    finish(out, path);
}

void write_fit_json(const std::filesystem::path& path, const FitResult& fit,
                    const std::vector<SweepPoint>& points) {
    json j;
    j["k"] = fit.k;
    j["exponent"] = fit.exponent;
    j["k_fixed_exponent"] = fit.k_fixed_exponent;
    j["residual"] = fit.residual;
    json pts = json::array();
    for (const auto& p : points) {
        json e;
        e["g"] = p.g;
        e["n_paths"] = p.n_paths;
        e["n_reduced"] = p.n_reduced;
        e["mean_tau"] = p.mean_tau ? json(*p.mean_tau) : json(nullptr);
        e["std_tau"] = p.std_tau ? json(*p.std_tau) : json(nullptr);
        pts.push_back(e);
    }
    j["points"] = pts;
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

} // namespace qreduce
