#include "fbsde/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "fbsde/catalog.hpp"
#include "fbsde/expansion.hpp"
#include "fbsde/monte_carlo.hpp"
#include "fbsde/reference.hpp"
#include "fbsde/version.hpp"

namespace fbsde {

// ---------------------------------------------------------------------------
// Minimal TOML subset: [section] headers, key = value with strings, numbers,
// booleans and one-line arrays, '#' comments. Keys are stored fully qualified
// as section.key.
// ---------------------------------------------------------------------------

namespace {

struct TomlValue {
    std::string raw;
    bool is_string = false;
    std::vector<std::string> items; // array elements (raw or unquoted strings)
    bool is_array = false;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

TomlValue parse_value(std::string text, const std::string& where) {
    TomlValue v;
    text = trim(text);
    if (text.empty()) throw config_error("config: empty value for " + where);
    if (text.front() == '[') {
        if (text.back() != ']') throw config_error("config: unterminated array for " + where);
        v.is_array = true;
        std::string body = text.substr(1, text.size() - 2);
        std::string cur;
        for (char ch : body) {
            if (ch == ',') {
                if (!trim(cur).empty()) v.items.push_back(trim(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!trim(cur).empty()) v.items.push_back(trim(cur));
        for (auto& item : v.items)
            if (item.size() >= 2 && item.front() == '"' && item.back() == '"')
                item = item.substr(1, item.size() - 2);
        return v;
    }
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') throw config_error("config: unterminated string for " + where);
        v.is_string = true;
        v.raw = text.substr(1, text.size() - 2);
        return v;
    }
    v.raw = text;
    return v;
}

std::map<std::string, TomlValue> parse_toml(std::istream& in) {
    std::map<std::string, TomlValue> out;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // strip comments outside strings
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) {
                line.erase(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error("config: bad section header at line " + std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error("config: expected key = value at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw config_error("config: empty key at line " + std::to_string(line_no));
        const std::string full = section.empty() ? key : section + "." + key;
        out[full] = parse_value(line.substr(eq + 1), full);
    }
    return out;
}

class ConfigReader {
public:
    explicit ConfigReader(std::map<std::string, TomlValue> values) : values_(std::move(values)) {}

    // Accepts the key either bare or under any of the given sections.
    const TomlValue* find(const std::string& key, std::initializer_list<const char*> sections) const {
        if (auto it = values_.find(key); it != values_.end()) return &it->second;
        for (const char* s : sections)
            if (auto it = values_.find(std::string(s) + "." + key); it != values_.end()) return &it->second;
        return nullptr;
    }

    std::string str(const std::string& key, std::initializer_list<const char*> sections,
                    const std::string& fallback) const {
        const TomlValue* v = find(key, sections);
        return v ? v->raw : fallback;
    }
    double num(const std::string& key, std::initializer_list<const char*> sections, double fallback) const {
        const TomlValue* v = find(key, sections);
        if (!v) return fallback;
        return to_num(v->raw, key);
    }
    bool boolean(const std::string& key, std::initializer_list<const char*> sections, bool fallback) const {
        const TomlValue* v = find(key, sections);
        if (!v) return fallback;
        if (v->raw == "true") return true;
        if (v->raw == "false") return false;
        throw config_error("config: expected true/false for " + key);
    }
    std::vector<double> num_list(const std::string& key, std::initializer_list<const char*> sections,
                                 std::vector<double> fallback) const {
        const TomlValue* v = find(key, sections);
        if (!v) return fallback;
        if (!v->is_array) return {to_num(v->raw, key)};
        std::vector<double> out;
        for (const auto& item : v->items) out.push_back(to_num(item, key));
        return out;
    }
    std::vector<std::string> str_list(const std::string& key, std::initializer_list<const char*> sections) const {
        const TomlValue* v = find(key, sections);
        if (!v) return {};
        if (!v->is_array) return {v->raw};
        return v->items;
    }

private:
    static double to_num(const std::string& s, const std::string& key) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw config_error("config: expected a number for " + key + ", got '" + s + "'");
        }
    }

    std::map<std::string, TomlValue> values_;
};

} // namespace

ExperimentConfig ExperimentConfig::from_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    ConfigReader r(parse_toml(in));

    ExperimentConfig c;
    c.command = r.str("command", {"experiment"}, "");
    c.model = r.str("model", {"experiment"}, "");
    c.eps_list = r.num_list("eps", {"experiment"}, c.eps_list);
    c.order = static_cast<int>(r.num("order", {"experiment"}, c.order));
    c.n_steps = static_cast<int>(r.num("n_steps", {"experiment"}, c.n_steps));
    c.n_paths = static_cast<int>(r.num("n_paths", {"experiment"}, c.n_paths));
    c.seed = static_cast<std::uint64_t>(r.num("seed", {"experiment"}, static_cast<double>(c.seed)));
    c.threads = static_cast<int>(r.num("threads", {"experiment"}, c.threads));
    c.lsmc_paths = static_cast<int>(r.num("paths", {"lsmc"}, c.lsmc_paths));
    c.lsmc_degree = static_cast<int>(r.num("degree", {"lsmc"}, c.lsmc_degree));
    c.lsmc_steps = static_cast<int>(r.num("steps", {"lsmc"}, c.lsmc_steps));
    c.stream_paths = r.boolean("stream_paths", {"output"}, c.stream_paths);
    c.stream_limit = static_cast<int>(r.num("stream_limit", {"output"}, c.stream_limit));
    c.theta_list = r.num_list("theta", {"charfn", "experiment"}, c.theta_list);
    c.measure_files = r.str_list("measure_files", {"experiment"});
    c.out_dir = r.str("dir", {"output"}, c.out_dir);
    return c;
}

void ExperimentConfig::check() const {
    static const char* commands[] = {"expand", "simulate", "compare", "sweep", "charfn"};
    bool ok = false;
    for (const char* cmd : commands) ok = ok || command == cmd;
    if (!ok) throw config_error("unknown command: '" + command + "'");
    if (model.empty()) throw config_error("config: model is required");
    for (double e : eps_list)
        if (!(e > 0.0 && e <= 1.0)) throw config_error("config: eps values must lie in (0, 1]");
    if (n_steps < 1 || lsmc_steps < 1) throw config_error("config: step counts must be >= 1");
    if (order != -1 && (order < 0 || order > 8)) throw config_error("config: order must be in 0..8");
}

namespace {

int resolved_threads(int t) {
    if (t > 0) return t;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

struct Session {
    ExperimentConfig cfg;
    CatalogModel model;
    std::filesystem::path out;

    TimeGrid master_grid() const {
        const double T = model.is_levy ? model.levy->horizon : model.problem.horizon;
        return TimeGrid(0.0, T, cfg.n_steps);
    }

    std::ofstream open_csv(const std::string& name) const {
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw config_error("cannot write output file: " + (out / name).string());
        return f;
    }
};

void write_manifest(const Session& s) {
    std::ofstream f(s.out / "manifest.toml", std::ios::binary);
    f << "# resolved experiment configuration\n";
    f << "version = \"" << FBSDE_VERSION << "\"\n";
    f << "command = \"" << s.cfg.command << "\"\n";
    f << "model = \"" << s.cfg.model << "\"\n";
    f << "eps = [";
    for (std::size_t i = 0; i < s.cfg.eps_list.size(); ++i)
        f << (i ? ", " : "") << format_g17(s.cfg.eps_list[i]);
    f << "]\n";
    f << "order = " << s.cfg.order << "\n";
    f << "n_steps = " << s.cfg.n_steps << "\n";
    f << "n_paths = " << s.cfg.n_paths << "\n";
    f << "seed = " << s.cfg.seed << "\n";
    f << "threads = " << resolved_threads(s.cfg.threads) << "\n";
    f << "\n[lsmc]\npaths = " << s.cfg.lsmc_paths << "\ndegree = " << s.cfg.lsmc_degree
      << "\nsteps = " << s.cfg.lsmc_steps << "\n";
    f << "\n[charfn]\ntheta = [";
    for (std::size_t i = 0; i < s.cfg.theta_list.size(); ++i)
        f << (i ? ", " : "") << format_g17(s.cfg.theta_list[i]);
    f << "]\n";
    f << "\n[output]\ndir = \"" << s.out.string() << "\"\nstream_paths = "
      << (s.cfg.stream_paths ? "true" : "false") << "\n";
}

struct GenericExpansion {
    TimeGrid grid;
    Order0Solution order0;
    FrozenCoefficients frozen;
    Order1Coefficients o1;
    Order2Coefficients o2;
};

GenericExpansion solve_generic(const FBSDEProblem& problem, const DiscreteLevyMeasure& measure,
                               const TimeGrid& grid) {
    Order0Solution order0 = solve_order0(problem, grid);
    FrozenCoefficients frozen = freeze(problem, order0, measure);
    Order1Coefficients o1 = solve_order1(frozen);
    Order2Coefficients o2 = solve_order2(frozen, o1);
    return {grid, std::move(order0), std::move(frozen), std::move(o1), std::move(o2)};
}

double generic_y0(const GenericExpansion& ge, double eps, int order) {
    // flows start at zero, so only the constant coefficients survive at s = 0
    double y = ge.order0.y0(0);
    if (order >= 1) y += eps * ge.o1.y0(0);
    if (order >= 2) y += eps * eps * ge.o2.y0(0);
    return y;
}

struct ReferenceRun {
    double y0;
    double std_error;
    std::vector<double> step_condition;
    TimeGrid lsmc_grid{0.0, 1.0, 1};
};

ReferenceRun reference_y0(const Session& s, double eps) {
    LSMCConfig rc;
    rc.n_paths = s.cfg.lsmc_paths;
    rc.basis_degree = s.cfg.lsmc_degree;
    const double T = s.model.is_levy ? s.model.levy->horizon : s.model.problem.horizon;
    rc.grid = TimeGrid(0.0, T, s.cfg.lsmc_steps);
    rc.seed = s.cfg.seed;
    rc.threads = resolved_threads(s.cfg.threads);
    LSMCResult r = s.model.is_levy
                       ? lsmc_solve(wrap_for_reference(*s.model.levy, eps), s.model.measure, 1.0, rc)
                       : lsmc_solve(s.model.problem, s.model.measure, eps, rc,
                                    s.model.intensity ? &*s.model.intensity : nullptr);
    return {r.y0, r.std_error, std::move(r.step_condition), rc.grid};
}

void write_lsmc_diagnostics(const Session& s, std::size_t eps_index, const ReferenceRun& ref) {
    std::ofstream f = s.open_csv("lsmc_condition_eps" + std::to_string(eps_index) + ".csv");
    f << "step,s,condition\n";
    for (std::size_t i = 0; i < ref.step_condition.size(); ++i)
        f << i << "," << format_g17(ref.lsmc_grid.node(static_cast<int>(i))) << ","
          << format_g17(ref.step_condition[i]) << "\n";
}

double expansion_y0(const Session& s, const TimeGrid& grid, double eps) {
    if (s.model.is_levy) {
        const ExpLevyModel& levy = *s.model.levy;
        const GridFunction y0 = solve_levy_order0(levy, grid);
        const LevyCoefficients coeffs = solve_levy_coeffs(levy, y0, std::max(1, s.cfg.order), grid);
        return evaluate_levy(coeffs, levy, levy.initial_state, 0, eps, s.cfg.order).y;
    }
    if (s.model.intensity) {
        const IntensityTransform q = transform_intensity(s.model.problem, s.model.measure, *s.model.intensity);
        return generic_y0(solve_generic(q.problem, q.measure, grid), eps, s.cfg.order);
    }
    return generic_y0(solve_generic(s.model.problem, s.model.measure, grid), eps, s.cfg.order);
}

void cmd_expand(const Session& s) {
    const TimeGrid grid = s.master_grid();
    if (s.model.is_levy) {
        const ExpLevyModel& levy = *s.model.levy;
        const GridFunction y0 = solve_levy_order0(levy, grid);
        const LevyCoefficients coeffs = solve_levy_coeffs(levy, y0, std::max(1, s.cfg.order), grid);
        std::ofstream f = s.open_csv("levy_coefficients.csv");
        std::vector<const GridFunction*> cols{&coeffs.y0_order};
        std::vector<std::string> labels{"Y0"};
        for (int n = 1; n <= coeffs.max_order(); ++n) {
            cols.push_back(&coeffs.order(n));
            if (coeffs.additive)
                for (int j = 0; j <= n; ++j) labels.push_back("y" + std::to_string(n) + "_" + std::to_string(j));
            else
                labels.push_back("y" + std::to_string(n));
        }
        write_csv_columns(f, grid, cols, labels);
        return;
    }
    GenericExpansion ge = [&] {
        if (s.model.intensity) {
            const IntensityTransform q = transform_intensity(s.model.problem, s.model.measure, *s.model.intensity);
            return solve_generic(q.problem, q.measure, grid);
        }
        return solve_generic(s.model.problem, s.model.measure, grid);
    }();
    std::ofstream f = s.open_csv("coefficients.csv");
    write_csv_columns(f, grid,
                      {&ge.order0.x0, &ge.order0.y0, &ge.o1.y1, &ge.o1.y0, &ge.o2.y2, &ge.o2.y11, &ge.o2.y1,
                       &ge.o2.y0},
                      {"X0", "Y0", "y1_1", "y1_0", "y2_2", "y2_11", "y2_1", "y2_0"});
}

void cmd_simulate(const Session& s) {
    if (s.model.is_levy) throw config_error("simulate: supported for generic catalog models only");
    const TimeGrid grid = s.master_grid();
    const GenericExpansion ge = solve_generic(s.model.problem, s.model.measure, grid);
    const int threads = resolved_threads(s.cfg.threads);

    for (std::size_t ei = 0; ei < s.cfg.eps_list.size(); ++ei) {
        const double eps = s.cfg.eps_list[ei];
        const int P = s.cfg.n_paths;
        const int nn = grid.n_nodes();

        std::vector<double> sum_x(nn, 0.0), sum_x_sq(nn, 0.0), sum_x1(nn, 0.0), sum_x2(nn, 0.0),
            sum_y(nn, 0.0), sum_z(nn, 0.0);
        std::vector<double> terminal_residual(P, 0.0);

        const int n_streamed = s.cfg.stream_paths ? std::min(P, s.cfg.stream_limit) : 0;
        std::vector<std::string> stream_text(n_streamed);

        // per-path quantities land in path-indexed slots, then a serial pass
        // reduces them, so the statistics do not depend on the thread count
        std::vector<std::thread> pool;
        const int chunk = (P + threads - 1) / threads;
        std::vector<std::vector<double>> acc(threads, std::vector<double>(6 * nn, 0.0));
        std::vector<std::exception_ptr> errors(threads);
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    const int lo = t * chunk, hi = std::min(P, lo + chunk);
                    for (int p = lo; p < hi; ++p) {
                        const PathBundle bundle =
                            simulate_noise(grid, s.model.measure, Rng::mix(s.cfg.seed, static_cast<std::uint64_t>(p)));
                        const FlowPaths flows = simulate_flows(s.model.problem, ge.frozen, eps, bundle);
                        const ReconstructedPath rec =
                            reconstruct(ge.order0, &ge.o1, &ge.o2, ge.frozen, flows, eps, s.cfg.order);
                        for (int i = 0; i < nn; ++i) {
                            acc[t][0 * nn + i] += flows.x_eps(i);
                            acc[t][1 * nn + i] += flows.x_eps(i) * flows.x_eps(i);
                            acc[t][2 * nn + i] += flows.x1(i);
                            acc[t][3 * nn + i] += flows.x2(i);
                            acc[t][4 * nn + i] += rec.y_path(i);
                            acc[t][5 * nn + i] += rec.z_path(i);
                        }
                        terminal_residual[p] =
                            std::abs(rec.y_path.terminal() - s.model.problem.xi(flows.x_eps.terminal()));
                        if (p < n_streamed) {
                            std::ostringstream line;
                            for (int i = 0; i < nn; ++i)
                                line << p << "," << i << "," << format_g17(flows.x_eps(i)) << ","
                                     << format_g17(flows.x1(i)) << "," << format_g17(flows.x2(i)) << ","
                                     << format_g17(rec.y_path(i)) << "," << format_g17(rec.z_path(i)) << "\n";
                            stream_text[p] = line.str();
                        }
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);

        for (int t = 0; t < threads; ++t)
            for (int i = 0; i < nn; ++i) {
                sum_x[i] += acc[t][0 * nn + i];
                sum_x_sq[i] += acc[t][1 * nn + i];
                sum_x1[i] += acc[t][2 * nn + i];
                sum_x2[i] += acc[t][3 * nn + i];
                sum_y[i] += acc[t][4 * nn + i];
                sum_z[i] += acc[t][5 * nn + i];
            }

        if (n_streamed > 0) {
            std::ofstream stream = s.open_csv("paths_eps" + std::to_string(ei) + ".csv");
            stream << "path_id,node,X_eps,X1,X2,Y_hat,Z_hat\n";
            for (const std::string& text : stream_text) stream << text;
        }

        std::ofstream f = s.open_csv("summary_eps" + std::to_string(ei) + ".csv");
        f << "s,mean_X_eps,sd_X_eps,mean_X1,mean_X2,mean_Y_hat,mean_Z_hat\n";
        for (int i = 0; i < nn; ++i) {
            const double mx = sum_x[i] / P;
            const double var = std::max(0.0, sum_x_sq[i] / P - mx * mx);
            f << format_g17(grid.node(i)) << "," << format_g17(mx) << "," << format_g17(std::sqrt(var)) << ","
              << format_g17(sum_x1[i] / P) << "," << format_g17(sum_x2[i] / P) << ","
              << format_g17(sum_y[i] / P) << "," << format_g17(sum_z[i] / P) << "\n";
        }

        double res_mean = 0.0;
        for (double r : terminal_residual) res_mean += r;
        res_mean /= P;
        double res_var = 0.0;
        for (double r : terminal_residual) res_var += (r - res_mean) * (r - res_mean);
        std::ofstream g = s.open_csv("terminal_eps" + std::to_string(ei) + ".csv");
        g << "eps,order,mean_abs_terminal_residual,std_error\n";
        g << format_g17(eps) << "," << s.cfg.order << "," << format_g17(res_mean) << ","
          << format_g17(std::sqrt(res_var / std::max(1, P - 1) / P)) << "\n";
    }
}

void cmd_compare(const Session& s) {
    const TimeGrid grid = s.master_grid();
    std::ofstream f = s.open_csv("compare.csv");
    f << "eps,order,y0_expansion,y0_reference,gap,ref_std_error\n";
    for (std::size_t ei = 0; ei < s.cfg.eps_list.size(); ++ei) {
        const double eps = s.cfg.eps_list[ei];
        const double ye = expansion_y0(s, grid, eps);
        const ReferenceRun ref = reference_y0(s, eps);
        write_lsmc_diagnostics(s, ei, ref);
        f << format_g17(eps) << "," << s.cfg.order << "," << format_g17(ye) << "," << format_g17(ref.y0) << ","
          << format_g17(ye - ref.y0) << "," << format_g17(ref.std_error) << "\n";
    }
}

void cmd_sweep(const Session& s) {
    const TimeGrid grid = s.master_grid();
    std::vector<double> eps_used, gap_used;
    std::ofstream f = s.open_csv("sweep.csv");
    f << "eps,order,y0_expansion,y0_reference,gap,ref_std_error,used_in_fit\n";
    for (double eps : s.cfg.eps_list) {
        const double ye = expansion_y0(s, grid, eps);
        const ReferenceRun ref = reference_y0(s, eps);
        const double gap = std::abs(ye - ref.y0);
        const bool keep = gap >= 3.0 * ref.std_error;
        if (keep) {
            eps_used.push_back(eps);
            gap_used.push_back(gap);
        }
        f << format_g17(eps) << "," << s.cfg.order << "," << format_g17(ye) << "," << format_g17(ref.y0) << ","
          << format_g17(gap) << "," << format_g17(ref.std_error) << "," << (keep ? 1 : 0) << "\n";
    }
    std::ofstream g = s.open_csv("slope.csv");
    g << "order,n_points,slope\n";
    const double slope = eps_used.size() >= 2 ? fit_loglog_slope(eps_used, gap_used)
                                              : std::numeric_limits<double>::quiet_NaN();
    g << s.cfg.order << "," << eps_used.size() << "," << format_g17(slope) << "\n";
}

void cmd_charfn(const Session& s) {
    if (!s.model.is_levy || !s.model.levy->additive)
        throw config_error("charfn: requires an additive Levy catalog model");
    const ExpLevyModel& levy = *s.model.levy;
    const TimeGrid grid = s.master_grid();
    const double eps = s.cfg.eps_list.front();

    std::ofstream f = s.open_csv("charfn.csv");
    f << "theta,re,im,exact_re,exact_im,abs_gap\n";
    for (double theta : s.cfg.theta_list) {
        const CharFnEstimate est = estimate_charfn(levy, theta, eps, s.cfg.order, grid);
        const std::complex<double> exact =
            levy_khintchine_exact(levy.drift(0.0), levy.vol(0.0), levy.measure,
                                  [&levy](double z) { return levy.jump_gamma(0.0, z); }, eps, theta,
                                  levy.horizon, levy.initial_state);
        f << format_g17(theta) << "," << format_g17(est.value.real()) << "," << format_g17(est.value.imag())
          << "," << format_g17(exact.real()) << "," << format_g17(exact.imag()) << ","
          << format_g17(std::abs(est.value - exact)) << "\n";
    }
}

} // namespace

double fit_loglog_slope(const std::vector<double>& eps, const std::vector<double>& gap) {
    if (eps.size() != gap.size() || eps.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need at least two points");
    double mx = 0.0, my = 0.0;
    const int n = static_cast<int>(eps.size());
    for (int i = 0; i < n; ++i) {
        mx += std::log(eps[i]);
        my += std::log(gap[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = std::log(eps[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(gap[i]) - my);
    }
    return sxy / sxx;
}

int run_experiment(const ExperimentConfig& config) {
    config.check();

    Session s{config, make_model(config.model), std::filesystem::path(config.out_dir)};
    if (!config.measure_files.empty()) {
        s.model.measure = DiscreteLevyMeasure::from_files(config.measure_files);
        if (s.model.is_levy) s.model.levy->measure = s.model.measure;
    }
    if (s.cfg.order == -1) s.cfg.order = s.model.is_levy ? 3 : 2;
    if (!s.model.is_levy && s.cfg.order > 2)
        throw config_error("config: order > 2 requires a Levy catalog model");

    std::filesystem::create_directories(s.out);
    write_manifest(s);

    if (config.command == "expand") cmd_expand(s);
    else if (config.command == "simulate") cmd_simulate(s);
    else if (config.command == "compare") cmd_compare(s);
    else if (config.command == "sweep") cmd_sweep(s);
    else cmd_charfn(s);
    return 0;
}

} // namespace fbsde
